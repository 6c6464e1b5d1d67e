#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace mpass {

/// Predicate over a flat case index; true means the case violates the
/// property being swept.
using CasePredicate = std::function<bool(std::size_t)>;

/// Smallest k in [0, count) with fails(k), scanning in order. Reference
/// implementation for first_failure_parallel. An exception thrown by the
/// predicate propagates from the first index that throws.
std::optional<std::size_t> first_failure_serial(std::size_t count, const CasePredicate& fails);

/// Same result as first_failure_serial, computed with an OpenMP loop. Cases
/// above the best failure found so far are skipped. If some case throws, the
/// exception of the lowest throwing index is rethrown when that index is
/// below the first failure, matching the serial scan.
std::optional<std::size_t> first_failure_parallel(std::size_t count, const CasePredicate& fails);

/// Number of OpenMP threads the parallel sweep will use.
int sweep_threads();

}  // namespace mpass
