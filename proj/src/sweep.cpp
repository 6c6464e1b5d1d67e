#include "mpass/sweep.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>

#include <omp.h>

namespace mpass {

std::optional<std::size_t> first_failure_serial(std::size_t count, const CasePredicate& fails) {
  for (std::size_t k = 0; k < count; ++k) {
    if (fails(k)) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_failure_parallel(std::size_t count, const CasePredicate& fails) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  // Lowest index that either failed or threw.
  std::atomic<std::size_t> lowest{none};
  std::size_t thrown_at = none;
  std::exception_ptr thrown;

  auto lower_to = [&](std::size_t k) {
    std::size_t cur = lowest.load(std::memory_order_relaxed);
    while (k < cur && !lowest.compare_exchange_weak(cur, k, std::memory_order_relaxed)) {
    }
  };

  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t s = 0; s < n; ++s) {
    const auto k = static_cast<std::size_t>(s);
    if (k > lowest.load(std::memory_order_relaxed)) continue;
    try {
      if (fails(k)) lower_to(k);
    } catch (...) {
#pragma omp critical(mpass_sweep_exception)
      {
        if (k < thrown_at) {
          thrown_at = k;
          thrown = std::current_exception();
        }
      }
      lower_to(k);
    }
  }

  const std::size_t first = lowest.load();
  if (first == none) return std::nullopt;
  if (thrown && thrown_at == first) std::rethrow_exception(thrown);
  return first;
}

int sweep_threads() { return omp_get_max_threads(); }

}  // namespace mpass
