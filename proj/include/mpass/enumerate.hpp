#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpass/problem.hpp"
#include "mpass/rational.hpp"

namespace mpass {

enum class Domain { Reduced, Enlarged };

struct EnumerationConfig {
  std::size_t m_max = 3;
  std::size_t n_max = 3;
  std::vector<Rational> prices{Rational(1), Rational(1, 2)};
  Domain domain = Domain::Reduced;
  /// Upper bound on the number of cases an audit may visit.
  std::size_t budget = 5'000'000;

  /// Throws InputError unless m_max, n_max >= 1, prices non-empty and positive.
  void validate() const;
};

/// The problem with museums {1..m}, holders {first_holder..first_holder+n-1}
/// and the matrix whose row-major bits spell `bits` (first entry most
/// significant).
Problem problem_from_bits(std::size_t m, std::size_t n, const Rational& price, std::uint64_t bits,
                          std::int64_t first_holder = 1);

/// Every n x m matrix for m <= m_max, n <= n_max at each price, ordered by
/// price (as listed), then m, then n, then row-major lexicographic matrix
/// order. The reduced domain drops matrices with a zero row.
std::vector<Problem> enumerate_problems(const EnumerationConfig& cfg);

/// Number of problems enumerate_problems would produce, without building them.
std::size_t count_problems(const EnumerationConfig& cfg);

std::string to_string(Domain d);
Domain parse_domain(std::string_view text);

}  // namespace mpass
