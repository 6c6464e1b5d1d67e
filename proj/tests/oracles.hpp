#pragma once

// Independent reference computations for the tests. They work on raw GMP
// rationals and read the problem only through visited(), so they share no
// code path with the library rules.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "mpass/problem.hpp"
#include "mpass/rational.hpp"

namespace oracle {

using Shares = std::vector<mpq_class>;

inline Shares shares_of(const mpass::Allocation& a) {
  Shares out;
  for (const auto& s : a.shares) out.push_back(s.raw());
  return out;
}

inline mpq_class price_of(const mpass::Problem& p) { return p.price().raw(); }

inline long holder_visits(const mpass::Problem& p, std::size_t a) {
  long e = 0;
  for (std::size_t i = 0; i < p.museum_count(); ++i) e += p.visited(a, i) ? 1 : 0;
  return e;
}

inline long museum_visits(const mpass::Problem& p, std::size_t i) {
  long e = 0;
  for (std::size_t a = 0; a < p.holder_count(); ++a) e += p.visited(a, i) ? 1 : 0;
  return e;
}

/// What happens to the pass of a holder who visited nothing.
enum class NullPass { Everyone, NonDummy, ByVisits };

/// Pass-by-pass split: a visiting holder's π goes equally to the museums they
/// visited; a null holder's π follows `policy`. All-zero matrix: nπ/m each.
inline Shares per_pass_split(const mpass::Problem& p, NullPass policy) {
  const auto m = p.museum_count();
  const mpq_class pi = price_of(p);
  Shares out(m, 0);
  long total_visits = 0;
  std::vector<long> col(m);
  for (std::size_t i = 0; i < m; ++i) total_visits += col[i] = museum_visits(p, i);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const long e = holder_visits(p, a);
    for (std::size_t i = 0; i < m; ++i) {
      if (e > 0) {
        if (p.visited(a, i)) out[i] += pi / e;
      } else if (total_visits == 0 || policy == NullPass::Everyone) {
        out[i] += pi / static_cast<long>(m);
      } else if (policy == NullPass::NonDummy) {
        const long live = std::count_if(col.begin(), col.end(), [](long c) { return c > 0; });
        if (col[i] > 0) out[i] += pi / live;
      } else {
        out[i] += pi * col[i] / total_visits;
      }
    }
  }
  return out;
}

inline Shares uniform(const mpass::Problem& p) {
  const mpq_class each = price_of(p) * static_cast<long>(p.holder_count()) / static_cast<long>(p.museum_count());
  return Shares(p.museum_count(), each);
}

inline Shares proportional(const mpass::Problem& p) {
  const auto m = p.museum_count();
  long total = 0;
  for (std::size_t i = 0; i < m; ++i) total += museum_visits(p, i);
  if (total == 0) return oracle::uniform(p);
  const mpq_class revenue = price_of(p) * static_cast<long>(p.holder_count());
  Shares out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = revenue * museum_visits(p, i) / total;
  return out;
}

/// Shapley value of v(S) = π·#{holders who visited some museum in S},
/// averaged over every museum ordering: in each ordering a holder's π goes to
/// the first museum of the ordering they visited. Fine for m <= 6.
inline Shares permutation_shapley(const mpass::Problem& p) {
  const auto m = p.museum_count();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long> firsts(m, 0);
  long orderings = 0;
  do {
    ++orderings;
    for (std::size_t a = 0; a < p.holder_count(); ++a) {
      for (auto i : order) {
        if (p.visited(a, i)) {
          ++firsts[i];
          break;
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));
  Shares out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = price_of(p) * firsts[i] / orderings;
  return out;
}

/// Per-holder closed form: unvisited museums get (1+ε)π/m, visited
/// ones share the rest.
inline Shares r_epsilon(const mpass::Problem& p, const mpq_class& eps) {
  const auto m = static_cast<long>(p.museum_count());
  const mpq_class pi = price_of(p);
  Shares out(p.museum_count(), 0);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const long e = holder_visits(p, a);
    for (std::size_t i = 0; i < p.museum_count(); ++i) {
      if (p.visited(a, i)) {
        out[i] += (m - (m - e) * (1 + eps)) * pi / (m * e);
      } else {
        out[i] += (1 + eps) * pi / m;
      }
    }
  }
  return out;
}

inline Shares q(std::initializer_list<const char*> values) {
  Shares out;
  for (const char* v : values) out.emplace_back(v);
  for (auto& v : out) v.canonicalize();
  return out;
}

/// The five-holder, three-museum example used throughout: e = (2, 3, 0),
/// holder 5 visits nothing.
inline mpass::Problem example_one() {
  return mpass::Problem({1, 2, 3}, {1, 2, 3, 4, 5}, mpass::Rational(1),
                        {{1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 0}});
}

/// The same problem without the null holder.
inline mpass::Problem example_one_reduced() {
  return mpass::Problem({1, 2, 3}, {1, 2, 3, 4}, mpass::Rational(1), {{1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 1, 0}});
}

/// Random problem with m museums, n holders, bits ~ Bernoulli(density).
inline mpass::Problem random_problem(std::mt19937_64& rng, std::size_t m, std::size_t n, const mpass::Rational& price,
                                     bool reduced, double density = 0.5) {
  std::bernoulli_distribution bit(density);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<mpass::VisitRow> rows(n, mpass::VisitRow(m, 0));
  for (auto& row : rows) {
    for (auto& b : row) b = bit(rng) ? 1 : 0;
    if (reduced && std::count(row.begin(), row.end(), 1) == 0) row[pick(rng)] = 1;
  }
  std::vector<mpass::Label> museums(m);
  std::vector<mpass::Label> holders(n);
  std::iota(museums.begin(), museums.end(), 1);
  std::iota(holders.begin(), holders.end(), 1);
  return mpass::Problem(museums, holders, price, rows);
}

inline mpass::Rational random_rational(std::mt19937_64& rng, long max_num = 50, long max_den = 20) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  return mpass::Rational(num(rng), den(rng));
}

inline mpass::Rational random_unit(std::mt19937_64& rng, long max_den = 12) {
  std::uniform_int_distribution<long> den(1, max_den);
  const long d = den(rng);
  std::uniform_int_distribution<long> num(0, d);
  return mpass::Rational(num(rng), d);
}

}  // namespace oracle
