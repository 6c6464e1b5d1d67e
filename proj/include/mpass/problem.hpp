#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "mpass/rational.hpp"

namespace mpass {

using Label = std::int64_t;
/// One holder's visits in museum order; every entry is 0 or 1.
using VisitRow = std::vector<std::uint8_t>;

struct VisitCounts {
  std::vector<std::int64_t> per_museum;  // e_i, column sums
  std::vector<std::int64_t> per_holder;  // e^a, row sums
};

enum class DomainTag { Reduced, EnlargedOnly };

/// A museum pass problem: museums, pass holders, pass price and the binary
/// entrance matrix (row a = holder a's visits, in museum order).
///
/// Construction validates and canonicalizes: labels must be distinct positive
/// integers and are stored ascending, with the matrix permuted to match.
/// Immutable afterwards.
class Problem {
 public:
  Problem(std::vector<Label> museums, std::vector<Label> holders, Rational price,
          std::vector<VisitRow> entrance);

  const std::vector<Label>& museums() const { return museums_; }
  const std::vector<Label>& holders() const { return holders_; }
  const Rational& price() const { return price_; }
  std::size_t museum_count() const { return museums_.size(); }
  std::size_t holder_count() const { return holders_.size(); }

  bool visited(std::size_t holder_index, std::size_t museum_index) const {
    return entrance_[holder_index * museums_.size() + museum_index] != 0;
  }
  std::span<const std::uint8_t> row(std::size_t holder_index) const {
    return {entrance_.data() + holder_index * museums_.size(), museums_.size()};
  }
  std::vector<VisitRow> entrance() const;

  /// n·π, the revenue every rule must distribute.
  Rational revenue() const { return price_ * Rational(static_cast<long>(holders_.size())); }

  std::size_t museum_index(Label museum) const;
  std::size_t holder_index(Label holder) const;

  friend bool operator==(const Problem&, const Problem&) = default;

 private:
  std::vector<Label> museums_;
  std::vector<Label> holders_;
  Rational price_;
  std::vector<std::uint8_t> entrance_;  // row-major, holders x museums
};

struct Classification {
  VisitCounts counts;
  DomainTag tag;
  std::set<Label> dummy_museums;
  std::set<Label> null_holders;
};

Classification classify(const Problem& p);

VisitCounts visit_counts(const Problem& p);
bool is_reduced(const Problem& p);
bool is_zero_matrix(const Problem& p);

/// The single-holder problem (M, {a}, π, E^(a)). Throws InputError for an
/// unknown holder label.
Problem restrict_to_holder(const Problem& p, Label holder);

/// Stacks q's rows below p's. Requires identical museums and price and
/// disjoint holder labels; throws InputError otherwise.
Problem stack(const Problem& p, const Problem& q);

/// Relabels holders: holder holders()[k] becomes image[k]. `image` must be a
/// permutation of the holder labels; throws InputError otherwise.
Problem relabel_holders(const Problem& p, const std::vector<Label>& image);

/// Per-museum shares. A valid allocation for a problem is non-negative and
/// sums exactly to n·π; rules produce one, but the type itself does not
/// enforce it so that checkers can reason about arbitrary vectors.
struct Allocation {
  std::vector<Rational> shares;

  Rational total() const;
  std::size_t size() const { return shares.size(); }
  const Rational& operator[](std::size_t i) const { return shares[i]; }
  Rational& operator[](std::size_t i) { return shares[i]; }

  Allocation& operator+=(const Allocation& rhs);
  friend Allocation operator+(Allocation lhs, const Allocation& rhs) { return lhs += rhs; }
  friend Allocation operator*(const Rational& k, Allocation a);
  friend bool operator==(const Allocation&, const Allocation&) = default;

  static Allocation zeros(std::size_t m);
};

/// Non-negative and summing exactly to p.revenue(), with one share per museum.
bool is_valid_allocation(const Allocation& a, const Problem& p);

}  // namespace mpass
