#include "mpass/problem.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mpass/errors.hpp"

namespace mpass {

namespace {

void require_labels(const std::vector<Label>& labels, const char* what) {
  if (labels.empty()) throw InputError(std::string("a problem needs at least one ") + what);
  std::set<Label> seen;
  for (Label l : labels) {
    if (l <= 0) throw InputError(std::string(what) + " labels must be positive, got " + std::to_string(l));
    if (!seen.insert(l).second) throw InputError(std::string("duplicate ") + what + " label " + std::to_string(l));
  }
}

std::vector<std::size_t> ascending_order(const std::vector<Label>& labels) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return order;
}

}  // namespace

Problem::Problem(std::vector<Label> museums, std::vector<Label> holders, Rational price,
                 std::vector<VisitRow> entrance)
    : price_(std::move(price)) {
  require_labels(museums, "museum");
  require_labels(holders, "holder");
  if (price_.sign() <= 0) throw InputError("pass price must be positive, got " + price_.to_string());
  if (entrance.size() != holders.size()) {
    throw InputError("entrance matrix has " + std::to_string(entrance.size()) + " rows for " +
                     std::to_string(holders.size()) + " holders");
  }
  for (const auto& row : entrance) {
    if (row.size() != museums.size()) {
      throw InputError("entrance row has " + std::to_string(row.size()) + " entries for " +
                       std::to_string(museums.size()) + " museums");
    }
    for (auto bit : row) {
      if (bit > 1) throw InputError("entrance entries must be 0 or 1");
    }
  }

  const auto col_order = ascending_order(museums);
  const auto row_order = ascending_order(holders);
  museums_.reserve(museums.size());
  holders_.reserve(holders.size());
  for (auto i : col_order) museums_.push_back(museums[i]);
  for (auto a : row_order) holders_.push_back(holders[a]);
  entrance_.reserve(museums.size() * holders.size());
  for (auto a : row_order) {
    for (auto i : col_order) entrance_.push_back(entrance[a][i]);
  }
}

std::vector<VisitRow> Problem::entrance() const {
  std::vector<VisitRow> rows;
  rows.reserve(holders_.size());
  for (std::size_t a = 0; a < holders_.size(); ++a) {
    auto r = row(a);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

std::size_t Problem::museum_index(Label museum) const {
  auto it = std::lower_bound(museums_.begin(), museums_.end(), museum);
  if (it == museums_.end() || *it != museum) throw InputError("unknown museum label " + std::to_string(museum));
  return static_cast<std::size_t>(it - museums_.begin());
}

std::size_t Problem::holder_index(Label holder) const {
  auto it = std::lower_bound(holders_.begin(), holders_.end(), holder);
  if (it == holders_.end() || *it != holder) throw InputError("unknown holder label " + std::to_string(holder));
  return static_cast<std::size_t>(it - holders_.begin());
}

VisitCounts visit_counts(const Problem& p) {
  VisitCounts c;
  c.per_museum.assign(p.museum_count(), 0);
  c.per_holder.assign(p.holder_count(), 0);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    for (std::size_t i = 0; i < p.museum_count(); ++i) {
      if (p.visited(a, i)) {
        ++c.per_museum[i];
        ++c.per_holder[a];
      }
    }
  }
  return c;
}

Classification classify(const Problem& p) {
  Classification out{visit_counts(p), DomainTag::Reduced, {}, {}};
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (out.counts.per_museum[i] == 0) out.dummy_museums.insert(p.museums()[i]);
  }
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    if (out.counts.per_holder[a] == 0) out.null_holders.insert(p.holders()[a]);
  }
  out.tag = out.null_holders.empty() ? DomainTag::Reduced : DomainTag::EnlargedOnly;
  return out;
}

bool is_reduced(const Problem& p) {
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto r = p.row(a);
    if (std::none_of(r.begin(), r.end(), [](auto b) { return b != 0; })) return false;
  }
  return true;
}

bool is_zero_matrix(const Problem& p) {
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto r = p.row(a);
    if (std::any_of(r.begin(), r.end(), [](auto b) { return b != 0; })) return false;
  }
  return true;
}

Problem restrict_to_holder(const Problem& p, Label holder) {
  const auto a = p.holder_index(holder);
  auto r = p.row(a);
  return Problem(p.museums(), {holder}, p.price(), {VisitRow(r.begin(), r.end())});
}

Problem stack(const Problem& p, const Problem& q) {
  if (p.museums() != q.museums()) throw InputError("cannot stack problems over different museums");
  if (p.price() != q.price()) throw InputError("cannot stack problems with different pass prices");
  std::vector<Label> holders = p.holders();
  for (Label l : q.holders()) {
    if (std::binary_search(p.holders().begin(), p.holders().end(), l)) {
      throw InputError("holder label " + std::to_string(l) + " appears in both stacked problems");
    }
    holders.push_back(l);
  }
  auto rows = p.entrance();
  auto lower = q.entrance();
  rows.insert(rows.end(), lower.begin(), lower.end());
  return Problem(p.museums(), std::move(holders), p.price(), std::move(rows));
}

Problem relabel_holders(const Problem& p, const std::vector<Label>& image) {
  if (image.size() != p.holder_count()) throw InputError("permutation size does not match holder count");
  std::vector<Label> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != p.holders()) throw InputError("holder map is not a permutation of the holder labels");
  return Problem(p.museums(), image, p.price(), p.entrance());
}

Rational Allocation::total() const {
  Rational sum;
  for (const auto& s : shares) sum += s;
  return sum;
}

Allocation& Allocation::operator+=(const Allocation& rhs) {
  if (rhs.shares.size() != shares.size()) throw std::invalid_argument("allocation size mismatch");
  for (std::size_t i = 0; i < shares.size(); ++i) shares[i] += rhs.shares[i];
  return *this;
}

Allocation operator*(const Rational& k, Allocation a) {
  for (auto& s : a.shares) s *= k;
  return a;
}

Allocation Allocation::zeros(std::size_t m) { return Allocation{std::vector<Rational>(m)}; }

bool is_valid_allocation(const Allocation& a, const Problem& p) {
  if (a.size() != p.museum_count()) return false;
  for (const auto& s : a.shares) {
    if (s.sign() < 0) return false;
  }
  return a.total() == p.revenue();
}

}  // namespace mpass
