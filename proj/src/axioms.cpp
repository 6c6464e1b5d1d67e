#include "mpass/axioms.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>

#include "mpass/errors.hpp"
#include "mpass/sweep.hpp"

namespace mpass {

namespace {

AxiomVerdict pass_verdict(const Rule& rule, const AxiomId& axiom) {
  return AxiomVerdict{true, std::nullopt, 1, axiom, rule.name()};
}

AxiomVerdict fail_verdict(const Rule& rule, const AxiomId& axiom, Witness w) {
  return AxiomVerdict{false, std::move(w), 1, axiom, rule.name()};
}

void require_tau(const Rational& tau) {
  if (!in_unit_interval(tau)) throw InputError("tau must lie in [0,1], got " + tau.to_string());
}

bool same_column(const Problem& p, std::size_t i, std::size_t j) {
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    if (p.visited(a, i) != p.visited(a, j)) return false;
  }
  return true;
}

bool column_is_zero(const Problem& p, std::size_t i) {
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    if (p.visited(a, i)) return false;
  }
  return true;
}

Problem with_newcomer(const Problem& p, const VisitRow& row) {
  if (row.size() != p.museum_count()) {
    throw InputError("newcomer row has " + std::to_string(row.size()) + " entries for " +
                     std::to_string(p.museum_count()) + " museums");
  }
  const Label label = p.holders().back() + 1;
  return stack(p, Problem(p.museums(), {label}, p.price(), {row}));
}

Problem shift_holders(const Problem& p, Label offset) {
  std::vector<Label> holders = p.holders();
  for (auto& h : holders) h += offset;
  return Problem(p.museums(), std::move(holders), p.price(), p.entrance());
}

std::vector<std::vector<Label>> permutations_of(std::size_t n) {
  std::vector<Label> image(n);
  std::iota(image.begin(), image.end(), Label{1});
  std::vector<std::vector<Label>> out;
  do {
    out.push_back(image);
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

std::vector<VisitRow> rows_of_width(std::size_t m, bool include_zero) {
  std::vector<VisitRow> out;
  for (std::uint64_t bits = include_zero ? 0 : 1; bits < (std::uint64_t{1} << m); ++bits) {
    VisitRow row(m);
    for (std::size_t i = 0; i < m; ++i) row[i] = static_cast<std::uint8_t>((bits >> (m - 1 - i)) & 1U);
    out.push_back(std::move(row));
  }
  return out;
}

/// Flat index space over "units" (an instance, or a group of instances),
/// each contributing a fixed number of cases.
struct CaseSpace {
  std::shared_ptr<const std::vector<Problem>> instances;
  std::vector<std::size_t> offsets{0};
  std::function<AxiomVerdict(std::size_t unit, std::size_t local)> eval;

  std::size_t size() const { return offsets.back(); }
  void add_unit(std::size_t cases) { offsets.push_back(offsets.back() + cases); }

  AxiomVerdict at(std::size_t k) const {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), k);
    const auto unit = static_cast<std::size_t>(it - offsets.begin()) - 1;
    return eval(unit, k - offsets[unit]);
  }
};

/// Contiguous [begin, end) ranges of instances sharing price and museum
/// count (and holder count when `split_by_holders`).
std::vector<std::pair<std::size_t, std::size_t>> groups_of(const std::vector<Problem>& xs, bool split_by_holders) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t k = 1; k <= xs.size(); ++k) {
    const bool boundary = k == xs.size() || xs[k].price() != xs[begin].price() ||
                          xs[k].museum_count() != xs[begin].museum_count() ||
                          (split_by_holders && xs[k].holder_count() != xs[begin].holder_count());
    if (boundary) {
      out.emplace_back(begin, k);
      begin = k;
    }
  }
  return out;
}

CaseSpace build_cases(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg) {
  CaseSpace space;
  space.instances = std::make_shared<const std::vector<Problem>>(enumerate_problems(cfg));
  const auto& xs = *space.instances;
  const auto keep = space.instances;

  switch (axiom.kind) {
    case AxiomKind::ETE:
    case AxiomKind::Dummy:
    case AxiomKind::OPD:
    case AxiomKind::TauOPD: {
      for (std::size_t u = 0; u < xs.size(); ++u) space.add_unit(1);
      space.eval = [&rule, axiom, keep](std::size_t u, std::size_t) { return check_single(rule, axiom, (*keep)[u]); };
      break;
    }
    case AxiomKind::HolderAnonymity: {
      std::vector<std::vector<std::vector<Label>>> perms(cfg.n_max + 1);
      for (std::size_t n = 1; n <= cfg.n_max; ++n) perms[n] = permutations_of(n);
      for (const auto& p : xs) space.add_unit(perms[p.holder_count()].size());
      space.eval = [&rule, keep, perms = std::move(perms)](std::size_t u, std::size_t r) {
        const Problem& p = (*keep)[u];
        return check_anonymity(rule, p, perms[p.holder_count()][r]);
      };
      break;
    }
    case AxiomKind::IEV: {
      std::vector<std::vector<VisitRow>> rows(cfg.m_max + 1);
      for (std::size_t m = 1; m <= cfg.m_max; ++m) rows[m] = rows_of_width(m, cfg.domain == Domain::Enlarged);
      for (const auto& p : xs) space.add_unit(rows[p.museum_count()].size());
      space.eval = [&rule, keep, rows = std::move(rows)](std::size_t u, std::size_t r) {
        const Problem& p = (*keep)[u];
        return check_iev(rule, p, rows[p.museum_count()][r]);
      };
      break;
    }
    case AxiomKind::RevenueAdditivity: {
      auto groups = groups_of(xs, false);
      for (const auto& [b, e] : groups) space.add_unit((e - b) * (e - b));
      space.eval = [&rule, keep, groups = std::move(groups)](std::size_t u, std::size_t r) {
        const auto& xs = *keep;
        const auto [b, e] = groups[u];
        const std::size_t width = e - b;
        const Problem& p = xs[b + r / width];
        const Problem q = shift_holders(xs[b + r % width], static_cast<Label>(p.holder_count()));
        return check_additivity(rule, p, q);
      };
      break;
    }
    case AxiomKind::IVD: {
      auto groups = groups_of(xs, true);
      for (const auto& [b, e] : groups) space.add_unit((e - b) * (e - b - 1));
      space.eval = [&rule, keep, groups = std::move(groups)](std::size_t u, std::size_t r) {
        const auto& xs = *keep;
        const auto [b, e] = groups[u];
        const std::size_t others = e - b - 1;
        const std::size_t first = r / others;
        std::size_t second = r % others;
        if (second >= first) ++second;
        return check_ivd(rule, xs[b + first], xs[b + second]);
      };
      break;
    }
  }
  return space;
}

using FirstFailure = std::optional<std::size_t> (*)(std::size_t, const CasePredicate&);

AxiomVerdict run_audit(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg, FirstFailure search) {
  cfg.validate();
  if (axiom.kind == AxiomKind::TauOPD) require_tau(axiom.tau);
  const CaseSpace space = build_cases(rule, axiom, cfg);
  const std::size_t total = space.size();
  if (total > cfg.budget) {
    throw BudgetError("audit of " + to_string(axiom) + " needs " + std::to_string(total) +
                      " cases, above the budget of " + std::to_string(cfg.budget));
  }
  const auto first = search(total, [&space](std::size_t k) { return !space.at(k).pass; });
  if (!first) {
    AxiomVerdict v = pass_verdict(rule, axiom);
    v.instances_checked = total;
    return v;
  }
  AxiomVerdict v = space.at(*first);
  v.axiom = axiom;
  v.instances_checked = *first + 1;
  return v;
}

}  // namespace

AxiomId parse_axiom(std::string_view text) {
  if (text == "ete") return {AxiomKind::ETE};
  if (text == "additivity" || text == "ra") return {AxiomKind::RevenueAdditivity};
  if (text == "dummy") return {AxiomKind::Dummy};
  if (text == "opd") return {AxiomKind::OPD};
  if (text == "anonymity") return {AxiomKind::HolderAnonymity};
  if (text == "ivd") return {AxiomKind::IVD};
  if (text == "iev") return {AxiomKind::IEV};
  constexpr std::string_view tau_prefix = "tau-opd:";
  if (text.substr(0, tau_prefix.size()) == tau_prefix) {
    auto tau = Rational::parse(text.substr(tau_prefix.size()));
    require_tau(tau);
    return AxiomId::tau_opd(std::move(tau));
  }
  throw InputError("unknown axiom '" + std::string(text) + "'");
}

std::string to_string(const AxiomId& axiom) {
  switch (axiom.kind) {
    case AxiomKind::ETE: return "ete";
    case AxiomKind::RevenueAdditivity: return "additivity";
    case AxiomKind::Dummy: return "dummy";
    case AxiomKind::OPD: return "opd";
    case AxiomKind::TauOPD: return "tau-opd:" + axiom.tau.to_string();
    case AxiomKind::HolderAnonymity: return "anonymity";
    case AxiomKind::IVD: return "ivd";
    case AxiomKind::IEV: return "iev";
  }
  return "?";
}

bool is_pair_axiom(AxiomKind kind) { return kind == AxiomKind::RevenueAdditivity || kind == AxiomKind::IVD; }

AxiomVerdict check_ete(const Rule& rule, const Problem& p) {
  const AxiomId axiom{AxiomKind::ETE};
  const Allocation r = rule(p);
  const auto m = p.museum_count();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (same_column(p, i, j) && r[i] != r[j]) {
        return fail_verdict(rule, axiom, {{p}, {p.museums()[i], p.museums()[j]}, r[i], r[j], "==", {}});
      }
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_additivity(const Rule& rule, const Problem& p, const Problem& q) {
  const AxiomId axiom{AxiomKind::RevenueAdditivity};
  const Problem joined = stack(p, q);
  const Allocation whole = rule(joined);
  const Allocation parts = rule(p) + rule(q);
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (whole[i] != parts[i]) {
      return fail_verdict(rule, axiom, {{p, q, joined}, {p.museums()[i]}, whole[i], parts[i], "==", {}});
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_dummy(const Rule& rule, const Problem& p) {
  const AxiomId axiom{AxiomKind::Dummy};
  const Allocation r = rule(p);
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (column_is_zero(p, i) && r[i].sign() != 0) {
      return fail_verdict(rule, axiom, {{p}, {p.museums()[i]}, r[i], Rational(0), "==", {}});
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_opd(const Rule& rule, const Problem& p, const Rational& tau) {
  require_tau(tau);
  const AxiomId axiom = tau == Rational(1) ? AxiomId{AxiomKind::OPD} : AxiomId::tau_opd(tau);
  const Allocation r = rule(p);
  const auto m = p.museum_count();
  std::vector<bool> dummy(m);
  for (std::size_t i = 0; i < m; ++i) dummy[i] = column_is_zero(p, i);
  for (std::size_t i = 0; i < m; ++i) {
    if (!dummy[i]) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (dummy[j]) continue;
      const Rational bound = tau * r[j];
      if (r[i] > bound) {
        return fail_verdict(rule, axiom, {{p}, {p.museums()[i], p.museums()[j]}, r[i], bound, "<=", {}});
      }
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_anonymity(const Rule& rule, const Problem& p, const std::vector<Label>& image) {
  const AxiomId axiom{AxiomKind::HolderAnonymity};
  const Problem moved = relabel_holders(p, image);
  const Allocation before = rule(p);
  const Allocation after = rule(moved);
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (after[i] != before[i]) {
      return fail_verdict(rule, axiom, {{p, moved}, {p.museums()[i]}, after[i], before[i], "==", image});
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_ivd(const Rule& rule, const Problem& p, const Problem& q) {
  const AxiomId axiom{AxiomKind::IVD};
  if (p.museums() != q.museums() || p.holders() != q.holders() || p.price() != q.price()) {
    throw InputError("independence of visits distribution compares problems with the same museums, holders and price");
  }
  if (p.entrance() == q.entrance()) throw InputError("independence of visits distribution needs two different matrices");
  std::optional<Allocation> rp;
  std::optional<Allocation> rq;
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (!column_is_zero(p, i) || !column_is_zero(q, i)) continue;
    if (!rp) {
      rp = rule(p);
      rq = rule(q);
    }
    if ((*rp)[i] != (*rq)[i]) {
      return fail_verdict(rule, axiom, {{p, q}, {p.museums()[i]}, (*rp)[i], (*rq)[i], "==", {}});
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_iev(const Rule& rule, const Problem& p, const VisitRow& newcomer_row) {
  const AxiomId axiom{AxiomKind::IEV};
  const Problem grown = with_newcomer(p, newcomer_row);
  const Allocation before = rule(p);
  const Allocation after = rule(grown);
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (newcomer_row[i] == 0 && after[i] != before[i]) {
      return fail_verdict(rule, axiom, {{p, grown}, {p.museums()[i]}, after[i], before[i], "==", {}});
    }
  }
  return pass_verdict(rule, axiom);
}

AxiomVerdict check_single(const Rule& rule, const AxiomId& axiom, const Problem& p) {
  switch (axiom.kind) {
    case AxiomKind::ETE: return check_ete(rule, p);
    case AxiomKind::Dummy: return check_dummy(rule, p);
    case AxiomKind::OPD: return check_opd(rule, p, Rational(1));
    case AxiomKind::TauOPD: return check_opd(rule, p, axiom.tau);
    default: throw InputError("axiom " + to_string(axiom) + " is not a single-problem axiom");
  }
}

bool witness_reproduces(const Rule& rule, const AxiomId& axiom, const Witness& w) {
  if (w.problems.empty() || w.museums.empty()) return false;
  const Problem& p = w.problems[0];
  auto column = [](const Problem& x, Label museum) {
    const auto i = x.museum_index(museum);
    VisitRow col;
    for (std::size_t a = 0; a < x.holder_count(); ++a) col.push_back(x.visited(a, i) ? 1 : 0);
    return col;
  };
  auto is_dummy = [&](const Problem& x, Label museum) {
    const auto col = column(x, museum);
    return std::all_of(col.begin(), col.end(), [](auto b) { return b == 0; });
  };
  auto share = [&](const Problem& x, Label museum) { return rule(x)[x.museum_index(museum)]; };
  const Label i = w.museums[0];

  switch (axiom.kind) {
    case AxiomKind::ETE: {
      if (w.museums.size() != 2) return false;
      const Label j = w.museums[1];
      return column(p, i) == column(p, j) && share(p, i) == w.lhs && share(p, j) == w.rhs && w.lhs != w.rhs;
    }
    case AxiomKind::RevenueAdditivity: {
      if (w.problems.size() != 3) return false;
      const Problem joined = stack(w.problems[0], w.problems[1]);
      return joined == w.problems[2] && share(joined, i) == w.lhs &&
             share(w.problems[0], i) + share(w.problems[1], i) == w.rhs && w.lhs != w.rhs;
    }
    case AxiomKind::Dummy:
      return is_dummy(p, i) && share(p, i) == w.lhs && w.rhs == Rational(0) && w.lhs != w.rhs;
    case AxiomKind::OPD:
    case AxiomKind::TauOPD: {
      if (w.museums.size() != 2) return false;
      const Label j = w.museums[1];
      const Rational tau = axiom.kind == AxiomKind::OPD ? Rational(1) : axiom.tau;
      return is_dummy(p, i) && !is_dummy(p, j) && share(p, i) == w.lhs && tau * share(p, j) == w.rhs &&
             w.lhs > w.rhs;
    }
    case AxiomKind::HolderAnonymity: {
      if (w.problems.size() != 2) return false;
      const Problem moved = relabel_holders(p, w.permutation);
      return moved == w.problems[1] && share(moved, i) == w.lhs && share(p, i) == w.rhs && w.lhs != w.rhs;
    }
    case AxiomKind::IVD: {
      if (w.problems.size() != 2) return false;
      const Problem& q = w.problems[1];
      return p.museums() == q.museums() && p.holders() == q.holders() && p.price() == q.price() &&
             p.entrance() != q.entrance() && is_dummy(p, i) && is_dummy(q, i) && share(p, i) == w.lhs &&
             share(q, i) == w.rhs && w.lhs != w.rhs;
    }
    case AxiomKind::IEV: {
      if (w.problems.size() != 2) return false;
      const Problem& grown = w.problems[1];
      if (grown.holder_count() != p.holder_count() + 1) return false;
      const auto newcomer = grown.row(grown.holder_count() - 1);
      return newcomer[p.museum_index(i)] == 0 && grown.museums() == p.museums() && share(grown, i) == w.lhs &&
             share(p, i) == w.rhs && w.lhs != w.rhs;
    }
  }
  return false;
}

std::size_t audit_case_count(const AxiomId& axiom, const EnumerationConfig& cfg) {
  const Rule dummy_rule("none", [](const Problem& p) { return Allocation::zeros(p.museum_count()); });
  return build_cases(dummy_rule, axiom, cfg).size();
}

AxiomVerdict audit(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg) {
  return run_audit(rule, axiom, cfg, &first_failure_parallel);
}

AxiomVerdict audit_serial(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg) {
  return run_audit(rule, axiom, cfg, &first_failure_serial);
}

}  // namespace mpass
