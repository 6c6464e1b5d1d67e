#include "mpass/theorem_lab.hpp"

#include <algorithm>
#include <numeric>

#include "mpass/errors.hpp"

namespace mpass {

namespace {

Rational as_rational(std::size_t k) { return Rational(static_cast<long>(k)); }

std::size_t visits(const Pattern& p) { return static_cast<std::size_t>(std::count(p.begin(), p.end(), 1)); }

mpz_class factorial(std::size_t k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

void require_tau(const Rational& tau) {
  if (!in_unit_interval(tau)) throw InputError("tau must lie in [0,1], got " + tau.to_string());
}

/// Entry for a pattern given the unvisited share x (ignored when every
/// museum was visited).
Allocation entry_from_unvisited_share(const Frame& frame, const Pattern& pattern, const Rational& x) {
  const auto m = frame.museums.size();
  const auto e = visits(pattern);
  Allocation out = Allocation::zeros(m);
  if (e == m) {
    for (auto& s : out.shares) s = frame.price / as_rational(m);
    return out;
  }
  const Rational y = e == 0 ? Rational(0) : (frame.price - as_rational(m - e) * x) / as_rational(e);
  for (std::size_t i = 0; i < m; ++i) out[i] = pattern[i] ? y : x;
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool share_unvisited_museum(const Pattern& a, const Pattern& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] && !b[i]) return true;
  }
  return false;
}

mpz_class floor_of(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  return q;
}

}  // namespace

// -- TU-game oracle ---------------------------------------------------------

Allocation tu_shapley_oracle(const Problem& p) {
  const auto m = p.museum_count();
  if (m > max_oracle_museums) {
    throw InputError("the TU-game oracle enumerates subsets and accepts at most " +
                     std::to_string(max_oracle_museums) + " museums");
  }
  std::vector<std::uint32_t> masks(p.holder_count(), 0);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      if (p.visited(a, i)) masks[a] |= std::uint32_t{1} << i;
    }
  }
  const std::uint32_t subsets = std::uint32_t{1} << m;
  // covered[S]: holders who visited some museum of S, i.e. v(S)/π.
  std::vector<long> covered(subsets, 0);
  for (std::uint32_t s = 0; s < subsets; ++s) {
    for (auto mask : masks) covered[s] += (mask & s) ? 1 : 0;
  }

  const mpz_class m_fact = factorial(m);
  std::vector<Rational> weight(m);
  for (std::size_t k = 0; k < m; ++k) {
    weight[k] = Rational(mpq_class(factorial(k) * factorial(m - k - 1), m_fact));
  }

  Allocation out = Allocation::zeros(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    // Marginal contributions grouped by coalition size.
    std::vector<long> by_size(m, 0);
    for (std::uint32_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      by_size[static_cast<std::size_t>(__builtin_popcount(s))] += covered[s | bit] - covered[s];
    }
    Rational phi;
    for (std::size_t k = 0; k < m; ++k) phi += weight[k] * Rational(by_size[k]);
    out[i] = phi * p.price();
  }
  return out;
}

// -- tables -----------------------------------------------------------------

Frame Frame::of(std::size_t m, Rational price) {
  std::vector<Label> museums(m);
  std::iota(museums.begin(), museums.end(), Label{1});
  return Frame{std::move(museums), std::move(price)};
}

std::vector<Pattern> all_patterns(std::size_t m, Domain domain) {
  std::vector<Pattern> out;
  for (std::uint64_t bits = domain == Domain::Reduced ? 1 : 0; bits < (std::uint64_t{1} << m); ++bits) {
    Pattern p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<std::uint8_t>((bits >> (m - 1 - i)) & 1U);
    out.push_back(std::move(p));
  }
  return out;
}

std::string pattern_to_string(const Frame& frame, const Pattern& pattern) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!pattern[i]) continue;
    if (!first) out += ",";
    out += std::to_string(frame.museums[i]);
    first = false;
  }
  return out + "}";
}

Problem single_holder_problem(const Frame& frame, const Pattern& pattern, Label holder) {
  return Problem(frame.museums, {holder}, frame.price, {pattern});
}

Allocation AdditiveRuleTable::evaluate(const Problem& p) const {
  if (p.museums() != frame.museums || p.price() != frame.price) {
    throw InputError("problem does not match the table's museums and price");
  }
  Allocation out = Allocation::zeros(p.museum_count());
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto row = p.row(a);
    auto it = entries.find(Pattern(row.begin(), row.end()));
    if (it == entries.end()) throw InputError("table has no entry for a row of the problem");
    out += it->second;
  }
  return out;
}

AdditiveRuleTable table_of(const Rule& rule, const Frame& frame, Domain domain, Label holder) {
  AdditiveRuleTable t{frame, {}};
  for (auto& pattern : all_patterns(frame.museums.size(), domain)) {
    t.entries.emplace(pattern, rule(single_holder_problem(frame, pattern, holder)));
  }
  return t;
}

AdditiveRuleTable table_from_profile(const BetaProfile& profile, Base base, const Frame& frame, Domain domain,
                                     Label holder) {
  return table_of(Rule(rule::BetaFamily{profile, base}), frame, domain, holder);
}

// -- decomposition ----------------------------------------------------------

bool BetaDecomposition::all_in_unit_interval() const {
  return std::all_of(coefficients.begin(), coefficients.end(), [](const auto& c) { return c.in_unit_interval; });
}

const PatternCoefficient& BetaDecomposition::at(const Pattern& pattern) const {
  for (const auto& c : coefficients) {
    if (c.pattern == pattern) return c;
  }
  throw InputError("pattern not in decomposition");
}

BetaDecomposition decompose(const AdditiveRuleTable& table, Base base) {
  const auto m = table.frame.museums.size();
  const Rational& price = table.frame.price;
  const Rational m_r = as_rational(m);
  BetaDecomposition out{base, {}};

  for (const auto& [pattern, entry] : table.entries) {
    const std::string where = pattern_to_string(table.frame, pattern);
    if (entry.size() != m || entry.total() != price) {
      throw DecompositionError("entry for pattern " + where + " does not split the pass price", pattern);
    }
    std::optional<Rational> x;
    std::optional<Rational> y;
    for (std::size_t i = 0; i < m; ++i) {
      auto& slot = pattern[i] ? y : x;
      if (!slot) {
        slot = entry[i];
      } else if (*slot != entry[i]) {
        throw DecompositionError("entry for pattern " + where + " treats equal museums differently", pattern);
      }
    }

    PatternCoefficient c{pattern, x, y, Rational(1), Rational(1), true};
    const auto e = visits(pattern);
    if (e == 0 && base == Base::Shapley) {
      throw DecompositionError("the empty pattern has no Shapley base; decompose against ea", pattern);
    }
    if (e > 0 && e < m) {
      if (y->sign() == 0) {
        throw DecompositionError("pattern " + where + " gives visited museums 0 and unvisited " + x->to_string() +
                                     ": order preservation with dummies fails and no beta exists",
                                 pattern);
      }
      const Rational e_r = as_rational(e);
      c.alpha = *x / *y;
      c.beta = m_r * c.alpha / (c.alpha * (m_r - e_r) + e_r);
      c.in_unit_interval = *x <= *y;
    }

    // β·uniform + (1−β)·base must give the entry back exactly.
    for (std::size_t i = 0; i < m; ++i) {
      const Rational base_share = e == 0 ? price / m_r : (pattern[i] ? price / as_rational(e) : Rational(0));
      if (c.beta * price / m_r + (Rational(1) - c.beta) * base_share != entry[i]) {
        throw std::logic_error("beta reconstruction failed for pattern " + where);
      }
    }
    out.coefficients.push_back(std::move(c));
  }
  return out;
}

// -- synthesis --------------------------------------------------------------

AdditiveRuleTable Family::instantiate(const std::vector<Rational>& position) const {
  if (position.size() != tie_classes) throw InputError("need one position per tie class");
  AdditiveRuleTable t{frame, {}};
  std::map<Pattern, Rational> chosen;
  for (const auto& c : constraints) {
    const Rational& pos = position[c.tie_class];
    if (!in_unit_interval(pos)) throw InputError("family positions must lie in [0,1]");
    chosen.emplace(c.pattern, c.lower + pos * (c.upper - c.lower));
  }
  for (auto& pattern : all_patterns(frame.museums.size(), domain)) {
    auto it = chosen.find(pattern);
    t.entries.emplace(pattern, entry_from_unvisited_share(frame, pattern, it == chosen.end() ? Rational(0) : it->second));
  }
  return t;
}

AdditiveRuleTable Family::at(const Rational& t) const { return instantiate(std::vector<Rational>(tie_classes, t)); }

SynthesisResult synthesize(const std::vector<AxiomId>& axioms, const Frame& frame, Domain domain) {
  const auto m = frame.museums.size();
  if (m == 0) throw InputError("frame needs at least one museum");
  if (frame.price.sign() <= 0) throw InputError("frame price must be positive");

  bool ete = false;
  bool dummy = false;
  bool ivd = false;
  std::vector<Rational> taus;
  for (const auto& a : axioms) {
    switch (a.kind) {
      case AxiomKind::ETE: ete = true; break;
      case AxiomKind::Dummy: dummy = true; break;
      case AxiomKind::OPD: taus.emplace_back(1); break;
      case AxiomKind::TauOPD: require_tau(a.tau); taus.push_back(a.tau); break;
      case AxiomKind::IVD: ivd = true; break;
      case AxiomKind::RevenueAdditivity: break;
      default: throw InputError("unsupported axiom set: synthesis handles ete, dummy, opd, tau-opd, ivd");
    }
  }
  if (!ete) throw InputError("unsupported axiom set: synthesis needs ete");

  const Rational m_r = as_rational(m);
  const Rational& price = frame.price;

  // One unknown x per pattern with an unvisited museum.
  std::vector<PatternConstraint> cs;
  for (auto& pattern : all_patterns(m, domain)) {
    const auto e = visits(pattern);
    if (e == m) continue;
    PatternConstraint c{pattern, Rational(0), price / as_rational(m - e), 0};
    if (e == 0) c.lower = c.upper = price / m_r;  // all museums tie, each gets π/m
    if (dummy) {
      c.lower = std::max(c.lower, Rational(0));
      c.upper = std::min(c.upper, Rational(0));
    }
    if (e > 0) {
      const Rational e_r = as_rational(e);
      for (const auto& tau : taus) {
        // x <= τ·y with (m−e)x + e·y = π
        c.upper = std::min(c.upper, tau * price / (e_r + tau * (m_r - e_r)));
      }
    }
    cs.push_back(std::move(c));
  }

  UnionFind uf(cs.size());
  if (ivd) {
    for (std::size_t a = 0; a < cs.size(); ++a) {
      for (std::size_t b = a + 1; b < cs.size(); ++b) {
        if (share_unvisited_museum(cs[a].pattern, cs[b].pattern)) uf.unite(a, b);
      }
    }
  }

  // Number tie classes by first appearance, intersect their intervals.
  std::map<std::size_t, std::size_t> class_of_root;
  std::vector<std::pair<Rational, Rational>> bounds;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const auto root = uf.find(k);
    auto [it, fresh] = class_of_root.emplace(root, bounds.size());
    if (fresh) {
      bounds.emplace_back(cs[k].lower, cs[k].upper);
      members.emplace_back();
    }
    auto& [lo, hi] = bounds[it->second];
    lo = std::max(lo, cs[k].lower);
    hi = std::min(hi, cs[k].upper);
    members[it->second].push_back(k);
    cs[k].tie_class = it->second;
  }

  for (std::size_t cls = 0; cls < bounds.size(); ++cls) {
    const auto& [lo, hi] = bounds[cls];
    if (lo <= hi) continue;
    Infeasible inf;
    for (auto k : members[cls]) inf.patterns.push_back(cs[k].pattern);
    std::stable_partition(inf.patterns.begin(), inf.patterns.end(), [](const Pattern& p) { return visits(p) == 0; });
    const bool has_empty = visits(inf.patterns.front()) == 0;
    inf.reason = "unvisited share must be at least " + lo.to_string() + " and at most " + hi.to_string();
    if (has_empty) {
      inf.reason += "; with E=0 every museum is a dummy and equal treatment splits the pass as " +
                    (price / m_r).to_string() + " each";
    }
    return inf;
  }

  for (auto& c : cs) {
    c.lower = bounds[c.tie_class].first;
    c.upper = bounds[c.tie_class].second;
  }
  Family fam{frame, domain, std::move(cs), bounds.size()};
  const bool unique = std::all_of(bounds.begin(), bounds.end(), [](const auto& b) { return b.first == b.second; });
  if (unique) return UniqueTable{fam.at(Rational(0))};
  return fam;
}

// -- τ bound ----------------------------------------------------------------

Rational tau_beta_bound(const Rational& tau, std::size_t n) {
  require_tau(tau);
  if (n < 1) throw InputError("holder count must be at least 1");
  const Rational n_r = as_rational(n);
  return tau / (n_r + tau * (Rational(1) - n_r));
}

Rational frame_beta_bound(const Rational& tau, std::size_t n, std::size_t m) {
  require_tau(tau);
  if (n < 1 || m < 2) throw InputError("frame bound needs n >= 1 and m >= 2");
  const Rational n_r = as_rational(n);
  const Rational m_r = as_rational(m);
  return m_r * tau / ((m_r - Rational(1)) * n_r * (Rational(1) - tau) + m_r * tau);
}

std::optional<BoundWitness> bound_witness(const Rational& tau, std::size_t n, std::size_t m, const Rational& beta) {
  require_tau(tau);
  if (n < 1 || m < 2) throw InputError("bound witness needs n >= 1 and m >= 2");
  if (!in_unit_interval(beta)) throw InputError("beta must lie in [0,1], got " + beta.to_string());
  const Rule rule(rule::ScalarConvex{beta, Base::Shapley});
  const AxiomId axiom = AxiomId::tau_opd(tau);
  const Rational n_r = as_rational(n);

  if (beta <= tau_beta_bound(tau, n)) {
    EnumerationConfig cfg;
    cfg.m_max = m;
    cfg.n_max = n;
    cfg.domain = Domain::Reduced;
    AxiomVerdict v = audit(rule, axiom, cfg);
    if (v.pass) return std::nullopt;
    Problem p = v.witness->problems.front();
    return BoundWitness{std::move(p), std::move(v)};
  }

  // frame_beta_bound(m') < β  ⇔  m'·D > βn(1−τ) with D = βn(1−τ) − τ(1−β) > 0.
  const Rational slack = beta * n_r * (Rational(1) - tau);
  const Rational d = slack - tau * (Rational(1) - beta);
  const mpz_class needed = floor_of(slack / d) + 1;
  constexpr unsigned long max_museums = 1'000'000;
  if (needed > max_museums) throw BudgetError("witness would need more than 1000000 museums");
  std::size_t museums = std::max<std::size_t>({m, n >= 2 ? 3U : 2U, static_cast<std::size_t>(needed.get_ui())});

  // Holder 1 visits every museum but the last (the dummy); the others visit
  // museum 2 only, so museum 1 keeps the smallest Shapley share 1/(m'-1).
  const Frame frame = Frame::of(museums, Rational(1));
  std::vector<Label> holders(n);
  std::iota(holders.begin(), holders.end(), Label{1});
  std::vector<VisitRow> rows(n, VisitRow(museums, 0));
  std::fill(rows[0].begin(), rows[0].end() - 1, 1);
  for (std::size_t a = 1; a < n; ++a) rows[a][1] = 1;
  Problem p(frame.museums, holders, frame.price, rows);

  AxiomVerdict v = check_opd(rule, p, tau);
  if (v.pass) throw std::logic_error("extremal problem does not violate tau-OPD");
  v.axiom = axiom;
  return BoundWitness{std::move(p), std::move(v)};
}

// -- impossibility certificate ----------------------------------------------

std::optional<InfeasibilityCertificate> impossibility_certificate(const Rational& tau) {
  require_tau(tau);
  if (tau == Rational(1)) return std::nullopt;
  const Rational price(1, 2);
  const Rational cap = tau / (Rational(1) + tau);
  const Rational both = Rational(2) * cap;
  const std::string t = tau.to_string();

  InfeasibilityCertificate cert{
      tau,
      {problem_from_bits(2, 2, price, 0b0000), problem_from_bits(2, 2, price, 0b1010),
       problem_from_bits(2, 2, price, 0b0101)},
      {
          "y2 = x2  (ivd: museum 2 is a dummy in problems 1 and 2)",
          "z1 = x1  (ivd: museum 1 is a dummy in problems 1 and 3)",
          "y1 + y2 = 1, hence y1 = 1 - x2",
          "z1 + z2 = 1, hence z2 = 1 - x1",
          "x1 + x2 = 1",
      },
      {
          "x2 <= " + t + "*y1 = " + t + "*(1 - x2)  =>  x2 <= " + cap.to_string() +
              "  (tau-opd in problem 2: museum 2 dummy, museum 1 not)",
          "x1 <= " + t + "*z2 = " + t + "*(1 - x1)  =>  x1 <= " + cap.to_string() +
              "  (tau-opd in problem 3: museum 1 dummy, museum 2 not)",
          "x1 + x2 <= " + both.to_string() + " < 1, contradicting x1 + x2 = 1",
      },
      cap,
      Rational(1) - both,
  };
  return cert;
}

std::optional<CertificateBreach> certificate_breach(const InfeasibilityCertificate& cert, const Rule& rule) {
  const auto& [zero, first, second] = cert.problems;
  for (std::size_t k = 0; k < cert.problems.size(); ++k) {
    if (!is_valid_allocation(rule(cert.problems[k]), cert.problems[k])) {
      return CertificateBreach{"problem " + std::to_string(k + 1) + " is not split as a rule must", std::nullopt};
    }
  }
  if (auto v = check_ivd(rule, zero, first); !v.pass) return CertificateBreach{"y2 = x2", std::move(v)};
  if (auto v = check_ivd(rule, zero, second); !v.pass) return CertificateBreach{"z1 = x1", std::move(v)};
  if (auto v = check_opd(rule, first, cert.tau); !v.pass) return CertificateBreach{"y2 <= tau*y1", std::move(v)};
  if (auto v = check_opd(rule, second, cert.tau); !v.pass) return CertificateBreach{"z1 <= tau*z2", std::move(v)};
  return std::nullopt;
}

}  // namespace mpass
