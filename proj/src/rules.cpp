#include "mpass/rules.hpp"

#include <algorithm>

#include "mpass/errors.hpp"

namespace mpass {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Rational as_rational(std::size_t k) { return Rational(static_cast<long>(k)); }

Allocation equal_split(std::size_t m, const Rational& amount) {
  return Allocation{std::vector<Rational>(m, amount / as_rational(m))};
}

std::int64_t row_sum(std::span<const std::uint8_t> row) {
  std::int64_t s = 0;
  for (auto b : row) s += b;
  return s;
}

/// Adds one visiting holder's pass split equally over the museums they visited.
void add_visited_split(Allocation& out, std::span<const std::uint8_t> row, std::int64_t visits,
                       const Rational& price) {
  const Rational share = price / Rational(static_cast<long>(visits));
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i]) out[i] += share;
  }
}

void require_reduced(const Problem& p, const char* rule_name) {
  if (!is_reduced(p)) {
    throw DomainError(std::string(rule_name) +
                      " is only defined on the reduced domain (every holder must visit a museum)");
  }
}

Allocation base_rule(const Problem& p, Base base) {
  return base == Base::Shapley ? shapley(p) : equal_attribution(p);
}

void require_unit(const Rational& r, const char* what) {
  if (!in_unit_interval(r)) throw InputError(std::string(what) + " must lie in [0,1], got " + r.to_string());
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Label parse_label(const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw InputError("bad label '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad label '" + s + "'");
  }
}

std::string set_to_string(const MuseumSet& s) {
  if (s.empty()) return "none";
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += '+';
    out += std::to_string(s[k]);
  }
  return out;
}

MuseumSet parse_set(const std::string& s) {
  if (s == "none") return {};
  MuseumSet out;
  for (const auto& part : split(s, '+')) out.push_back(parse_label(part));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

MuseumSet visited_set(const Problem& p, std::size_t holder_index) {
  MuseumSet out;
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    if (p.visited(holder_index, i)) out.push_back(p.museums()[i]);
  }
  return out;
}

BetaProfile BetaProfile::constant(Rational beta) {
  BetaProfile b;
  b.fallback = std::move(beta);
  return b;
}

const Rational& BetaProfile::coefficient(Label holder, const MuseumSet& visited) const {
  if (auto it = overrides.find({holder, visited}); it != overrides.end()) return it->second;
  if (auto it = by_pattern.find(visited); it != by_pattern.end()) return it->second;
  if (auto it = by_holder.find(holder); it != by_holder.end()) return it->second;
  return fallback;
}

void BetaProfile::validate() const {
  require_unit(fallback, "beta coefficient");
  for (const auto& [k, v] : by_holder) require_unit(v, "beta coefficient");
  for (const auto& [k, v] : by_pattern) require_unit(v, "beta coefficient");
  for (const auto& [k, v] : overrides) require_unit(v, "beta coefficient");
}

Allocation uniform(const Problem& p) { return equal_split(p.museum_count(), p.revenue()); }

Allocation proportional(const Problem& p) {
  const auto counts = visit_counts(p);
  std::int64_t total_visits = 0;
  for (auto e : counts.per_museum) total_visits += e;
  if (total_visits == 0) return uniform(p);
  Allocation out = Allocation::zeros(p.museum_count());
  const Rational revenue = p.revenue();
  for (std::size_t i = 0; i < p.museum_count(); ++i) {
    out[i] = Rational(counts.per_museum[i], total_visits) * revenue;
  }
  return out;
}

Allocation shapley(const Problem& p) {
  require_reduced(p, "the Shapley rule");
  Allocation out = Allocation::zeros(p.museum_count());
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    add_visited_split(out, p.row(a), row_sum(p.row(a)), p.price());
  }
  return out;
}

Allocation equal_attribution(const Problem& p) {
  const auto m = p.museum_count();
  Allocation out = Allocation::zeros(m);
  const Rational null_share = p.price() / as_rational(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const auto visits = row_sum(p.row(a));
    if (visits > 0) {
      add_visited_split(out, p.row(a), visits, p.price());
    } else {
      for (auto& s : out.shares) s += null_share;
    }
  }
  return out;
}

Allocation conditional_equal_attribution(const Problem& p) {
  if (is_zero_matrix(p)) return uniform(p);
  const auto counts = visit_counts(p);
  const auto m = p.museum_count();
  const auto non_dummy = static_cast<long>(std::count_if(counts.per_museum.begin(), counts.per_museum.end(),
                                                         [](auto e) { return e > 0; }));
  const Rational null_share = p.price() / Rational(non_dummy);
  Allocation out = Allocation::zeros(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const auto visits = row_sum(p.row(a));
    if (visits > 0) {
      add_visited_split(out, p.row(a), visits, p.price());
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        if (counts.per_museum[i] > 0) out[i] += null_share;
      }
    }
  }
  return out;
}

Allocation proportional_attribution(const Problem& p) {
  if (is_zero_matrix(p)) return uniform(p);
  const auto counts = visit_counts(p);
  const auto m = p.museum_count();
  std::int64_t total_visits = 0;
  for (auto e : counts.per_museum) total_visits += e;
  Allocation out = Allocation::zeros(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const auto visits = row_sum(p.row(a));
    if (visits > 0) {
      add_visited_split(out, p.row(a), visits, p.price());
    } else {
      for (std::size_t i = 0; i < m; ++i) out[i] += Rational(counts.per_museum[i], total_visits) * p.price();
    }
  }
  return out;
}

Allocation beta_family(const Problem& p, const BetaProfile& profile, Base base) {
  profile.validate();
  if (base == Base::Shapley) require_reduced(p, "a Shapley-based family rule");
  Allocation out = Allocation::zeros(p.museum_count());
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    const Label holder = p.holders()[a];
    const Problem single = restrict_to_holder(p, holder);
    const Rational& beta = profile.coefficient(holder, visited_set(p, a));
    out += beta * uniform(single);
    out += (Rational(1) - beta) * base_rule(single, base);
  }
  return out;
}

Allocation scalar_convex(const Problem& p, const Rational& beta, Base base) {
  require_unit(beta, "convex weight beta");
  return beta * uniform(p) + (Rational(1) - beta) * base_rule(p, base);
}

Allocation r1(const Problem& p) {
  const auto m = p.museum_count();
  Allocation out = Allocation::zeros(m);
  const Rational null_share = p.price() / as_rational(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto row = p.row(a);
    auto first = std::find(row.begin(), row.end(), std::uint8_t{1});
    if (first != row.end()) {
      out[static_cast<std::size_t>(first - row.begin())] += p.price();
    } else {
      for (auto& s : out.shares) s += null_share;
    }
  }
  return out;
}

Allocation r2(const Problem& p) {
  const auto m = p.museum_count();
  Allocation out = Allocation::zeros(m);
  const Rational even_share = p.price() / as_rational(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto row = p.row(a);
    const auto visits = static_cast<std::size_t>(row_sum(row));
    if (visits == 0 || visits == m) {
      for (auto& s : out.shares) s += even_share;
      continue;
    }
    const Rational share = p.price() / as_rational(m - visits);
    for (std::size_t i = 0; i < m; ++i) {
      if (!row[i]) out[i] += share;
    }
  }
  return out;
}

Allocation r5(const Problem& p) {
  Allocation out = Allocation::zeros(p.museum_count());
  out[0] = p.revenue();
  return out;
}

Allocation r_epsilon(const Problem& p, const Rational& epsilon) {
  const auto m = p.museum_count();
  if (epsilon.sign() <= 0) throw InputError("epsilon must be positive, got " + epsilon.to_string());
  if (m > 1 && epsilon >= Rational(1) / as_rational(m - 1)) {
    throw InputError("epsilon must be below 1/(m-1) = " + (Rational(1) / as_rational(m - 1)).to_string() +
                     ", got " + epsilon.to_string());
  }
  require_reduced(p, "the R-epsilon rule");
  const Rational m_r = as_rational(m);
  const Rational lifted = Rational(1) + epsilon;
  const Rational outside = lifted / m_r * p.price();
  Allocation out = Allocation::zeros(m);
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    auto row = p.row(a);
    const auto visits = row_sum(row);
    const Rational e = Rational(static_cast<long>(visits));
    const Rational inside = (m_r - (m_r - e) * lifted) / (m_r * e) * p.price();
    for (std::size_t i = 0; i < m; ++i) out[i] += row[i] ? inside : outside;
  }
  return out;
}

Allocation r3(const Problem& p, const std::map<Label, Rational>& constants, Base base) {
  BetaProfile profile;
  profile.by_holder = constants;
  return beta_family(p, profile, base);
}

Allocation r4(const Problem& p, const std::map<MuseumSet, Rational>& mapping, const Rational& fallback, Base base) {
  BetaProfile profile;
  profile.fallback = fallback;
  profile.by_pattern = mapping;
  return beta_family(p, profile, base);
}

Allocation allocate(const RuleId& id, const Problem& p) {
  return std::visit(
      overloaded{
          [&](const rule::Uniform&) { return uniform(p); },
          [&](const rule::Proportional&) { return proportional(p); },
          [&](const rule::Shapley&) { return shapley(p); },
          [&](const rule::EqualAttribution&) { return equal_attribution(p); },
          [&](const rule::ConditionalEqualAttribution&) { return conditional_equal_attribution(p); },
          [&](const rule::ProportionalAttribution&) { return proportional_attribution(p); },
          [&](const rule::BetaFamily& r) { return beta_family(p, r.profile, r.base); },
          [&](const rule::ScalarConvex& r) { return scalar_convex(p, r.beta, r.base); },
          [&](const rule::R1&) { return r1(p); },
          [&](const rule::R2&) { return r2(p); },
          [&](const rule::R5&) { return r5(p); },
          [&](const rule::REpsilon& r) { return r_epsilon(p, r.epsilon); },
          [&](const rule::R3& r) { return r3(p, r.constants, r.base); },
          [&](const rule::R4& r) { return r4(p, r.mapping, r.fallback, r.base); },
      },
      id);
}

std::string to_string(Base base) { return base == Base::Shapley ? "sh" : "ea"; }

std::string to_string(const RuleId& id) {
  return std::visit(
      overloaded{
          [](const rule::Uniform&) -> std::string { return "uniform"; },
          [](const rule::Proportional&) -> std::string { return "proportional"; },
          [](const rule::Shapley&) -> std::string { return "shapley"; },
          [](const rule::EqualAttribution&) -> std::string { return "ea"; },
          [](const rule::ConditionalEqualAttribution&) -> std::string { return "cea"; },
          [](const rule::ProportionalAttribution&) -> std::string { return "pa"; },
          [](const rule::BetaFamily& r) -> std::string {
            std::string s = "beta:" + r.profile.fallback.to_string();
            const auto extra = r.profile.by_holder.size() + r.profile.by_pattern.size() + r.profile.overrides.size();
            if (extra) s += "+" + std::to_string(extra) + "overrides";
            return s + ":" + to_string(r.base);
          },
          [](const rule::ScalarConvex& r) -> std::string {
            return "convex:" + r.beta.to_string() + ":" + to_string(r.base);
          },
          [](const rule::R1&) -> std::string { return "r1"; },
          [](const rule::R2&) -> std::string { return "r2"; },
          [](const rule::R5&) -> std::string { return "r5"; },
          [](const rule::REpsilon& r) -> std::string { return "reps:" + r.epsilon.to_string(); },
          [](const rule::R3& r) -> std::string {
            std::string s = "r3:";
            Label next = 1;
            bool first = true;
            for (const auto& [holder, beta] : r.constants) {
              for (; next < holder; ++next) {
                s += first ? "0" : ",0";
                first = false;
              }
              s += (first ? "" : ",") + beta.to_string();
              first = false;
              next = holder + 1;
            }
            return s + ":" + to_string(r.base);
          },
          [](const rule::R4& r) -> std::string {
            std::string s = "r4:" + r.fallback.to_string();
            for (const auto& [set, beta] : r.mapping) s += ";" + set_to_string(set) + "=" + beta.to_string();
            return s + ":" + to_string(r.base);
          },
      },
      id);
}

Base parse_base(std::string_view text) {
  if (text == "sh" || text == "shapley") return Base::Shapley;
  if (text == "ea" || text == "equal-attribution") return Base::EqualAttribution;
  throw InputError("unknown base rule '" + std::string(text) + "' (expected sh or ea)");
}

RuleId parse_rule(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string& head = parts[0];
  auto expect_parts = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw InputError("malformed rule string '" + std::string(text) + "'");
  };

  const std::map<std::string_view, RuleId> plain{
      {"uniform", rule::Uniform{}},       {"proportional", rule::Proportional{}},
      {"shapley", rule::Shapley{}},       {"ea", rule::EqualAttribution{}},
      {"cea", rule::ConditionalEqualAttribution{}}, {"pa", rule::ProportionalAttribution{}},
      {"r1", rule::R1{}},                 {"r2", rule::R2{}},
      {"r5", rule::R5{}},
  };
  if (auto it = plain.find(head); it != plain.end()) {
    expect_parts(1, 1);
    return it->second;
  }
  if (head == "convex") {
    expect_parts(2, 3);
    rule::ScalarConvex r{Rational::parse(parts[1]), parts.size() == 3 ? parse_base(parts[2]) : Base::Shapley};
    require_unit(r.beta, "convex weight beta");
    return r;
  }
  if (head == "beta") {
    expect_parts(2, 3);
    rule::BetaFamily r{BetaProfile::constant(Rational::parse(parts[1])),
                       parts.size() == 3 ? parse_base(parts[2]) : Base::Shapley};
    r.profile.validate();
    return r;
  }
  if (head == "reps") {
    expect_parts(2, 2);
    rule::REpsilon r{Rational::parse(parts[1])};
    if (r.epsilon.sign() <= 0) throw InputError("epsilon must be positive");
    return r;
  }
  if (head == "r3") {
    expect_parts(2, 3);
    rule::R3 r;
    Label holder = 1;
    for (const auto& b : split(parts[1], ',')) r.constants[holder++] = Rational::parse(b);
    if (parts.size() == 3) r.base = parse_base(parts[2]);
    for (const auto& [k, v] : r.constants) require_unit(v, "beta coefficient");
    return r;
  }
  if (head == "r4") {
    expect_parts(2, 3);
    rule::R4 r;
    const auto entries = split(parts[1], ';');
    r.fallback = Rational::parse(entries[0]);
    for (std::size_t k = 1; k < entries.size(); ++k) {
      const auto eq = entries[k].find('=');
      if (eq == std::string::npos) throw InputError("r4 entry '" + entries[k] + "' needs <set>=<beta>");
      r.mapping[parse_set(entries[k].substr(0, eq))] = Rational::parse(entries[k].substr(eq + 1));
    }
    if (parts.size() == 3) r.base = parse_base(parts[2]);
    require_unit(r.fallback, "beta coefficient");
    for (const auto& [k, v] : r.mapping) require_unit(v, "beta coefficient");
    return r;
  }
  throw InputError("unknown rule '" + std::string(text) + "'");
}

Rule::Rule(RuleId id) : name_(to_string(id)), fn_([id = std::move(id)](const Problem& p) { return allocate(id, p); }) {}

}  // namespace mpass
