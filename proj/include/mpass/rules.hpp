#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mpass/problem.hpp"
#include "mpass/rational.hpp"

namespace mpass {

/// Sorted set of museum labels, e.g. the museums a holder visited.
using MuseumSet = std::vector<Label>;

MuseumSet visited_set(const Problem& p, std::size_t holder_index);

/// The rule each pass is split by in the convex families.
enum class Base { Shapley, EqualAttribution };

/// Coefficients β_a(M_a) ∈ [0,1], looked up by holder label and visited set.
/// Lookup order: exact (holder, set) override, then per-set, then per-holder,
/// then the fallback.
struct BetaProfile {
  Rational fallback;
  std::map<Label, Rational> by_holder;
  std::map<MuseumSet, Rational> by_pattern;
  std::map<std::pair<Label, MuseumSet>, Rational> overrides;

  static BetaProfile constant(Rational beta);

  const Rational& coefficient(Label holder, const MuseumSet& visited) const;
  /// Throws InputError unless every stored coefficient lies in [0,1].
  void validate() const;
};

namespace rule {
struct Uniform {};
struct Proportional {};
struct Shapley {};
struct EqualAttribution {};
struct ConditionalEqualAttribution {};
struct ProportionalAttribution {};
struct BetaFamily {
  BetaProfile profile;
  Base base = Base::Shapley;
};
struct ScalarConvex {
  Rational beta;
  Base base = Base::Shapley;
};
/// Each pass goes to the lowest-labelled museum its holder visited.
struct R1 {};
/// Each pass is split over the museums its holder did not visit.
struct R2 {};
/// Every pass goes to the lowest-labelled museum.
struct R5 {};
struct REpsilon {
  Rational epsilon;
};
/// Per-holder constant coefficients (holders not listed get 0).
struct R3 {
  std::map<Label, Rational> constants;
  Base base = Base::Shapley;
};
/// Coefficients depending only on the visited set.
struct R4 {
  std::map<MuseumSet, Rational> mapping;
  Rational fallback;
  Base base = Base::Shapley;
};
}  // namespace rule

using RuleId = std::variant<rule::Uniform, rule::Proportional, rule::Shapley, rule::EqualAttribution,
                            rule::ConditionalEqualAttribution, rule::ProportionalAttribution, rule::BetaFamily,
                            rule::ScalarConvex, rule::R1, rule::R2, rule::R5, rule::REpsilon, rule::R3, rule::R4>;

Allocation uniform(const Problem& p);
Allocation proportional(const Problem& p);
/// Throws DomainError when some holder is null.
Allocation shapley(const Problem& p);
Allocation equal_attribution(const Problem& p);
Allocation conditional_equal_attribution(const Problem& p);
Allocation proportional_attribution(const Problem& p);

/// Σ_a [β_a(M_a)·uniform(single a) + (1−β_a(M_a))·base(single a)], evaluated
/// holder by holder on restrict_to_holder(p, a).
Allocation beta_family(const Problem& p, const BetaProfile& profile, Base base);
/// β·uniform(p) + (1−β)·base(p). Throws InputError for β outside [0,1].
Allocation scalar_convex(const Problem& p, const Rational& beta, Base base);

Allocation r1(const Problem& p);
Allocation r2(const Problem& p);
Allocation r5(const Problem& p);
/// Requires 0 < ε and, for m > 1, ε < 1/(m−1); defined on the reduced domain only.
Allocation r_epsilon(const Problem& p, const Rational& epsilon);
Allocation r3(const Problem& p, const std::map<Label, Rational>& constants, Base base);
Allocation r4(const Problem& p, const std::map<MuseumSet, Rational>& mapping, const Rational& fallback, Base base);

Allocation allocate(const RuleId& id, const Problem& p);

/// Canonical rule string ("uniform", "convex:1/3:sh", "reps:1/4", ...).
std::string to_string(const RuleId& id);
std::string to_string(Base base);

/// Parses a rule selection string. Accepts the names produced by to_string,
/// including "r3:<b1>,<b2>,...[:base]" (β for holders 1,2,...) and
/// "r4:<fallback>[;<m1>+<m2>=<beta>]...". Throws InputError.
RuleId parse_rule(std::string_view text);
Base parse_base(std::string_view text);

/// A rule as the axiom checkers see it: a name and a map from problems to
/// allocations. Wraps catalog rules or arbitrary callables.
class Rule {
 public:
  using Fn = std::function<Allocation(const Problem&)>;

  Rule(RuleId id);  // NOLINT: implicit so catalog rules can be passed directly
  Rule(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  Allocation operator()(const Problem& p) const { return fn_(p); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

}  // namespace mpass
