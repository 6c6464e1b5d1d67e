#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mpass/axioms.hpp"
#include "mpass/enumerate.hpp"
#include "mpass/problem.hpp"
#include "mpass/rational.hpp"
#include "mpass/rules.hpp"

namespace mpass {

// ---------------------------------------------------------------------------
// Shapley value of the induced TU-game
// ---------------------------------------------------------------------------

/// Largest museum count tu_shapley_oracle accepts.
inline constexpr std::size_t max_oracle_museums = 12;

/// Shapley value of the game v(S) = π·|{a : a visited some museum in S}|,
/// computed by the subset formula with exact factorial weights. Null holders
/// contribute nothing to v, so on the enlarged domain the result sums to
/// less than n·π. Throws InputError when m > max_oracle_museums.
Allocation tu_shapley_oracle(const Problem& p);

// ---------------------------------------------------------------------------
// Single-holder tables
// ---------------------------------------------------------------------------

/// Museums and price shared by every single-holder problem of a table.
struct Frame {
  std::vector<Label> museums;
  Rational price;

  /// Museums {1..m}.
  static Frame of(std::size_t m, Rational price);
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// A single holder's visit row, in frame museum order.
using Pattern = VisitRow;

/// Every pattern over m museums in lexicographic order; the reduced domain
/// omits the all-zero pattern.
std::vector<Pattern> all_patterns(std::size_t m, Domain domain);
std::string pattern_to_string(const Frame& frame, const Pattern& pattern);

Problem single_holder_problem(const Frame& frame, const Pattern& pattern, Label holder = 1);

/// A rule given by its single-holder allocations; extended to arbitrary
/// problems by revenue additivity.
struct AdditiveRuleTable {
  Frame frame;
  std::map<Pattern, Allocation> entries;

  /// Σ_a entries[row a], for a problem over this frame whose rows are all
  /// tabulated. Throws InputError otherwise.
  Allocation evaluate(const Problem& p) const;
  friend bool operator==(const AdditiveRuleTable&, const AdditiveRuleTable&) = default;
};

/// Tabulates a rule on every single-holder problem of the frame.
AdditiveRuleTable table_of(const Rule& rule, const Frame& frame, Domain domain, Label holder = 1);

// ---------------------------------------------------------------------------
// β decomposition
// ---------------------------------------------------------------------------

struct PatternCoefficient {
  Pattern pattern;
  std::optional<Rational> unvisited_share;  // x; absent when every museum was visited
  std::optional<Rational> visited_share;    // y; absent for the empty pattern
  Rational alpha;                           // x / y
  Rational beta;
  bool in_unit_interval = true;             // x <= y
};

struct BetaDecomposition {
  Base base = Base::Shapley;
  std::vector<PatternCoefficient> coefficients;

  bool all_in_unit_interval() const;
  const PatternCoefficient& at(const Pattern& pattern) const;
};

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& what, Pattern pattern)
      : std::runtime_error(what), pattern_(std::move(pattern)) {}
  const Pattern& pattern() const { return pattern_; }

 private:
  Pattern pattern_;
};

/// Writes every entry as β·uniform + (1−β)·base. Requires each entry to be
/// constant on visited and on unvisited museums. Throws DecompositionError
/// for a non-ETE entry, for a visited share of 0 next to a positive unvisited
/// share (an OPD violation with no finite β), and for the empty pattern with
/// base Shapley. The reconstruction identity is verified exactly.
BetaDecomposition decompose(const AdditiveRuleTable& table, Base base);

/// The table Σ-extended from a BetaProfile for one holder label.
AdditiveRuleTable table_from_profile(const BetaProfile& profile, Base base, const Frame& frame, Domain domain,
                                     Label holder = 1);

// ---------------------------------------------------------------------------
// Synthesis from axioms
// ---------------------------------------------------------------------------

/// Admissible range of the unvisited share x for one pattern. Patterns tied
/// by independence of visits distribution share a tie class and must take
/// the same x.
struct PatternConstraint {
  Pattern pattern;
  Rational lower;
  Rational upper;
  std::size_t tie_class = 0;
};

struct UniqueTable {
  AdditiveRuleTable table;
};

struct Family {
  Frame frame;
  Domain domain = Domain::Reduced;
  /// One per pattern with at least one unvisited museum.
  std::vector<PatternConstraint> constraints;
  std::size_t tie_classes = 0;

  /// Picks x = lower + t·(upper − lower) in each tie class (t in [0,1],
  /// one per class) and returns the resulting table.
  AdditiveRuleTable instantiate(const std::vector<Rational>& position) const;
  AdditiveRuleTable at(const Rational& t) const;
};

struct Infeasible {
  /// Patterns whose constraints cannot be met together; the empty pattern,
  /// when involved, comes first.
  std::vector<Pattern> patterns;
  std::string reason;
};

using SynthesisResult = std::variant<UniqueTable, Family, Infeasible>;

/// Solves the conditions the axioms place on single-holder allocations,
/// assuming revenue additivity. For each pattern with e visited museums the
/// holder's π splits as x on each unvisited and y on each visited museum,
/// (m−e)·x + e·y = π. Supported axioms: ETE (required), Dummy, OPD, TauOPD,
/// IVD, and RevenueAdditivity (implicit). Throws InputError otherwise.
SynthesisResult synthesize(const std::vector<AxiomId>& axioms, const Frame& frame, Domain domain);

// ---------------------------------------------------------------------------
// Scalar convex combinations under τ-OPD
// ---------------------------------------------------------------------------

/// τ / (n + τ(1−n)): the largest β for which β·uniform + (1−β)·Shapley
/// satisfies τ-OPD on every reduced problem with n holders.
Rational tau_beta_bound(const Rational& tau, std::size_t n);

/// Largest β admissible on reduced problems with n holders and exactly m
/// museums when some museum is a dummy: mτ / ((m−1)·n·(1−τ) + mτ). The
/// binding problem has one holder visiting every museum but the dummy, the
/// others avoiding one of those museums (so m >= 3 unless n = 1). Decreases
/// to tau_beta_bound as m grows. Requires m >= 2.
Rational frame_beta_bound(const Rational& tau, std::size_t n, std::size_t m);

struct BoundWitness {
  Problem problem;
  AxiomVerdict verdict;  // the failing τ-OPD check
};

/// For β above tau_beta_bound(τ, n): the extremal reduced problem with n
/// holders and the smallest museum count m' >= m (at least 3 when n >= 2)
/// whose frame bound lies below β, with the τ-OPD violation of
/// scalar_convex(β, Shapley) on it. For β at or below the bound: exhaustive
/// τ-OPD audit over reduced problems with at most m museums and n holders;
/// returns nullopt unless that audit fails.
std::optional<BoundWitness> bound_witness(const Rational& tau, std::size_t n, std::size_t m, const Rational& beta);

// ---------------------------------------------------------------------------
// τ-OPD and IVD on the enlarged domain
// ---------------------------------------------------------------------------

struct InfeasibilityCertificate {
  Rational tau;
  /// Museums {1,2}, holders {1,2}, π = 1/2: the all-zero matrix, both holders
  /// visiting museum 1, both visiting museum 2. Allocations (x1,x2), (y1,y2), (z1,z2).
  std::array<Problem, 3> problems;
  std::vector<std::string> equalities;
  std::vector<std::string> inequalities;
  /// τ/(1+τ), the cap τ-OPD and IVD place on each of x1, x2.
  Rational share_cap;
  /// 1 − 2τ/(1+τ) = (1−τ)/(1+τ): how far x1 + x2 falls short of n·π = 1.
  Rational gap;
};

/// The certificate for τ < 1, nullopt for τ = 1. Throws InputError for τ
/// outside [0,1].
std::optional<InfeasibilityCertificate> impossibility_certificate(const Rational& tau);

/// Which certificate condition a concrete rule breaks: the revenue total on
/// one of the problems, one of the two IVD equalities, or one of the two
/// τ-OPD inequalities (checked in that order). The certificate asserts that
/// every rule breaks at least one, so nullopt would refute it.
struct CertificateBreach {
  std::string condition;
  std::optional<AxiomVerdict> verdict;  // set for IVD / τ-OPD breaches
};
std::optional<CertificateBreach> certificate_breach(const InfeasibilityCertificate& cert, const Rule& rule);

}  // namespace mpass
