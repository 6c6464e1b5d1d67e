#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpass/enumerate.hpp"
#include "mpass/problem.hpp"
#include "mpass/rational.hpp"
#include "mpass/rules.hpp"

namespace mpass {

enum class AxiomKind { ETE, RevenueAdditivity, Dummy, OPD, TauOPD, HolderAnonymity, IVD, IEV };

struct AxiomId {
  AxiomKind kind = AxiomKind::ETE;
  /// Only meaningful for TauOPD; must lie in [0,1].
  Rational tau{1};

  static AxiomId tau_opd(Rational tau) { return {AxiomKind::TauOPD, std::move(tau)}; }
  friend bool operator==(const AxiomId&, const AxiomId&) = default;
};

/// "ete", "additivity", "dummy", "opd", "tau-opd:<tau>", "anonymity", "ivd", "iev".
AxiomId parse_axiom(std::string_view text);
std::string to_string(const AxiomId& axiom);
/// True for axioms quantified over pairs of problems.
bool is_pair_axiom(AxiomKind kind);

/// Evidence of a violation: the problem(s) involved and both sides of the
/// relation that should have held.
///
///   ETE        problems {p}; museums {i, j}; lhs R_i, rhs R_j; "=="
///   Additivity problems {p, q, stack(p,q)}; museums {i}; lhs R_i(stack), rhs R_i(p)+R_i(q); "=="
///   Dummy      problems {p}; museums {i}; lhs R_i, rhs 0; "=="
///   (τ-)OPD    problems {p}; museums {i dummy, j non-dummy}; lhs R_i, rhs τ·R_j; "<="
///   Anonymity  problems {p, σ(p)}; museums {i}; lhs R_i(σ(p)), rhs R_i(p); "=="; permutation = σ
///   IVD        problems {p, q}; museums {i}; lhs R_i(p), rhs R_i(q); "=="
///   IEV        problems {p, p+newcomer}; museums {i}; lhs R_i(p+newcomer), rhs R_i(p); "=="
struct Witness {
  std::vector<Problem> problems;
  std::vector<Label> museums;
  Rational lhs;
  Rational rhs;
  std::string relation;
  std::vector<Label> permutation;
};

struct AxiomVerdict {
  bool pass = true;
  std::optional<Witness> witness;
  std::size_t instances_checked = 1;
  AxiomId axiom;
  std::string rule;
};

AxiomVerdict check_ete(const Rule& rule, const Problem& p);
/// Throws InputError when p and q cannot be stacked.
AxiomVerdict check_additivity(const Rule& rule, const Problem& p, const Problem& q);
AxiomVerdict check_dummy(const Rule& rule, const Problem& p);
/// τ-order preservation with dummies; τ = 1 is plain OPD. Throws InputError for τ outside [0,1].
AxiomVerdict check_opd(const Rule& rule, const Problem& p, const Rational& tau = Rational(1));
/// `image[k]` is the new label of holder p.holders()[k].
AxiomVerdict check_anonymity(const Rule& rule, const Problem& p, const std::vector<Label>& image);
/// Throws InputError unless p and q share museums, holders and price and differ in the matrix.
AxiomVerdict check_ivd(const Rule& rule, const Problem& p, const Problem& q);
/// Adds a holder labelled max(holders)+1 with the given visits. Throws
/// InputError when the row length differs from the museum count.
AxiomVerdict check_iev(const Rule& rule, const Problem& p, const VisitRow& newcomer_row);

/// Dispatches a single-problem axiom (ETE, Dummy, OPD, TauOPD).
AxiomVerdict check_single(const Rule& rule, const AxiomId& axiom, const Problem& p);

/// Re-evaluates the rule on the witness problems and confirms that the
/// recorded values are what the rule produces and that they violate the
/// axiom's defining relation. Independent of the check_* code paths.
bool witness_reproduces(const Rule& rule, const AxiomId& axiom, const Witness& w);

/// Number of cases audit() would visit for this axiom and configuration.
std::size_t audit_case_count(const AxiomId& axiom, const EnumerationConfig& cfg);

/// Exhaustive check of the axiom over every instance (or pair, permutation,
/// newcomer row) the configuration generates. Returns the first failure in
/// enumeration order, or Pass with the number of cases visited. Throws
/// BudgetError when the case count exceeds cfg.budget and DomainError when
/// the rule is undefined on an enumerated problem. Parallel over cases.
AxiomVerdict audit(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg);
/// Serial reference for audit(); identical results.
AxiomVerdict audit_serial(const Rule& rule, const AxiomId& axiom, const EnumerationConfig& cfg);

}  // namespace mpass
