#include <random>

#include <doctest.h>

#include "mpass/errors.hpp"
#include "mpass/theorem_lab.hpp"
#include "oracles.hpp"

using namespace mpass;
using oracle::q;
using oracle::shares_of;

namespace {

EnumerationConfig reduced(std::size_t m_max, std::size_t n_max) {
  EnumerationConfig cfg;
  cfg.m_max = m_max;
  cfg.n_max = n_max;
  return cfg;
}

const Rational kTauGrid[] = {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};

}  // namespace

TEST_SUITE("theorem_lab") {
  TEST_CASE("tu oracle on small cases") {
    CHECK(shares_of(tu_shapley_oracle(oracle::example_one_reduced())) == q({"3/2", "5/2", "0"}));
    CHECK(shares_of(tu_shapley_oracle(Problem({1, 2, 3, 4}, {1}, Rational(1), {{1, 1, 1, 1}}))) ==
          q({"1/4", "1/4", "1/4", "1/4"}));
    // a null holder adds nothing to v
    CHECK(tu_shapley_oracle(oracle::example_one()).total() == Rational(4));
    std::vector<Label> many(13);
    std::iota(many.begin(), many.end(), 1);
    CHECK_THROWS_AS(tu_shapley_oracle(Problem(many, {1}, Rational(1), {VisitRow(13, 1)})), InputError);
  }

  TEST_CASE("subset formula agrees with the permutation average") {
    for (const auto& p : enumerate_problems(reduced(4, 2))) {
      CHECK(shares_of(tu_shapley_oracle(p)) == oracle::permutation_shapley(p));
    }
    std::mt19937_64 rng(17);
    for (int k = 0; k < 30; ++k) {
      const Problem p = oracle::random_problem(rng, 6, 5, Rational(3, 7), false);
      CHECK(shares_of(tu_shapley_oracle(p)) == oracle::permutation_shapley(p));
    }
  }

  TEST_CASE("patterns and tables") {
    CHECK(all_patterns(2, Domain::Enlarged) == std::vector<Pattern>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(all_patterns(2, Domain::Reduced).size() == 3);
    const Frame f = Frame::of(3, Rational(1));
    CHECK(pattern_to_string(f, {1, 0, 1}) == "{1,3}");
    CHECK(pattern_to_string(f, {0, 0, 0}) == "{}");

    const auto t = table_of(Rule(rule::Shapley{}), f, Domain::Reduced);
    CHECK(t.entries.size() == 7);
    for (const auto& p : enumerate_problems(reduced(3, 3))) {
      if (p.museum_count() != 3 || p.price() != Rational(1)) continue;
      CHECK(t.evaluate(p) == shapley(p));
    }
    CHECK_THROWS_AS(t.evaluate(Problem({1, 2, 3}, {1}, Rational(2), {{1, 0, 0}})), InputError);
    CHECK_THROWS_AS(t.evaluate(Problem({1, 2, 3}, {1}, Rational(1), {{0, 0, 0}})), InputError);
  }

  TEST_CASE("decompose endpoints and a hand-solved entry") {
    const Frame f = Frame::of(3, Rational(1));
    for (const auto& c : decompose(table_of(Rule(rule::Shapley{}), f, Domain::Reduced), Base::Shapley).coefficients) {
      const bool full = std::count(c.pattern.begin(), c.pattern.end(), 1) == 3;
      CHECK(c.beta == (full ? Rational(1) : Rational(0)));
    }
    for (const auto& c : decompose(table_of(Rule(rule::Uniform{}), f, Domain::Enlarged), Base::EqualAttribution)
                             .coefficients) {
      CHECK(c.beta == Rational(1));
      CHECK(c.in_unit_interval);
    }

    AdditiveRuleTable t = table_of(Rule(rule::Shapley{}), f, Domain::Reduced);
    t.entries[{1, 0, 0}] = Allocation{{Rational(3, 5), Rational(1, 5), Rational(1, 5)}};
    const auto d = decompose(t, Base::Shapley);
    const auto& c = d.at({1, 0, 0});
    CHECK(c.alpha == Rational(1, 3));
    CHECK(c.beta == Rational(3, 5));
    CHECK(*c.unvisited_share == Rational(1, 5));
    CHECK(*c.visited_share == Rational(3, 5));
  }

  TEST_CASE("decompose rejects tables it cannot express") {
    const Frame f = Frame::of(2, Rational(1));
    CHECK_THROWS_AS(decompose(table_of(Rule(rule::R1{}), f, Domain::Reduced), Base::Shapley), DecompositionError);
    CHECK_THROWS_AS(decompose(table_of(Rule(rule::R2{}), f, Domain::Reduced), Base::Shapley), DecompositionError);
    CHECK_THROWS_AS(decompose(table_of(Rule(rule::Uniform{}), f, Domain::Enlarged), Base::Shapley),
                    DecompositionError);
    AdditiveRuleTable bad = table_of(Rule(rule::Uniform{}), f, Domain::Reduced);
    bad.entries[{1, 0}] = Allocation{{Rational(1), Rational(1)}};
    CHECK_THROWS_AS(decompose(bad, Base::Shapley), DecompositionError);
    try {
      decompose(table_of(Rule(rule::R2{}), f, Domain::Reduced), Base::Shapley);
    } catch (const DecompositionError& e) {
      CHECK(e.pattern() == Pattern{0, 1});
    }
  }

  TEST_CASE("x above y is flagged and the single-holder problem fails opd") {
    const Frame f = Frame::of(3, Rational(1));
    const Rule reps(rule::REpsilon{Rational(1, 4)});
    const auto d = decompose(table_of(reps, f, Domain::Reduced), Base::Shapley);
    for (const auto& c : d.coefficients) {
      const bool opd = check_opd(reps, single_holder_problem(f, c.pattern)).pass;
      CHECK(c.in_unit_interval == opd);
    }
    CHECK_FALSE(d.all_in_unit_interval());
  }

  TEST_CASE("profile tables decompose back to their coefficients") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 20; ++k) {
      for (Base base : {Base::Shapley, Base::EqualAttribution}) {
        const std::size_t m = 2 + static_cast<std::size_t>(k % 3);
        const Domain domain = base == Base::Shapley ? Domain::Reduced : Domain::Enlarged;
        const Frame f = Frame::of(m, Rational(1, 2));
        BetaProfile prof = BetaProfile::constant(oracle::random_unit(rng));
        for (const auto& pat : all_patterns(m, domain)) {
          MuseumSet s;
          for (std::size_t i = 0; i < m; ++i) {
            if (pat[i]) s.push_back(static_cast<Label>(i + 1));
          }
          prof.by_pattern[s] = oracle::random_unit(rng);
        }
        const auto d = decompose(table_from_profile(prof, base, f, domain), base);
        CHECK(d.all_in_unit_interval());
        for (const auto& c : d.coefficients) {
          const auto e = std::count(c.pattern.begin(), c.pattern.end(), 1);
          MuseumSet s;
          for (std::size_t i = 0; i < m; ++i) {
            if (c.pattern[i]) s.push_back(static_cast<Label>(i + 1));
          }
          // full and empty patterns are uniform whatever β is.
          if (e > 0 && static_cast<std::size_t>(e) < m) CHECK(c.beta == prof.coefficient(1, s));
        }
      }
    }
  }

  TEST_CASE("synthesis of the characterized rules") {
    for (std::size_t m : {2U, 3U, 4U}) {
      const Frame f = Frame::of(m, Rational(1));
      const auto r = synthesize({{AxiomKind::ETE}, {AxiomKind::Dummy}}, f, Domain::Reduced);
      REQUIRE(std::holds_alternative<UniqueTable>(r));
      CHECK(std::get<UniqueTable>(r).table == table_of(Rule(rule::Shapley{}), f, Domain::Reduced));
    }
    for (std::size_t m : {2U, 3U}) {
      const Frame f = Frame::of(m, Rational(1));
      const auto r = synthesize({{AxiomKind::ETE}, {AxiomKind::IVD}}, f, Domain::Enlarged);
      REQUIRE(std::holds_alternative<UniqueTable>(r));
      CHECK(std::get<UniqueTable>(r).table == table_of(Rule(rule::Uniform{}), f, Domain::Enlarged));
    }
    const auto inf = synthesize({{AxiomKind::ETE}, {AxiomKind::Dummy}}, Frame::of(2, Rational(1, 2)), Domain::Enlarged);
    REQUIRE(std::holds_alternative<Infeasible>(inf));
    CHECK(std::get<Infeasible>(inf).patterns.front() == Pattern{0, 0});
  }

  TEST_CASE("opd synthesis is the family 0 <= x <= y") {
    const Frame f = Frame::of(3, Rational(1));
    const auto r = synthesize({{AxiomKind::ETE}, {AxiomKind::OPD}}, f, Domain::Reduced);
    REQUIRE(std::holds_alternative<Family>(r));
    const auto& fam = std::get<Family>(r);
    CHECK(fam.tie_classes == 6);
    for (const auto& c : fam.constraints) {
      CHECK(c.lower == Rational(0));
      CHECK(c.upper == Rational(1, 3));  // x = y = 1/3 at the top
    }
    CHECK(fam.at(Rational(0)) == table_of(Rule(rule::Shapley{}), f, Domain::Reduced));
    CHECK(fam.at(Rational(1)) == table_of(Rule(rule::Uniform{}), f, Domain::Reduced));
    CHECK_THROWS_AS(fam.instantiate({Rational(0)}), InputError);
    CHECK_THROWS_AS(fam.at(Rational(2)), InputError);

    // tau narrows the upper end to τπ/(e + τ(m−e))
    const auto t = std::get<Family>(synthesize({{AxiomKind::ETE}, AxiomId::tau_opd(Rational(1, 2))}, f, Domain::Reduced));
    for (const auto& c : t.constraints) {
      const auto e = std::count(c.pattern.begin(), c.pattern.end(), 1);
      CHECK(c.upper == Rational(1, 2) / (Rational(e) + Rational(1, 2) * Rational(3 - e)));
    }
  }

  TEST_CASE("synthesis rejects what it cannot handle") {
    const Frame f = Frame::of(2, Rational(1));
    CHECK_THROWS_AS(synthesize({{AxiomKind::Dummy}}, f, Domain::Reduced), InputError);
    CHECK_THROWS_AS(synthesize({{AxiomKind::ETE}, {AxiomKind::IEV}}, f, Domain::Reduced), InputError);
    CHECK_THROWS_AS(synthesize({{AxiomKind::ETE}, {AxiomKind::HolderAnonymity}}, f, Domain::Reduced), InputError);
  }

  TEST_CASE("tau bound closed form and monotonicity") {
    CHECK(tau_beta_bound(Rational(0), 3) == Rational(0));
    CHECK(tau_beta_bound(Rational(1), 7) == Rational(1));
    CHECK(tau_beta_bound(Rational(1, 2), 2) == Rational(1, 3));
    CHECK_THROWS_AS(tau_beta_bound(Rational(-1), 2), InputError);
    CHECK_THROWS_AS(tau_beta_bound(Rational(1, 2), 0), InputError);
    for (std::size_t n = 1; n <= 5; ++n) {
      for (std::size_t k = 0; k + 1 < std::size(kTauGrid); ++k) {
        CHECK(tau_beta_bound(kTauGrid[k], n) <= tau_beta_bound(kTauGrid[k + 1], n));
      }
      if (n < 5) {
        for (const auto& tau : kTauGrid) CHECK(tau_beta_bound(tau, n + 1) <= tau_beta_bound(tau, n));
      }
    }
  }

  TEST_CASE("frame bound decreases to the tau bound") {
    for (const auto& tau : kTauGrid) {
      for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t m = 2; m < 12; ++m) {
          CHECK(frame_beta_bound(tau, n, m + 1) <= frame_beta_bound(tau, n, m));
          CHECK(tau_beta_bound(tau, n) <= frame_beta_bound(tau, n, m));
        }
      }
    }
    CHECK_THROWS_AS(frame_beta_bound(Rational(1, 2), 2, 1), InputError);
  }

  TEST_CASE("frame bound is the exact audit frontier for one holder") {
    // With n = 1 the extremal problem fits in the enumeration.
    for (std::size_t m : {2U, 3U, 4U}) {
      const Rational tau(1, 2);
      const Rational b = frame_beta_bound(tau, 1, m);
      EnumerationConfig cfg = reduced(m, 1);
      CHECK(audit(Rule(rule::ScalarConvex{b, Base::Shapley}), AxiomId::tau_opd(tau), cfg).pass);
      CHECK_FALSE(audit(Rule(rule::ScalarConvex{b + Rational(1, 1000), Base::Shapley}), AxiomId::tau_opd(tau), cfg).pass);
    }
  }

  TEST_CASE("bound witness on the grid") {
    for (const auto& tau : kTauGrid) {
      if (tau == Rational(1)) continue;
      const Rational b = tau_beta_bound(tau, 2);
      for (std::size_t m : {2U, 3U}) {
        CAPTURE(tau);
        CAPTURE(m);
        CHECK_FALSE(bound_witness(tau, 2, m, Rational(0)).has_value());
        CHECK_FALSE(bound_witness(tau, 2, m, b / Rational(2)).has_value());
        CHECK_FALSE(bound_witness(tau, 2, m, b).has_value());
        const auto w = bound_witness(tau, 2, m, b + Rational(1, 100));
        REQUIRE(w.has_value());
        CHECK_FALSE(w->verdict.pass);
        CHECK(w->verdict.axiom == AxiomId::tau_opd(tau));
        const Rule rule(rule::ScalarConvex{b + Rational(1, 100), Base::Shapley});
        CHECK(witness_reproduces(rule, w->verdict.axiom, *w->verdict.witness));
        CHECK(w->verdict.witness->lhs - w->verdict.witness->rhs > Rational(0));
        CHECK(is_reduced(w->problem));
        CHECK(w->problem.holder_count() == 2);
        CHECK(frame_beta_bound(tau, 2, w->problem.museum_count()) < b + Rational(1, 100));
      }
    }
    CHECK_FALSE(bound_witness(Rational(1, 2), 2, 4, Rational(1, 3)).has_value());
    CHECK_THROWS_AS(bound_witness(Rational(1, 2), 2, 1, Rational(1, 3)), InputError);
    CHECK_THROWS_AS(bound_witness(Rational(1, 2), 2, 2, Rational(2)), InputError);
  }

  TEST_CASE("impossibility certificate") {
    for (const auto& tau : kTauGrid) {
      const auto cert = impossibility_certificate(tau);
      if (tau == Rational(1)) {
        CHECK_FALSE(cert.has_value());
        continue;
      }
      REQUIRE(cert.has_value());
      CHECK(cert->gap == Rational(1) - Rational(2) * tau / (Rational(1) + tau));
      CHECK(cert->gap > Rational(0));
      CHECK(is_zero_matrix(cert->problems[0]));
      CHECK(cert->problems[1].entrance() == std::vector<VisitRow>{{1, 0}, {1, 0}});
      CHECK(cert->problems[2].entrance() == std::vector<VisitRow>{{0, 1}, {0, 1}});
      CHECK(cert->problems[0].price() == Rational(1, 2));
      for (const Rule& r : {Rule(rule::Uniform{}), Rule(rule::EqualAttribution{}), Rule(rule::R5{}),
                            Rule(rule::ConditionalEqualAttribution{}), Rule(rule::Proportional{})}) {
        CHECK(certificate_breach(*cert, r).has_value());
      }
    }
    CHECK(impossibility_certificate(Rational(1, 2))->gap == Rational(1, 3));
    CHECK(impossibility_certificate(Rational(0))->gap == Rational(1));
    CHECK_THROWS_AS(impossibility_certificate(Rational(3, 2)), InputError);

    // A table that meets both ivd equalities has to break a tau-opd bound.
    const auto cert = *impossibility_certificate(Rational(1, 2));
    const auto breach = certificate_breach(cert, Rule(rule::Uniform{}));
    REQUIRE(breach.has_value());
    CHECK(breach->condition == "y2 <= tau*y1");
    REQUIRE(breach->verdict.has_value());
    CHECK(breach->verdict->witness->lhs == Rational(1, 2));
  }
}
