#include <random>

#include <doctest.h>

#include "mpass/enumerate.hpp"
#include "mpass/errors.hpp"
#include "mpass/rules.hpp"
#include "oracles.hpp"

using namespace mpass;
using oracle::q;
using oracle::shares_of;

namespace {

std::vector<Problem> enlarged(std::size_t m_max, std::size_t n_max) {
  EnumerationConfig cfg;
  cfg.m_max = m_max;
  cfg.n_max = n_max;
  cfg.domain = Domain::Enlarged;
  return enumerate_problems(cfg);
}

std::vector<Problem> reduced(std::size_t m_max, std::size_t n_max) {
  EnumerationConfig cfg;
  cfg.m_max = m_max;
  cfg.n_max = n_max;
  return enumerate_problems(cfg);
}

}  // namespace

TEST_SUITE("rules") {
  TEST_CASE("five-holder example under every rule defined on it") {
    const Problem p = oracle::example_one();
    CHECK(shares_of(uniform(p)) == q({"5/3", "5/3", "5/3"}));
    CHECK(shares_of(proportional(p)) == q({"2", "3", "0"}));
    CHECK(shares_of(equal_attribution(p)) == q({"11/6", "17/6", "1/3"}));
    CHECK(shares_of(conditional_equal_attribution(p)) == q({"2", "3", "0"}));
    CHECK(shares_of(proportional_attribution(p)) == q({"19/10", "31/10", "0"}));
    CHECK(shares_of(r1(p)) == q({"7/3", "7/3", "1/3"}));
    CHECK(shares_of(r5(p)) == q({"5", "0", "0"}));
    CHECK_THROWS_AS(shapley(p), DomainError);
  }

  TEST_CASE("four-holder example") {
    const Problem p = oracle::example_one_reduced();
    CHECK(shares_of(shapley(p)) == q({"3/2", "5/2", "0"}));
    CHECK(shares_of(beta_family(p, BetaProfile::constant(Rational(1, 2)), Base::Shapley)) ==
          q({"17/12", "23/12", "2/3"}));
    // (1/3)(4/3, 4/3, 4/3) + (2/3)(3/2, 5/2, 0)
    CHECK(shares_of(scalar_convex(p, Rational(1, 3), Base::Shapley)) == q({"13/9", "19/9", "4/9"}));
  }

  TEST_CASE("small closed-form cases") {
    const Problem zero({1, 2}, {1, 2}, Rational(1, 2), {{0, 0}, {0, 0}});
    for (auto* f : {&uniform, &proportional, &equal_attribution, &conditional_equal_attribution,
                    &proportional_attribution}) {
      CHECK(shares_of(f(zero)) == q({"1/2", "1/2"}));
    }
    CHECK_THROWS_AS(shapley(zero), DomainError);

    const Problem single({1}, {1, 2, 3}, Rational(2, 3), {{1}, {0}, {1}});
    CHECK(shares_of(uniform(single)) == q({"2"}));

    const Problem one_visit({1, 2, 3}, {1}, Rational(1), {{1, 0, 0}});
    CHECK(shares_of(shapley(one_visit)) == q({"1", "0", "0"}));
    CHECK(shares_of(r_epsilon(one_visit, Rational(1, 4))) == q({"1/6", "5/12", "5/12"}));
    CHECK(shares_of(r2(one_visit)) == q({"0", "1/2", "1/2"}));

    const Problem all({1, 2, 3, 4}, {1}, Rational(1), {{1, 1, 1, 1}});
    CHECK(shares_of(proportional(all)) == q({"1/4", "1/4", "1/4", "1/4"}));
  }

  TEST_CASE("per-pass oracle agrees with ea, cea and pa on the enlarged enumeration") {
    for (const auto& p : enlarged(3, 3)) {
      CHECK(shares_of(equal_attribution(p)) == oracle::per_pass_split(p, oracle::NullPass::Everyone));
      CHECK(shares_of(conditional_equal_attribution(p)) == oracle::per_pass_split(p, oracle::NullPass::NonDummy));
      CHECK(shares_of(proportional_attribution(p)) == oracle::per_pass_split(p, oracle::NullPass::ByVisits));
      CHECK(shares_of(uniform(p)) == oracle::uniform(p));
      CHECK(shares_of(proportional(p)) == oracle::proportional(p));
    }
  }

  TEST_CASE("attribution rules coincide with shapley on the reduced domain") {
    for (const auto& p : reduced(3, 3)) {
      const Allocation sh = shapley(p);
      CHECK(equal_attribution(p) == sh);
      CHECK(conditional_equal_attribution(p) == sh);
      CHECK(proportional_attribution(p) == sh);
    }
  }

  TEST_CASE("shapley equals the permutation average of first visits") {
    for (const auto& p : reduced(4, 2)) CHECK(shares_of(shapley(p)) == oracle::permutation_shapley(p));
  }

  TEST_CASE("r-epsilon matches its per-holder formula") {
    for (const auto& p : reduced(3, 2)) {
      for (const Rational& eps : {Rational(1, 4), Rational(1, 3)}) {
        CHECK(shares_of(r_epsilon(p, eps)) == oracle::r_epsilon(p, eps.raw()));
      }
    }
    const Problem p({1, 2, 3}, {1}, Rational(1), {{1, 0, 0}});
    CHECK_THROWS_AS(r_epsilon(p, Rational(0)), InputError);
    CHECK_THROWS_AS(r_epsilon(p, Rational(1, 2)), InputError);
    CHECK_THROWS_AS(r_epsilon(oracle::example_one(), Rational(1, 4)), DomainError);
  }

  TEST_CASE("r-epsilon stays non-negative at half its admissible range") {
    for (const auto& p : reduced(4, 2)) {
      const auto m = static_cast<long>(p.museum_count());
      if (m < 2) continue;
      CHECK(is_valid_allocation(r_epsilon(p, Rational(1, 2 * (m - 1))), p));
    }
  }

  TEST_CASE("constant profiles reduce to the scalar convex rule") {
    std::mt19937_64 rng(3);
    for (const auto& p : enlarged(3, 2)) {
      const Rational beta = oracle::random_unit(rng);
      const BetaProfile profile = BetaProfile::constant(beta);
      CHECK(beta_family(p, profile, Base::EqualAttribution) == scalar_convex(p, beta, Base::EqualAttribution));
      if (is_reduced(p)) CHECK(beta_family(p, profile, Base::Shapley) == scalar_convex(p, beta, Base::Shapley));
    }
  }

  TEST_CASE("scalar convex is affine in beta") {
    std::mt19937_64 rng(5);
    for (const auto& p : reduced(3, 2)) {
      const Rational beta = oracle::random_unit(rng);
      const Allocation lo = scalar_convex(p, Rational(0), Base::Shapley);
      const Allocation hi = scalar_convex(p, Rational(1), Base::Shapley);
      CHECK(lo == shapley(p));
      CHECK(hi == uniform(p));
      CHECK(scalar_convex(p, beta, Base::Shapley) == beta * hi + (Rational(1) - beta) * lo);
    }
    CHECK_THROWS_AS(scalar_convex(oracle::example_one_reduced(), Rational(3, 2), Base::Shapley), InputError);
  }

  TEST_CASE("profile lookup order") {
    BetaProfile prof = BetaProfile::constant(Rational(1, 5));
    prof.by_holder[2] = Rational(2, 5);
    prof.by_pattern[{1, 2}] = Rational(3, 5);
    prof.overrides[{2, {1, 2}}] = Rational(4, 5);
    CHECK(prof.coefficient(1, {1}) == Rational(1, 5));
    CHECK(prof.coefficient(2, {1}) == Rational(2, 5));
    CHECK(prof.coefficient(1, {1, 2}) == Rational(3, 5));
    CHECK(prof.coefficient(2, {1, 2}) == Rational(4, 5));
    prof.by_holder[3] = Rational(6, 5);
    CHECK_THROWS_AS(prof.validate(), InputError);
  }

  TEST_CASE("r3 and r4 use their coefficients per holder") {
    const Problem p({1, 2}, {1, 2}, Rational(1), {{1, 0}, {1, 0}});
    // holder 1 all Shapley, holder 2 all uniform.
    CHECK(shares_of(r3(p, {{1, Rational(0)}, {2, Rational(1)}}, Base::Shapley)) == q({"3/2", "1/2"}));
    CHECK(shares_of(r4(p, {{{1}, Rational(1, 2)}}, Rational(0), Base::Shapley)) == q({"3/2", "1/2"}));
    CHECK(shares_of(r4(p, {{{2}, Rational(1, 2)}}, Rational(0), Base::Shapley)) == q({"2", "0"}));
  }

  TEST_CASE("every rule returns a valid allocation on the enumeration") {
    std::vector<RuleId> total = {rule::Uniform{},
                                 rule::Proportional{},
                                 rule::EqualAttribution{},
                                 rule::ConditionalEqualAttribution{},
                                 rule::ProportionalAttribution{},
                                 rule::R1{},
                                 rule::R2{},
                                 rule::R5{},
                                 rule::ScalarConvex{Rational(1, 3), Base::EqualAttribution},
                                 rule::BetaFamily{BetaProfile::constant(Rational(2, 7)), Base::EqualAttribution}};
    std::vector<RuleId> reduced_only = {rule::Shapley{}, rule::REpsilon{Rational(1, 4)},
                                        rule::ScalarConvex{Rational(1, 3), Base::Shapley},
                                        rule::R3{{{1, Rational(1)}}, Base::Shapley},
                                        rule::R4{{{{1}, Rational(1, 2)}}, Rational(0), Base::Shapley}};
    for (const auto& p : enlarged(3, 3)) {
      for (const auto& id : total) CHECK(is_valid_allocation(allocate(id, p), p));
      for (const auto& id : reduced_only) {
        if (is_reduced(p)) {
          CHECK(is_valid_allocation(allocate(id, p), p));
        } else {
          CHECK_THROWS_AS(allocate(id, p), DomainError);
        }
      }
    }
  }

  TEST_CASE("rule strings round trip") {
    for (const char* text : {"uniform", "proportional", "shapley", "ea", "cea", "pa", "r1", "r2", "r5",
                             "convex:1/3:sh", "convex:1/2:ea", "reps:1/4", "r3:0,1:sh", "r3:1/2:ea"}) {
      CAPTURE(text);
      CHECK(to_string(parse_rule(text)) == text);
    }
    CHECK(to_string(parse_rule("convex:1/3")) == "convex:1/3:sh");
    CHECK(std::holds_alternative<rule::R4>(parse_rule("r4:0;1+2=1/2;none=1")));
    for (const char* bad : {"", "nope", "convex", "convex:2", "convex:1/2:xx", "reps:0", "uniform:1", "r4:0;1+2"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_rule(bad), InputError);
    }
  }

  TEST_CASE("wrapped callables keep their name") {
    const Rule custom("half", [](const Problem& p) { return Rational(1, 2) * uniform(p); });
    CHECK(custom.name() == "half");
    CHECK(custom(oracle::example_one())[0] == Rational(5, 6));
    CHECK(Rule(rule::R2{}).name() == "r2");
  }
}
