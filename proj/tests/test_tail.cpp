#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tailscore/functionals.hpp"
#include "tailscore/tail_order.hpp"
#include "tailscore/tail_profile.hpp"

using namespace tailscore;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Distribution make(Family f) { return Distribution(std::move(f)); }
Distribution exp1() { return make(Exponential{1.0}); }
Distribution par21() { return make(Pareto{2.0, 1.0}); }

bool opt_is(const std::optional<double>& v, double want) { return v && *v == want; }

}  // namespace

TEST_CASE("tail comparison verdicts") {
    SUBCASE("power tails order by exponent, then by scale") {
        CHECK(tail_compare(make(Pareto{1.0, 1.0}), par21()).verdict == TailVerdict::FirstHeavier);
        CHECK(tail_compare(par21(), make(Pareto{1.0, 1.0})).verdict == TailVerdict::SecondHeavier);
        const TailComparison c = tail_compare(par21(), make(Pareto{2.0, 2.0}));
        CHECK(c.verdict == TailVerdict::TailEquivalent);
        REQUIRE(c.ratio.has_value());
        CHECK(*c.ratio == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("power beats exponential beats gaussian") {
        CHECK(tail_compare(make(Pareto{3.0, 1.0}), exp1()).verdict == TailVerdict::FirstHeavier);
        CHECK(tail_compare(exp1(), make(Normal{0.0, 1.0})).verdict == TailVerdict::FirstHeavier);
        CHECK(tail_compare(make(Normal{0.0, 1.0}), make(Pareto{5.0, 1.0})).verdict ==
              TailVerdict::SecondHeavier);
    }
    SUBCASE("exponential rates and gaussian scales") {
        CHECK(tail_compare(exp1(), make(Exponential{2.0})).verdict == TailVerdict::FirstHeavier);
        CHECK(tail_compare(make(Normal{0.0, 2.0}), make(Normal{0.0, 1.0})).verdict ==
              TailVerdict::FirstHeavier);
    }
    SUBCASE("bounded supports order by endpoint, then by approach rate") {
        CHECK(tail_compare(make(Uniform{0.0, 2.0}), make(Uniform{0.0, 1.0})).verdict ==
              TailVerdict::FirstHeavier);
        // same endpoint, cdf approach (1-x)^1 vs (1-x)^2: the flatter cdf is heavier
        CHECK(tail_compare(make(Uniform{0.0, 1.0}), make(GeneralizedPareto{-0.5, 0.5, 0.0}))
                  .verdict == TailVerdict::FirstHeavier);
        const TailComparison c = tail_compare(make(Uniform{0.0, 1.0}), make(Uniform{0.5, 1.0}));
        CHECK(c.verdict == TailVerdict::TailEquivalent);
        CHECK(opt_is(c.ratio, 0.5));
    }
    SUBCASE("gpd and gev reduce to their tail class") {
        const TailComparison c = tail_compare(make(GeneralizedPareto{0.5, 1.0, 0.0}), par21());
        CHECK(c.verdict == TailVerdict::TailEquivalent);
        REQUIRE(c.ratio.has_value());
        CHECK(*c.ratio == doctest::Approx(4.0).epsilon(1e-9));
        const TailComparison g =
            tail_compare(make(GeneralizedExtremeValue{0.0, 0.0, 1.0}), exp1());
        CHECK(g.verdict == TailVerdict::TailEquivalent);
        CHECK(*g.ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("mixtures compare through their heaviest part") {
        const Distribution m = mix(exp1(), par21(), 0.3);
        const TailComparison c = tail_compare(m, par21());
        CHECK(c.verdict == TailVerdict::TailEquivalent);
        CHECK(*c.ratio == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(tail_compare(m, exp1()).verdict == TailVerdict::FirstHeavier);
    }
    SUBCASE("atoms") {
        CHECK(tail_compare(make(PointMass{3.0}), make(Uniform{0.0, 1.0})).verdict ==
              TailVerdict::FirstHeavier);
        CHECK(tail_compare(make(PointMass{1.0}), make(PointMass{1.0}))
                  .verdict == TailVerdict::TailEquivalent);
    }
    SUBCASE("probes populate") {
        const TailComparison c = tail_compare(par21(), exp1());
        CHECK(c.probes.size() >= 6);
        // survival ratio of the heavier side grows along the probe ladder
        CHECK(c.probes.back().ratio > c.probes.front().ratio);
    }
    SUBCASE("verdict names") {
        CHECK(to_string(TailVerdict::FirstHeavier) == "first_heavier");
        CHECK(to_string(TailVerdict::SecondHeavier) == "second_heavier");
        CHECK(to_string(TailVerdict::TailEquivalent) == "tail_equivalent");
        CHECK(to_string(TailVerdict::Undetermined) == "undetermined");
    }
}

TEST_CASE("tail equivalence helper") {
    CHECK(opt_is(tail_equivalent(make(Pareto{2.0, 2.0}), par21()), 4.0));
    CHECK_FALSE(tail_equivalent(make(Pareto{1.0, 1.0}), par21()).has_value());
    CHECK_FALSE(tail_equivalent(exp1(), par21()).has_value());
}

TEST_CASE("extreme value index of mixtures") {
    SUBCASE("single families") {
        CHECK(opt_is(evi(par21()), 0.5));
        CHECK(opt_is(evi(make(GeneralizedPareto{0.25, 1.0, 0.0})), 0.25));
        CHECK(opt_is(evi(exp1()), 0.0));
        CHECK(opt_is(evi(make(Uniform{0.0, 1.0})), -1.0));
        CHECK_FALSE(evi(make(PointMass{1.0})).has_value());
    }
    SUBCASE("positive indices take the max") {
        const Distribution m = mix(par21(), make(Pareto{1.0, 1.0}), 0.5);
        CHECK(opt_is(evi(m), 1.0));
        const Distribution m2 = mix(make(GeneralizedPareto{0.2, 1.0, 0.0}),
                                    make(GeneralizedExtremeValue{0.4, 0.0, 1.0}), 0.25);
        CHECK(opt_is(evi(m2), 0.4));
    }
    SUBCASE("negative indices with one shared endpoint take the min") {
        // endpoints both 1; indices -1 and -0.5; the mixture cdf approaches 1
        // like the flatter component, but the normalized excess law follows
        // the steeper one
        const Distribution m =
            mix(make(Uniform{0.0, 1.0}), make(GeneralizedPareto{-0.5, 0.5, 0.0}), 0.5);
        CHECK(opt_is(evi(m), -1.0));
        const Distribution m2 =
            mix(make(GeneralizedPareto{-0.25, 0.25, 0.0}), make(Uniform{0.0, 1.0}), 0.5);
        CHECK(opt_is(evi(m2), -1.0));
    }
    SUBCASE("negative indices with different endpoints follow the longer reach") {
        const Distribution m = mix(make(Uniform{0.0, 1.0}), make(Uniform{0.0, 2.0}), 0.5);
        CHECK(opt_is(evi(m), -1.0));
        const Distribution m2 =
            mix(make(Uniform{0.0, 1.0}), make(GeneralizedPareto{-0.5, 1.0, 0.0}), 0.5);
        CHECK(opt_is(evi(m2), -0.5));
    }
    SUBCASE("a strictly heavier component fixes the index across signs") {
        CHECK(opt_is(evi(mix(exp1(), par21(), 0.3)), 0.5));
        CHECK(opt_is(evi(mix(make(Uniform{0.0, 1.0}), par21(), 0.3)), 0.5));
        CHECK(opt_is(evi(mix(make(Normal{0.0, 1.0}), exp1(), 0.5)), 0.0));
    }
    SUBCASE("an atom on top leaves the index undefined") {
        CHECK_FALSE(evi(mix(make(Uniform{0.0, 1.0}), make(PointMass{3.0}), 0.5)).has_value());
    }
}

TEST_CASE("regular variation index") {
    CHECK(opt_is(rv_index(par21()), -2.0));
    CHECK(opt_is(rv_index(make(GeneralizedExtremeValue{0.25, 0.0, 1.0})), -4.0));
    CHECK(opt_is(rv_index(exp1()), -kInf));
    CHECK(opt_is(rv_index(make(Normal{0.0, 1.0})), -kInf));
    CHECK_FALSE(rv_index(make(Uniform{0.0, 1.0})).has_value());
    SUBCASE("mixtures take the max defined index") {
        CHECK(opt_is(rv_index(mix(exp1(), par21(), 0.3)), -2.0));
        CHECK(opt_is(rv_index(mix(par21(), make(Pareto{1.0, 1.0}), 0.5)), -1.0));
        CHECK_FALSE(rv_index(mix(make(Uniform{0.0, 1.0}), par21(), 0.3)).has_value());
    }
}

TEST_CASE("numeric tail index from survival probes") {
    SUBCASE("power tails recover minus alpha") {
        for (double alpha : {1.0, 2.0, 3.0}) {
            const auto m = m_index(make(Pareto{alpha, 1.0}));
            REQUIRE(m.has_value());
            CHECK(*m == doctest::Approx(-alpha).epsilon(1e-9));
        }
    }
    SUBCASE("regularly varying families agree with their index") {
        const Distribution g = make(GeneralizedPareto{0.5, 1.0, 0.0});
        REQUIRE(m_index(g).has_value());
        CHECK(*m_index(g) == doctest::Approx(-2.0).epsilon(2e-3));
        const Distribution f = make(GeneralizedExtremeValue{0.5, 0.0, 1.0});
        REQUIRE(m_index(f).has_value());
        CHECK(*m_index(f) == doctest::Approx(-2.0).epsilon(2e-3));
    }
    SUBCASE("light tails diverge to -inf") {
        CHECK(opt_is(m_index(exp1()), -kInf));
        CHECK(opt_is(m_index(make(Normal{0.0, 1.0})), -kInf));
        CHECK(opt_is(m_index(make(GeneralizedExtremeValue{0.0, 0.0, 1.0})), -kInf));
    }
    SUBCASE("bounded support has no index") {
        CHECK_FALSE(m_index(make(Uniform{0.0, 1.0})).has_value());
        CHECK_FALSE(m_index(make(PointMass{3.0})).has_value());
    }
    SUBCASE("mixture with a power part keeps the power index despite drift") {
        for (double lam : {0.25, 0.5, 0.75}) {
            const Distribution m = mix(exp1(), par21(), lam);
            REQUIRE(m_index(m).has_value());
            CHECK(*m_index(m) == doctest::Approx(-2.0).epsilon(2e-3));
        }
    }
}

TEST_CASE("functional evaluation and names") {
    CHECK(functional_name(Functional::Mean) == std::string("mean"));
    CHECK(functional_name(Functional::UpperEndpoint) == std::string("upper_endpoint"));
    CHECK(functional_name(Functional::Evi) == std::string("evi"));
    CHECK(functional_name(Functional::RvIndex) == std::string("rv_index"));
    CHECK(functional_name(Functional::MIndex) == std::string("m_index"));

    CHECK(opt_is(evaluate(Functional::Mean, par21()), par21().mean()));
    CHECK(opt_is(evaluate(Functional::UpperEndpoint, make(Uniform{0.0, 2.0})), 2.0));
    CHECK(opt_is(evaluate(Functional::UpperEndpoint, par21()), kInf));
    CHECK(opt_is(evaluate(Functional::Evi, par21()), 0.5));
    CHECK(opt_is(evaluate(Functional::RvIndex, par21()), -2.0));
    CHECK(opt_is(evaluate(Functional::MIndex, par21()), -2.0));

    const TailProfile p = tail_profile(mix(exp1(), par21(), 0.3));
    CHECK(p.upper_endpoint == kInf);
    CHECK(opt_is(p.evi, 0.5));
    CHECK(opt_is(p.rv_index, -2.0));
    REQUIRE(p.m_index.has_value());
    CHECK(*p.m_index == doctest::Approx(-2.0).epsilon(2e-3));
}

TEST_CASE("analytic pair catalogue") {
    const std::vector<AnalyticPair> pairs = analytic_pairs();
    CHECK(pairs.size() >= 15);
    int equivalent = 0, first = 0, second = 0;
    for (const AnalyticPair& p : pairs) {
        CHECK_FALSE(p.label.empty());
        // the recorded verdict matches what tail_compare reports
        CHECK(tail_compare(p.a, p.b).verdict == p.verdict);
        if (p.verdict == TailVerdict::TailEquivalent) {
            ++equivalent;
            REQUIRE(p.ratio.has_value());
            const auto measured = tail_equivalent(p.a, p.b);
            REQUIRE(measured.has_value());
            CHECK(*measured == doctest::Approx(*p.ratio).epsilon(1e-6));
        }
        if (p.verdict == TailVerdict::FirstHeavier) ++first;
        if (p.verdict == TailVerdict::SecondHeavier) ++second;
    }
    CHECK(equivalent >= 4);
    CHECK(first >= 5);
    CHECK(second >= 1);
}

TEST_CASE("tail order respect sweep") {
    const std::vector<AnalyticPair> pairs = analytic_pairs();
    const std::vector<double> lambdas = {0.25, 0.5, 0.75};
    SUBCASE("endpoint, rv index, and numeric index respect the order") {
        for (Functional f : {Functional::UpperEndpoint, Functional::RvIndex, Functional::MIndex}) {
            const RespectReport r = tail_order_respect_check(f, pairs, lambdas);
            CHECK(r.passed);
            CHECK(r.violations == 0);
            CHECK(r.pairs_checked + r.pairs_skipped == static_cast<int>(pairs.size()));
            CHECK(r.pairs_checked >= 10);
        }
    }
    SUBCASE("the extreme value index does not") {
        const RespectReport r = tail_order_respect_check(Functional::Evi, pairs, lambdas);
        CHECK_FALSE(r.passed);
        CHECK(r.violations >= 1);
    }
    SUBCASE("the mean does not") {
        const RespectReport r = tail_order_respect_check(Functional::Mean, pairs, lambdas);
        CHECK_FALSE(r.passed);
    }
}
