#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tailscore/error.hpp"
#include "tailscore/lab.hpp"

using namespace tailscore;

namespace {

Distribution make(Family f) { return Distribution(std::move(f)); }
Distribution exp1() { return make(Exponential{1.0}); }
Distribution par21() { return make(Pareto{2.0, 1.0}); }

}  // namespace

TEST_CASE("preference crossing") {
    SUBCASE("point-mass ends have exact closed-form scores") {
        // phi(F) = E(1-Y)^2 - E(3-Y)^2: -8 at delta_0, +4 at delta_3
        const CrossingResult r = crossing_lambda(SquaredError{1}, 1.0, 3.0, make(PointMass{0.0}),
                                                 make(PointMass{3.0}));
        CHECK(r.a == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(r.b == doctest::Approx(-8.0).epsilon(1e-14));
        CHECK(r.lambda_star == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(std::abs(r.residual) <= 1e-12);
    }
    SUBCASE("mean reports under exponential and pareto ends") {
        // phi depends on the mixture mean only: 2 m - 3 with m = 1 + 2 lambda,
        // so the root sits at 1/4
        const CrossingResult r =
            crossing_lambda(SquaredError{1}, 1.0, 2.0, exp1(), make(Pareto{3.0, 2.0}));
        CHECK(r.lambda_star == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(r.a == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(r.b == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("median reports under shifted normals") {
        const CrossingResult r =
            crossing_lambda(Pinball{0.5}, 0.0, 2.0, make(Normal{0.0, 1.0}), make(Normal{2.0, 1.0}));
        CHECK(r.lambda_star == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(r.a == doctest::Approx(oracle::pinball_cross_a).epsilon(1e-12));
        CHECK(r.b == doctest::Approx(-oracle::pinball_cross_a).epsilon(1e-12));
    }
    SUBCASE("no crossing throws") {
        CHECK_THROWS_AS(crossing_lambda(SquaredError{1}, 1.0, 3.0, make(PointMass{0.0}),
                                        make(PointMass{1.0})),
                        numeric_error);
        CHECK_THROWS_AS(crossing_lambda(SquaredError{1}, 3.0, 1.0, make(PointMass{0.0}),
                                        make(PointMass{3.0})),
                        numeric_error);
    }
}

TEST_CASE("level set convexity") {
    const std::vector<double> grid = {0.1, 0.25, 0.5, 0.75, 0.9};
    SUBCASE("mean level sets are convex") {
        const ConvexityReport r = level_set_convexity_check(
            Functional::Mean, make(Normal{0.0, 1.0}), make(Uniform{-1.0, 1.0}), grid);
        CHECK(r.convex_on_grid);
        CHECK(r.rows.size() == grid.size());
        for (const ConvexityRow& row : r.rows) CHECK(row.matches);
    }
    SUBCASE("shared extreme value index survives mixing") {
        const ConvexityReport r = level_set_convexity_check(
            Functional::Evi, par21(), make(GeneralizedPareto{0.5, 1.0, 0.0}), grid);
        CHECK(r.t0 == 0.5);
        CHECK(r.convex_on_grid);
    }
    SUBCASE("numeric index needs its own tolerance") {
        const ConvexityReport r = level_set_convexity_check(
            Functional::MIndex, par21(), make(GeneralizedPareto{0.5, 1.0, 0.0}), grid, 2e-3);
        CHECK(r.convex_on_grid);
    }
    SUBCASE("mismatched or undefined ends are rejected") {
        CHECK_THROWS_AS(
            level_set_convexity_check(Functional::Mean, exp1(), par21(), grid),
            std::invalid_argument);
        CHECK_THROWS_AS(level_set_convexity_check(Functional::Evi, make(PointMass{1.0}),
                                                  make(PointMass{1.0}), grid),
                        std::invalid_argument);
    }
}

TEST_CASE("mixture path continuity at zero") {
    SUBCASE("extreme value index jumps") {
        const ContinuityReport r = mixture_continuity_probe(Functional::Evi, exp1(), par21());
        CHECK(r.verdict == Continuity::Jump);
        CHECK(r.at_zero == 0.0);
        CHECK(r.jump_size == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("upper endpoint jumps") {
        const ContinuityReport r = mixture_continuity_probe(
            Functional::UpperEndpoint, make(Uniform{0.0, 1.0}), make(Uniform{0.0, 2.0}));
        CHECK(r.verdict == Continuity::Jump);
        CHECK(r.jump_size == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("mean moves continuously") {
        const ContinuityReport r = mixture_continuity_probe(Functional::Mean, exp1(), par21());
        CHECK(r.verdict == Continuity::Continuous);
        CHECK(r.at_zero == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("continuity names") {
        CHECK(continuity_name(Continuity::Continuous) == std::string("continuous"));
        CHECK(continuity_name(Continuity::Jump) == std::string("jump"));
        CHECK(continuity_name(Continuity::Inconclusive) == std::string("inconclusive"));
    }
}

TEST_CASE("score gap against the odds-ratio bound") {
    const std::vector<double> lambdas = {0.5, 0.25, 0.1, 0.01};
    const BoundReport r = diagonal_bound_check(Crps{}, exp1(), par21(), lambdas);
    CHECK(r.d == doctest::Approx(oracle::l2sq_exp1_par21).epsilon(1e-10));
    CHECK(r.all_satisfied);
    REQUIRE(r.rows.size() == lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const BoundRow& row = r.rows[i];
        const double lam = lambdas[i];
        CHECK(row.lambda == lam);
        CHECK(row.satisfied);
        CHECK(row.gap == doctest::Approx(lam * lam * r.d).epsilon(1e-9));
        CHECK(row.bound == doctest::Approx(lam / (1.0 - lam) * r.d).epsilon(1e-12));
        CHECK(row.gap <= row.bound);
        // gap / bound = lambda (1 - lambda) for this construction
        CHECK(row.gap / row.bound == doctest::Approx(lam * (1.0 - lam)).epsilon(1e-6));
    }
    SUBCASE("curve delegates to the same computation") {
        const BoundReport c = score_gap_curve(Crps{}, exp1(), par21(), lambdas);
        REQUIRE(c.rows.size() == r.rows.size());
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(c.rows[i].gap == r.rows[i].gap);
            CHECK(c.rows[i].bound == r.rows[i].bound);
        }
    }
    SUBCASE("weights outside [0,1) are rejected") {
        CHECK_THROWS_AS(diagonal_bound_check(Crps{}, exp1(), par21(), {1.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(diagonal_bound_check(Crps{}, exp1(), par21(), {-0.1}),
                        std::invalid_argument);
    }
}

TEST_CASE("epsilon mixture construction") {
    SUBCASE("stays within the score budget while the tail index moves") {
        for (double eps : {0.1, 0.01}) {
            const EpsilonConstruction c =
                epsilon_mixture(Crps{}, Functional::Evi, exp1(), par21(), eps);
            CHECK_FALSE(c.degenerate);
            CHECK(c.d == doctest::Approx(oracle::l2sq_exp1_par21).epsilon(1e-10));
            CHECK(c.lambda_eps == doctest::Approx(eps / (eps + c.d)).epsilon(1e-12));
            CHECK(c.measured_gap > 0.0);
            CHECK(c.measured_gap <= eps + 1e-9);
            CHECK(c.measured_gap ==
                  doctest::Approx(c.lambda_eps * c.lambda_eps * c.d).epsilon(1e-8));
            REQUIRE(c.t_truth.has_value());
            REQUIRE(c.t_construct.has_value());
            CHECK(*c.t_truth == 0.0);
            CHECK(*c.t_construct == 0.5);
            CHECK(c.tail_verdict == TailVerdict::FirstHeavier);
        }
    }
    SUBCASE("identical truth and alternative degenerates") {
        const EpsilonConstruction c =
            epsilon_mixture(Crps{}, Functional::Evi, exp1(), exp1(), 0.1);
        CHECK(c.degenerate);
        CHECK(std::isnan(c.lambda_eps));
    }
}

TEST_CASE("monte carlo power study") {
    const std::vector<long> ns = {400};
    const std::vector<PowerRow> rows = mc_power_study(Crps{}, par21(), exp1(), exp1(), ns, 6, 3);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 400);
    CHECK(rows[0].mean_diff > 0.0);  // the wrong tail scores worse under the truth
    CHECK(rows[0].std_error > 0.0);
    CHECK(rows[0].detect_frac >= 0.5);
    CHECK(rows[0].detect_frac <= 1.0);
    const std::vector<PowerRow> again = mc_power_study(Crps{}, par21(), exp1(), exp1(), ns, 6, 3);
    CHECK(again[0].mean_diff == rows[0].mean_diff);
    CHECK(again[0].detect_frac == rows[0].detect_frac);
}
