#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tailscore/distribution.hpp"
#include "tailscore/functionals.hpp"
#include "tailscore/scoring.hpp"
#include "tailscore/tail_order.hpp"

namespace tailscore {

// Mixture weight at which the preference between reports x0 and x1 flips:
// phi(lambda) = expected_score(x0) - expected_score(x1) under
// mix(f0, f1, lambda) is affine, negative at 0 and positive at 1.
struct CrossingResult {
    double lambda_star = 0.0;
    double a = 0.0;  // phi(1), positive
    double b = 0.0;  // phi(0), negative
    double a_error = 0.0;
    double b_error = 0.0;
    double residual = 0.0;  // |phi(lambda_star)|
};

// Throws numeric_error when the signs do not cross, when the root residual
// exceeds its error budget, or when an independent bisection of phi lands
// away from the closed-form root.
CrossingResult crossing_lambda(const ScoringFunction& fn, double x0, double x1,
                               const Distribution& f0, const Distribution& f1,
                               const QuadOptions& opts = {});

struct ConvexityRow {
    double lambda = 0.0;
    std::optional<double> value;
    bool matches = false;
};

// Whether the functional keeps the shared value t0 = t1 along the mixture
// path, i.e. whether this level set contains the segment between f0 and f1.
struct ConvexityReport {
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<ConvexityRow> rows;
    bool convex_on_grid = false;
};

// Requires T(f0) and T(f1) defined and within tol of each other.
ConvexityReport level_set_convexity_check(Functional f, const Distribution& f0,
                                          const Distribution& f1,
                                          const std::vector<double>& lambdas, double tol = 1e-9);

enum class Continuity { Continuous, Jump, Inconclusive };

const char* continuity_name(Continuity c);

struct ContinuityRow {
    double lambda = 0.0;
    std::optional<double> value;
};

// Behavior of lambda -> T(mix(f0, f1, lambda)) as lambda -> 0: the two
// smallest positive grid values extrapolate linearly to lambda = 0 and the
// result is compared against T(f0).
struct ContinuityReport {
    std::vector<ContinuityRow> rows;
    double at_zero = 0.0;
    double extrapolated = 0.0;
    double jump_size = 0.0;
    Continuity verdict = Continuity::Inconclusive;
};

ContinuityReport mixture_continuity_probe(
    Functional f, const Distribution& f0, const Distribution& f1,
    const std::vector<double>& lambdas = {0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5});

struct BoundRow {
    double lambda = 0.0;
    double gap = 0.0;
    double gap_error = 0.0;
    double bound = 0.0;
    double bound_error = 0.0;
    bool satisfied = false;
};

// gap(lambda) = expected score of mix(f0, f1, lambda) minus that of f0, both
// under truth f0; bound is lambda / (1 - lambda) times the divergence d of
// f1 from f0. satisfied allows slack_factor times the numerical errors.
struct BoundReport {
    double d = 0.0;
    double d_error = 0.0;
    std::vector<BoundRow> rows;
    bool all_satisfied = false;
};

BoundReport diagonal_bound_check(const ScoringRule& rule, const Distribution& f0,
                                 const Distribution& f1, const std::vector<double>& lambdas,
                                 double slack_factor = 10.0, const QuadOptions& opts = {});

// Same rows as diagonal_bound_check, computed through the same code path so
// the two entry points agree bit for bit.
BoundReport score_gap_curve(const ScoringRule& rule, const Distribution& f0,
                            const Distribution& f1, const std::vector<double>& lambdas,
                            double slack_factor = 10.0, const QuadOptions& opts = {});

// Mixture sitting within epsilon of the truth in expected score while the
// functional and the tail order still tell the two apart.
struct EpsilonConstruction {
    double epsilon = 0.0;
    double d = 0.0;  // divergence of alt from truth
    double d_error = 0.0;
    double lambda_eps = 0.0;
    double measured_gap = 0.0;
    double gap_error = 0.0;
    std::optional<double> t_truth;
    std::optional<double> t_construct;
    TailVerdict tail_verdict = TailVerdict::Undetermined;
    bool degenerate = false;  // zero divergence, nothing to construct
};

EpsilonConstruction epsilon_mixture(const ScoringRule& rule, Functional f,
                                    const Distribution& truth, const Distribution& alt,
                                    double epsilon, const QuadOptions& opts = {});

struct PowerRow {
    long n = 0;
    double mean_diff = 0.0;
    double std_error = 0.0;  // mean per-replication std error
    double detect_frac = 0.0;
};

// For each n: reps paired Monte Carlo runs of score(fa) - score(fb) under g,
// counting the fraction whose mean difference clears twice its std error.
// Deterministic in seed; replications use independent substreams.
std::vector<PowerRow> mc_power_study(const ScoringRule& rule, const Distribution& fa,
                                     const Distribution& fb, const Distribution& g,
                                     const std::vector<long>& ns, int reps, std::uint64_t seed,
                                     const QuadOptions& opts = {});

}  // namespace tailscore
