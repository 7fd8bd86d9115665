#pragma once

#include <cstdint>
#include <variant>

#include "tailscore/distribution.hpp"

namespace tailscore {

// Integral-form rule scoring a whole forecast distribution.
struct Crps {};
// Crps restricted to outcomes above the threshold: the integrand is cut off
// at x = threshold. threshold = -inf recovers Crps exactly.
struct WeightedCrps {
    double threshold = 0.0;
};
using ScoringRule = std::variant<Crps, WeightedCrps>;

// Pointwise scoring function for a real-valued report x against outcome y.
//   SquaredError: (x - y^power)^2, consistent for the power-th moment.
//   Pinball:      (1{y <= x} - level)(x - y), consistent for the level-quantile.
struct SquaredError {
    int power = 1;
};
struct Pinball {
    double level = 0.5;
};
using ScoringFunction = std::variant<SquaredError, Pinball>;

enum class Method { ClosedForm, Quadrature, MonteCarlo };

const char* method_name(Method m);

// value carries the estimate; abs_error bounds truncation plus quadrature
// error. Monte Carlo additionally reports the sampling std error, which
// abs_error does not include.
struct ExpectedScore {
    double value = 0.0;
    double abs_error = 0.0;
    Method method = Method::Quadrature;
    long n_samples = 0;
    double std_error = 0.0;
};

struct QuadOptions {
    double abs_tol = 1e-9;
    // Survival level at which infinite tails are truncated; the mass beyond
    // is restored analytically and its residual enters abs_error.
    double tail_mass = 1e-13;
    int max_panels = 4000;
};

// Realized score of forecast f against outcome y.
ExpectedScore score_rule(const ScoringRule& rule, const Distribution& f, double y,
                         const QuadOptions& opts = {});

// Expected score of forecast f when outcomes follow g. Throws numeric_error
// when either distribution lacks a finite mean.
ExpectedScore expected_score_rule(const ScoringRule& rule, const Distribution& f,
                                  const Distribution& g, const QuadOptions& opts = {});

// expected_score_rule(fa, g) - expected_score_rule(fb, g) evaluated as one
// integral. Components shared between fa, fb, and g cancel symbolically
// first, so tiny differences survive at full precision.
ExpectedScore expected_score_diff(const ScoringRule& rule, const Distribution& fa,
                                  const Distribution& fb, const Distribution& g,
                                  const QuadOptions& opts = {});

double score_fn(const ScoringFunction& fn, double x, double y);

// Expected pointwise score of report x when outcomes follow g.
ExpectedScore expected_score_fn(const ScoringFunction& fn, double x, const Distribution& g,
                                const QuadOptions& opts = {});

// Plain Monte Carlo average of score_rule over n draws from g. Deterministic
// in (seed, n). Per-draw quadrature runs at a tolerance loose enough to stay
// far below the sampling error.
ExpectedScore mc_expected_score(const ScoringRule& rule, const Distribution& f,
                                const Distribution& g, long n, std::uint64_t seed,
                                const QuadOptions& opts = {});

// Monte Carlo average of score_rule(fa, y) - score_rule(fb, y) over shared
// draws from g; std_error is that of the paired per-draw differences.
ExpectedScore mc_expected_score_diff(const ScoringRule& rule, const Distribution& fa,
                                     const Distribution& fb, const Distribution& g, long n,
                                     std::uint64_t seed, const QuadOptions& opts = {});

}  // namespace tailscore
