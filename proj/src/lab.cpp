#include "tailscore/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tailscore/error.hpp"
#include "tailscore/numeric.hpp"

namespace tailscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_value(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CrossingResult crossing_lambda(const ScoringFunction& fn, double x0, double x1,
                               const Distribution& f0, const Distribution& f1,
                               const QuadOptions& opts) {
    const auto phi = [&](double lambda) {
        const Distribution m = mix(f0, f1, lambda);
        const ExpectedScore s0 = expected_score_fn(fn, x0, m, opts);
        const ExpectedScore s1 = expected_score_fn(fn, x1, m, opts);
        return std::pair{s0.value - s1.value, s0.abs_error + s1.abs_error};
    };

    const auto [a, a_err] = phi(1.0);
    const auto [b, b_err] = phi(0.0);
    if (!(a > a_err)) {
        throw numeric_error("no crossing: x0 does not lose under f1 beyond numerical error");
    }
    if (!(-b > b_err)) {
        throw numeric_error("no crossing: x0 does not win under f0 beyond numerical error");
    }

    const double lambda_star = -b / (a - b);
    const auto [res, res_err] = phi(lambda_star);
    const double residual = std::abs(res);
    const double budget = 10.0 * (res_err + a_err + b_err) + 1e-12 * (a - b);
    if (residual > budget) {
        throw numeric_error("crossing residual exceeds its error budget");
    }

    // Independent check: locate the sign change of phi directly.
    const double lambda_bis =
        numeric::bisect_boundary([&](double l) { return phi(l).first >= 0.0; }, 0.0, 1.0);
    const double slack = 1e-10 + 10.0 * (a_err + b_err) / (a - b);
    if (std::abs(lambda_bis - lambda_star) > slack) {
        throw numeric_error("bisection disagrees with the closed-form crossing");
    }
    return {lambda_star, a, b, a_err, b_err, residual};
}

ConvexityReport level_set_convexity_check(Functional f, const Distribution& f0,
                                          const Distribution& f1,
                                          const std::vector<double>& lambdas, double tol) {
    const auto t0 = evaluate(f, f0);
    const auto t1 = evaluate(f, f1);
    if (!t0 || !t1) {
        throw std::invalid_argument("level set check needs the functional defined on both ends");
    }
    if (!same_value(*t0, *t1, tol)) {
        throw std::invalid_argument("level set check needs both ends on the same level");
    }
    ConvexityReport rep;
    rep.t0 = *t0;
    rep.t1 = *t1;
    rep.convex_on_grid = true;
    for (const double lambda : lambdas) {
        const auto v = evaluate(f, mix(f0, f1, lambda));
        const bool ok = v.has_value() && same_value(*v, *t0, tol);
        rep.rows.push_back({lambda, v, ok});
        rep.convex_on_grid = rep.convex_on_grid && ok;
    }
    return rep;
}

const char* continuity_name(Continuity c) {
    switch (c) {
        case Continuity::Continuous: return "continuous";
        case Continuity::Jump: return "jump";
        case Continuity::Inconclusive: return "inconclusive";
    }
    throw std::invalid_argument("unknown continuity verdict");
}

ContinuityReport mixture_continuity_probe(Functional f, const Distribution& f0,
                                          const Distribution& f1,
                                          const std::vector<double>& lambdas) {
    ContinuityReport rep;
    for (const double lambda : lambdas) {
        rep.rows.push_back({lambda, evaluate(f, mix(f0, f1, lambda))});
    }
    const auto t0 = evaluate(f, f0);
    rep.jump_size = std::numeric_limits<double>::quiet_NaN();
    rep.extrapolated = rep.jump_size;
    rep.at_zero = t0 ? *t0 : rep.jump_size;
    if (!t0 || !std::isfinite(*t0)) return rep;

    // Two smallest positive-lambda rows with finite values.
    std::vector<ContinuityRow> pos;
    for (const auto& row : rep.rows) {
        if (row.lambda > 0.0 && row.value && std::isfinite(*row.value)) pos.push_back(row);
    }
    std::sort(pos.begin(), pos.end(),
              [](const ContinuityRow& x, const ContinuityRow& y) { return x.lambda < y.lambda; });
    if (pos.size() < 2 || pos[0].lambda == pos[1].lambda) return rep;

    const double l1 = pos[0].lambda, v1 = *pos[0].value;
    const double l2 = pos[1].lambda, v2 = *pos[1].value;
    rep.extrapolated = v1 - l1 * (v2 - v1) / (l2 - l1);
    rep.jump_size = std::abs(rep.extrapolated - *t0);
    const double scale = std::max(1.0, std::abs(*t0));
    if (rep.jump_size <= 1e-6 * scale) {
        rep.verdict = Continuity::Continuous;
    } else if (rep.jump_size > 1e-3 * scale) {
        rep.verdict = Continuity::Jump;
    }
    return rep;
}

BoundReport diagonal_bound_check(const ScoringRule& rule, const Distribution& f0,
                                 const Distribution& f1, const std::vector<double>& lambdas,
                                 double slack_factor, const QuadOptions& opts) {
    if (!(slack_factor >= 0.0)) throw std::invalid_argument("slack factor must be nonnegative");
    const ExpectedScore d = expected_score_diff(rule, f1, f0, f0, opts);
    BoundReport rep;
    rep.d = d.value;
    rep.d_error = d.abs_error;
    rep.all_satisfied = true;
    for (const double lambda : lambdas) {
        if (!(lambda >= 0.0 && lambda < 1.0)) {
            throw std::invalid_argument("bound check needs lambda in [0, 1)");
        }
        const ExpectedScore gap = expected_score_diff(rule, mix(f0, f1, lambda), f0, f0, opts);
        const double ratio = lambda / (1.0 - lambda);
        BoundRow row;
        row.lambda = lambda;
        row.gap = gap.value;
        row.gap_error = gap.abs_error;
        row.bound = ratio * rep.d;
        row.bound_error = ratio * rep.d_error;
        row.satisfied =
            row.gap <= row.bound + slack_factor * (row.gap_error + row.bound_error);
        rep.rows.push_back(row);
        rep.all_satisfied = rep.all_satisfied && row.satisfied;
    }
    return rep;
}

BoundReport score_gap_curve(const ScoringRule& rule, const Distribution& f0,
                            const Distribution& f1, const std::vector<double>& lambdas,
                            double slack_factor, const QuadOptions& opts) {
    return diagonal_bound_check(rule, f0, f1, lambdas, slack_factor, opts);
}

EpsilonConstruction epsilon_mixture(const ScoringRule& rule, Functional f,
                                    const Distribution& truth, const Distribution& alt,
                                    double epsilon, const QuadOptions& opts) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("epsilon must be positive and finite");
    }
    EpsilonConstruction out;
    out.epsilon = epsilon;
    const ExpectedScore d = expected_score_diff(rule, alt, truth, truth, opts);
    out.d = d.value;
    out.d_error = d.abs_error;
    out.t_truth = evaluate(f, truth);
    if (!(out.d > d.abs_error)) {  // alt indistinguishable from truth in score
        out.degenerate = true;
        out.lambda_eps = std::numeric_limits<double>::quiet_NaN();
        out.measured_gap = out.lambda_eps;
        out.gap_error = out.lambda_eps;
        out.t_construct = out.t_truth;
        out.tail_verdict = tail_compare(truth, truth).verdict;
        return out;
    }
    out.lambda_eps = epsilon / (epsilon + out.d);
    const Distribution construct = mix(truth, alt, out.lambda_eps);
    const ExpectedScore gap = expected_score_diff(rule, construct, truth, truth, opts);
    out.measured_gap = gap.value;
    out.gap_error = gap.abs_error;
    out.t_construct = evaluate(f, construct);
    out.tail_verdict = tail_compare(construct, truth).verdict;
    return out;
}

std::vector<PowerRow> mc_power_study(const ScoringRule& rule, const Distribution& fa,
                                     const Distribution& fb, const Distribution& g,
                                     const std::vector<long>& ns, int reps, std::uint64_t seed,
                                     const QuadOptions& opts) {
    if (reps < 1) throw std::invalid_argument("replication count must be positive");
    std::vector<PowerRow> rows;
    for (const long n : ns) {
        if (n < 1) throw std::invalid_argument("sample count must be positive");
        PowerRow row;
        row.n = n;
        long detected = 0;
        const std::uint64_t base = numeric::mix_seed(seed, static_cast<std::uint64_t>(n));
        for (int rep = 0; rep < reps; ++rep) {
            const std::uint64_t sub = numeric::mix_seed(base, static_cast<std::uint64_t>(rep));
            const ExpectedScore es = mc_expected_score_diff(rule, fa, fb, g, n, sub, opts);
            row.mean_diff += es.value;
            row.std_error += es.std_error;
            if (es.value > 2.0 * es.std_error) ++detected;
        }
        row.mean_diff /= reps;
        row.std_error /= reps;
        row.detect_frac = static_cast<double>(detected) / reps;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tailscore
