#include "tailscore/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "tailscore/error.hpp"
#include "tailscore/parse.hpp"
#include "tailscore/tail_order.hpp"
#include "tailscore/tail_profile.hpp"

namespace tailscore {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "undef"; }

// Values that may contain commas (formatted specs) get quoted per CSV rules.
std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

QuadOptions quad_options(const CommonOptions& opts) {
    QuadOptions q;
    q.abs_tol = opts.tol_quad;
    return q;
}

}  // namespace

std::string run_profile(const Distribution& d) {
    const TailProfile p = tail_profile(d);
    std::ostringstream out;
    out << "field,value\n";
    out << "spec," << quoted(format_distribution(d)) << '\n';
    out << "mean," << num(evaluate(Functional::Mean, d)) << '\n';
    out << "upper_endpoint," << num(p.upper_endpoint) << '\n';
    out << "evi," << num(p.evi) << '\n';
    out << "rv_index," << num(p.rv_index) << '\n';
    out << "m_index," << num(p.m_index) << '\n';
    return out.str();
}

std::string run_crossing(const ScoringFunction& fn, double x0, double x1, const Distribution& f0,
                         const Distribution& f1, const CommonOptions& opts) {
    const CrossingResult r = crossing_lambda(fn, x0, x1, f0, f1, quad_options(opts));
    std::ostringstream out;
    out << "a,b,lambda_star,residual\n";
    out << num(r.a) << ',' << num(r.b) << ',' << num(r.lambda_star) << ',' << num(r.residual)
        << '\n';
    return out.str();
}

namespace {

std::string render_bound(const BoundReport& rep) {
    std::ostringstream out;
    out << "lambda,gap,bound,satisfied\n";
    for (const BoundRow& row : rep.rows) {
        out << num(row.lambda) << ',' << num(row.gap) << ',' << num(row.bound) << ','
            << (row.satisfied ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace

std::string run_bound(const ScoringRule& rule, const Distribution& f0, const Distribution& f1,
                      const std::vector<double>& lambdas, const CommonOptions& opts) {
    return render_bound(diagonal_bound_check(rule, f0, f1, lambdas, opts.tol_slack,
                                             quad_options(opts)));
}

std::string run_curve(const ScoringRule& rule, const Distribution& f0, const Distribution& f1,
                      const std::vector<double>& lambdas, const CommonOptions& opts) {
    return render_bound(score_gap_curve(rule, f0, f1, lambdas, opts.tol_slack,
                                        quad_options(opts)));
}

std::string run_epsilon(const ScoringRule& rule, Functional f, const Distribution& truth,
                        const Distribution& alt, const std::vector<double>& epsilons,
                        const CommonOptions& opts) {
    std::ostringstream out;
    out << "epsilon,d,lambda_eps,measured_gap,t_truth,t_construct,tail_verdict\n";
    for (double eps : epsilons) {
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw std::invalid_argument("epsilon must be positive and finite");
        const EpsilonConstruction c = epsilon_mixture(rule, f, truth, alt, eps, quad_options(opts));
        out << num(c.epsilon) << ',' << num(c.d) << ',' << num(c.lambda_eps) << ','
            << num(c.measured_gap) << ',' << num(c.t_truth) << ',' << num(c.t_construct) << ','
            << to_string(c.tail_verdict) << '\n';
    }
    return out.str();
}

std::string run_tailcmp(const Distribution& a, const Distribution& b) {
    const TailComparison cmp = tail_compare(a, b);
    std::ostringstream out;
    out << "verdict,ratio,probe_x,probe_ratio\n";
    if (cmp.probes.empty()) {
        out << to_string(cmp.verdict) << ',' << num(cmp.ratio) << ",undef,undef\n";
        return out.str();
    }
    for (const TailProbe& p : cmp.probes) {
        out << to_string(cmp.verdict) << ',' << num(cmp.ratio) << ',' << num(p.x) << ','
            << num(p.ratio) << '\n';
    }
    return out.str();
}

std::string run_power(const ScoringRule& rule, const Distribution& fa, const Distribution& fb,
                      const Distribution& g, const std::vector<long>& ns, int reps,
                      const CommonOptions& opts) {
    for (long n : ns)
        if (n < 2) throw std::invalid_argument("sample sizes must be at least 2");
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    const std::vector<PowerRow> rows =
        mc_power_study(rule, fa, fb, g, ns, reps, opts.seed, quad_options(opts));
    std::ostringstream out;
    out << "n,mean_diff,stderr,detect_frac\n";
    for (const PowerRow& row : rows) {
        out << row.n << ',' << num(row.mean_diff) << ',' << num(row.std_error) << ','
            << num(row.detect_frac) << '\n';
    }
    return out.str();
}

namespace {

struct CliState {
    CommonOptions common;
    std::string dist;
    std::string fn;
    std::string rule = "crps";
    std::string functional = "evi";
    std::string f0, f1, fa, fb, truth, alt, a, b;
    double x0 = 0.0;
    double x1 = 0.0;
    std::vector<double> bound_lambdas = {0.5, 0.25, 0.1, 0.01};
    std::vector<double> curve_lambdas = {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> epsilons = {0.1, 0.01, 0.001};
    std::vector<long> ns = {1000, 10000};
    int reps = 20;
};

void add_common(CLI::App* sub, CommonOptions& common) {
    sub->add_option("--tol-quad", common.tol_quad, "Quadrature absolute tolerance")
        ->capture_default_str();
    sub->add_option("--tol-slack", common.tol_slack, "Error-budget multiplier for satisfied flags")
        ->capture_default_str();
    sub->add_option("--seed", common.seed, "Monte Carlo seed")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliState st;
    CLI::App app{"Proper-score and tail-functional workbench"};
    app.require_subcommand(1);

    CLI::App* profile = app.add_subcommand("profile", "Tail profile of one distribution");
    profile->add_option("--dist", st.dist, "Distribution spec")->required();

    CLI::App* crossing =
        app.add_subcommand("crossing", "Mixture weight where the preferred report flips");
    crossing->add_option("--fn", st.fn, "Scoring function spec")->required();
    crossing->add_option("--x0", st.x0, "First report")->required();
    crossing->add_option("--x1", st.x1, "Second report")->required();
    crossing->add_option("--f0", st.f0, "Mixture end favouring x0")->required();
    crossing->add_option("--f1", st.f1, "Mixture end favouring x1")->required();

    CLI::App* bound =
        app.add_subcommand("bound", "Score gap of mix(f0,f1,lambda) against its divergence bound");
    bound->add_option("--rule", st.rule, "Scoring rule spec")->capture_default_str();
    bound->add_option("--f0", st.f0, "Truth")->required();
    bound->add_option("--f1", st.f1, "Contaminant")->required();
    bound->add_option("--lambdas", st.bound_lambdas, "Mixture weights in [0,1)")
        ->delimiter(',')
        ->capture_default_str();

    CLI::App* curve = app.add_subcommand("curve", "Score gap over a lambda sweep");
    curve->add_option("--rule", st.rule, "Scoring rule spec")->capture_default_str();
    curve->add_option("--f0", st.f0, "Truth")->required();
    curve->add_option("--f1", st.f1, "Contaminant")->required();
    curve->add_option("--lambdas", st.curve_lambdas, "Mixture weights in [0,1)")
        ->delimiter(',')
        ->capture_default_str();

    CLI::App* epsilon =
        app.add_subcommand("epsilon", "Near-optimal mixtures the functional still tells apart");
    epsilon->add_option("--rule", st.rule, "Scoring rule spec")->capture_default_str();
    epsilon->add_option("--functional", st.functional, "Functional name")->capture_default_str();
    epsilon->add_option("--truth", st.truth, "Truth")->required();
    epsilon->add_option("--alt", st.alt, "Alternative tail")->required();
    epsilon->add_option("--eps", st.epsilons, "Score-gap budgets")
        ->delimiter(',')
        ->capture_default_str();

    CLI::App* tailcmp = app.add_subcommand("tailcmp", "Order two distributions by tail weight");
    tailcmp->add_option("--a", st.a, "First distribution")->required();
    tailcmp->add_option("--b", st.b, "Second distribution")->required();

    CLI::App* power = app.add_subcommand("power", "Monte Carlo detection of a score difference");
    power->add_option("--rule", st.rule, "Scoring rule spec")->capture_default_str();
    power->add_option("--fa", st.fa, "First forecast")->required();
    power->add_option("--fb", st.fb, "Second forecast")->required();
    power->add_option("--truth", st.truth, "Data-generating distribution")->required();
    power->add_option("--n", st.ns, "Sample sizes")->delimiter(',')->capture_default_str();
    power->add_option("--reps", st.reps, "Replications per sample size")->capture_default_str();

    for (CLI::App* sub : {profile, crossing, bound, curve, epsilon, tailcmp, power})
        add_common(sub, st.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (profile->parsed()) {
            out << run_profile(parse_distribution(st.dist));
        } else if (crossing->parsed()) {
            out << run_crossing(parse_scoring_function(st.fn), st.x0, st.x1,
                                parse_distribution(st.f0), parse_distribution(st.f1), st.common);
        } else if (bound->parsed()) {
            out << run_bound(parse_scoring_rule(st.rule), parse_distribution(st.f0),
                             parse_distribution(st.f1), st.bound_lambdas, st.common);
        } else if (curve->parsed()) {
            out << run_curve(parse_scoring_rule(st.rule), parse_distribution(st.f0),
                             parse_distribution(st.f1), st.curve_lambdas, st.common);
        } else if (epsilon->parsed()) {
            out << run_epsilon(parse_scoring_rule(st.rule), parse_functional(st.functional),
                               parse_distribution(st.truth), parse_distribution(st.alt),
                               st.epsilons, st.common);
        } else if (tailcmp->parsed()) {
            out << run_tailcmp(parse_distribution(st.a), parse_distribution(st.b));
        } else if (power->parsed()) {
            out << run_power(parse_scoring_rule(st.rule), parse_distribution(st.fa),
                             parse_distribution(st.fb), parse_distribution(st.truth), st.ns,
                             st.reps, st.common);
        }
    } catch (const parse_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace tailscore
