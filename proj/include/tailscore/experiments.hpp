#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tailscore/distribution.hpp"
#include "tailscore/functionals.hpp"
#include "tailscore/lab.hpp"
#include "tailscore/scoring.hpp"

namespace tailscore {

struct CommonOptions {
    double tol_quad = 1e-9;
    double tol_slack = 10.0;
    std::uint64_t seed = 0;
};

// Each runner renders one experiment as CSV with a header line. Numbers
// print as %.17g so output round-trips; undefined values print as "undef".

// field,value
std::string run_profile(const Distribution& d);

// a,b,lambda_star,residual
std::string run_crossing(const ScoringFunction& fn, double x0, double x1, const Distribution& f0,
                         const Distribution& f1, const CommonOptions& opts = {});

// lambda,gap,bound,satisfied
std::string run_bound(const ScoringRule& rule, const Distribution& f0, const Distribution& f1,
                      const std::vector<double>& lambdas, const CommonOptions& opts = {});
std::string run_curve(const ScoringRule& rule, const Distribution& f0, const Distribution& f1,
                      const std::vector<double>& lambdas, const CommonOptions& opts = {});

// epsilon,d,lambda_eps,measured_gap,t_truth,t_construct,tail_verdict
std::string run_epsilon(const ScoringRule& rule, Functional f, const Distribution& truth,
                        const Distribution& alt, const std::vector<double>& epsilons,
                        const CommonOptions& opts = {});

// verdict,ratio,probe_x,probe_ratio (one row per probe)
std::string run_tailcmp(const Distribution& a, const Distribution& b);

// n,mean_diff,stderr,detect_frac
std::string run_power(const ScoringRule& rule, const Distribution& fa, const Distribution& fb,
                      const Distribution& g, const std::vector<long>& ns, int reps,
                      const CommonOptions& opts = {});

// Command-line front end. Returns the process exit status: 0 on success,
// 2 for unusable input (syntax or invalid parameters), 3 when a computation
// cannot meet its accuracy contract.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailscore
