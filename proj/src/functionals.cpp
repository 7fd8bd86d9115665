#include "tailscore/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "tailscore/error.hpp"
#include "tailscore/tail_profile.hpp"

namespace tailscore {

namespace {

// MIndex is read off numeric probes; the others are analytic and exact.
double tol_for(Functional f) { return f == Functional::MIndex ? 2e-3 : 0.0; }

bool close(double x, double y, double tol) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

bool at_least(double x, double y, double tol) { return close(x, y, tol) || x >= y; }

}  // namespace

const char* functional_name(Functional f) {
    switch (f) {
        case Functional::Mean: return "mean";
        case Functional::UpperEndpoint: return "upper_endpoint";
        case Functional::Evi: return "evi";
        case Functional::RvIndex: return "rv_index";
        case Functional::MIndex: return "m_index";
    }
    throw std::invalid_argument("unknown functional");
}

std::optional<double> evaluate(Functional f, const Distribution& d) {
    switch (f) {
        case Functional::Mean: return d.mean();
        case Functional::UpperEndpoint: return d.upper_endpoint();
        case Functional::Evi: return evi(d);
        case Functional::RvIndex: return rv_index(d);
        case Functional::MIndex: return m_index(d);
    }
    throw std::invalid_argument("unknown functional");
}

std::vector<AnalyticPair> analytic_pairs() {
    std::vector<AnalyticPair> v;
    const auto add = [&v](std::string label, Distribution a, Distribution b, TailVerdict verdict,
                          std::optional<double> ratio = std::nullopt) {
        v.push_back({std::move(label), std::move(a), std::move(b), verdict, ratio});
    };
    const Distribution par11{Family{Pareto{1.0, 1.0}}};
    const Distribution par21{Family{Pareto{2.0, 1.0}}};
    const Distribution exp1{Family{Exponential{1.0}}};
    const Distribution u01{Family{Uniform{0.0, 1.0}}};
    const Distribution u02{Family{Uniform{0.0, 2.0}}};

    add("pareto_alpha", par11, par21, TailVerdict::FirstHeavier);
    add("pareto_scale", par21, Distribution{Family{Pareto{2.0, 2.0}}},
        TailVerdict::TailEquivalent, 0.25);
    add("gpd_vs_pareto", Distribution{Family{GeneralizedPareto{0.5, 1.0, 0.0}}}, par21,
        TailVerdict::TailEquivalent, 4.0);
    add("exp_rates", exp1, Distribution{Family{Exponential{2.0}}}, TailVerdict::FirstHeavier);
    add("power_vs_exp", Distribution{Family{Pareto{3.0, 1.0}}}, exp1, TailVerdict::FirstHeavier);
    add("exp_vs_gauss", exp1, Distribution{Family{Normal{0.0, 1.0}}}, TailVerdict::FirstHeavier);
    add("gauss_scale", Distribution{Family{Normal{0.0, 2.0}}},
        Distribution{Family{Normal{0.0, 1.0}}}, TailVerdict::FirstHeavier);
    add("uniform_reach", u02, u01, TailVerdict::FirstHeavier);
    add("uniform_shared_end", u01, Distribution{Family{Uniform{0.5, 1.0}}},
        TailVerdict::TailEquivalent, 0.5);
    add("gev_vs_pareto", Distribution{Family{GeneralizedExtremeValue{0.5, 0.0, 1.0}}}, par21,
        TailVerdict::TailEquivalent, 4.0);
    add("gumbel_vs_exp", Distribution{Family{GeneralizedExtremeValue{0.0, 0.0, 1.0}}}, exp1,
        TailVerdict::TailEquivalent, 1.0);
    add("steep_end_vs_uniform", Distribution{Family{GeneralizedPareto{-0.5, 0.5, 0.0}}}, u01,
        TailVerdict::SecondHeavier);
    add("mix_vs_component", mix(exp1, par21, 0.3), par21, TailVerdict::TailEquivalent, 0.3);
    add("atom_above_interval", Distribution{Family{PointMass{3.0}}}, u01,
        TailVerdict::FirstHeavier);
    add("atom_at_shared_end", mix(u02, Distribution{Family{PointMass{2.0}}}, 0.25), u02,
        TailVerdict::FirstHeavier);
    return v;
}

RespectReport tail_order_respect_check(Functional f, const std::vector<AnalyticPair>& pairs,
                                       const std::vector<double>& lambdas) {
    RespectReport rep;
    const double tol = tol_for(f);
    for (const auto& pair : pairs) {
        const auto ta = evaluate(f, pair.a);
        const auto tb = evaluate(f, pair.b);
        if (!ta || !tb) {
            ++rep.pairs_skipped;
            continue;
        }
        bool ok = true;
        switch (pair.verdict) {
            case TailVerdict::FirstHeavier: ok = at_least(*ta, *tb, tol); break;
            case TailVerdict::SecondHeavier: ok = at_least(*tb, *ta, tol); break;
            case TailVerdict::TailEquivalent: ok = close(*ta, *tb, tol); break;
            case TailVerdict::Undetermined: break;
        }
        const double want = std::max(*ta, *tb);
        for (const double lambda : lambdas) {
            const auto tm = evaluate(f, mix(pair.a, pair.b, lambda));
            if (!tm || !close(*tm, want, tol)) {
                ok = false;
                break;
            }
        }
        ++rep.pairs_checked;
        if (!ok) ++rep.violations;
    }
    rep.passed = rep.violations == 0 && rep.pairs_checked > 0;
    return rep;
}

}  // namespace tailscore
