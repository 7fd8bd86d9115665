#include "tailscore/tail_order.hpp"

#include <cmath>
#include <limits>

namespace tailscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tail shape at the upper endpoint, with a multiplicative constant so that
//   PowerEnd: survival ~ C (endpoint - x)^idx   as x -> endpoint
//   RegVar:   survival ~ C x^idx                as x -> inf (idx < 0)
//   ExpType:  survival ~ C exp(-idx x)          as x -> inf (idx = rate)
//   Gauss:    survival ~ normal tail with scale gsigma, location gmu, weight C
enum class Kind { Gauss = 0, ExpType = 1, RegVar = 2, PowerEnd = 3 };

struct Sig {
    double endpoint = kInf;
    Kind kind = Kind::RegVar;
    double idx = 0.0;
    double gsigma = 0.0;
    double gmu = 0.0;
    double constant = 1.0;
};

Sig fam_signature(const Family& f, double weight) {
    Sig s;
    s.constant = weight;
    if (const auto* p = std::get_if<Pareto>(&f)) {
        s.kind = Kind::RegVar;
        s.idx = -p->alpha;
        s.constant = weight * std::pow(p->scale, p->alpha);
    } else if (const auto* g = std::get_if<GeneralizedPareto>(&f)) {
        if (g->gamma > 0.0) {
            s.kind = Kind::RegVar;
            s.idx = -1.0 / g->gamma;
            s.constant = weight * std::pow(g->sigma / g->gamma, 1.0 / g->gamma);
        } else if (g->gamma == 0.0) {
            s.kind = Kind::ExpType;
            s.idx = 1.0 / g->sigma;
            s.constant = weight * std::exp(g->mu / g->sigma);
        } else {
            s.endpoint = g->mu - g->sigma / g->gamma;
            s.kind = Kind::PowerEnd;
            s.idx = -1.0 / g->gamma;
            s.constant = weight * std::pow(-g->gamma / g->sigma, -1.0 / g->gamma);
        }
    } else if (const auto* g = std::get_if<GeneralizedExtremeValue>(&f)) {
        if (g->gamma > 0.0) {
            s.kind = Kind::RegVar;
            s.idx = -1.0 / g->gamma;
            s.constant = weight * std::pow(g->sigma / g->gamma, 1.0 / g->gamma);
        } else if (g->gamma == 0.0) {
            s.kind = Kind::ExpType;
            s.idx = 1.0 / g->sigma;
            s.constant = weight * std::exp(g->mu / g->sigma);
        } else {
            s.endpoint = g->mu - g->sigma / g->gamma;
            s.kind = Kind::PowerEnd;
            s.idx = -1.0 / g->gamma;
            s.constant = weight * std::pow(-g->gamma / g->sigma, -1.0 / g->gamma);
        }
    } else if (const auto* e = std::get_if<Exponential>(&f)) {
        s.kind = Kind::ExpType;
        s.idx = e->rate;
    } else if (const auto* u = std::get_if<Uniform>(&f)) {
        s.endpoint = u->upper;
        s.kind = Kind::PowerEnd;
        s.idx = 1.0;
        s.constant = weight / (u->upper - u->lower);
    } else if (const auto* n = std::get_if<Normal>(&f)) {
        s.kind = Kind::Gauss;
        s.gsigma = n->sigma;
        s.gmu = n->mu;
    } else if (const auto* pm = std::get_if<PointMass>(&f)) {
        s.endpoint = pm->c;
        s.kind = Kind::PowerEnd;
        s.idx = 0.0;
    } else if (const auto* em = std::get_if<Empirical>(&f)) {
        const double top = em->sample.back();
        std::size_t count = 0;
        for (auto it = em->sample.rbegin(); it != em->sample.rend() && *it == top; ++it) {
            ++count;
        }
        s.endpoint = top;
        s.kind = Kind::PowerEnd;
        s.idx = 0.0;
        s.constant = weight * static_cast<double>(count) /
                     static_cast<double>(em->sample.size());
    }
    return s;
}

// Orders by right-tail weight ignoring constants: +1 when a is heavier,
// -1 when b is, 0 when the tails differ only by a constant factor.
int heavier(const Sig& a, const Sig& b) {
    if (a.endpoint != b.endpoint) return a.endpoint > b.endpoint ? 1 : -1;
    if (a.endpoint != kInf) {  // shared finite endpoint: smaller power is heavier
        if (a.idx != b.idx) return a.idx < b.idx ? 1 : -1;
        return 0;
    }
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind) ? 1 : -1;
    switch (a.kind) {
        case Kind::RegVar:
            if (a.idx != b.idx) return a.idx > b.idx ? 1 : -1;
            return 0;
        case Kind::ExpType:
            if (a.idx != b.idx) return a.idx < b.idx ? 1 : -1;
            return 0;
        case Kind::Gauss:
            if (a.gsigma != b.gsigma) return a.gsigma > b.gsigma ? 1 : -1;
            if (a.gmu != b.gmu) return a.gmu > b.gmu ? 1 : -1;
            return 0;
        default:
            return 0;
    }
}

// Dominant tail of a mixture: the heaviest part, with the constants of all
// tail-equivalent parts summed.
Sig signature(const Distribution& d) {
    Sig best;
    bool have = false;
    for (const auto& part : d.parts()) {
        const Sig s = fam_signature(part.family, part.weight);
        if (!have) {
            best = s;
            have = true;
            continue;
        }
        const int cmp = heavier(s, best);
        if (cmp > 0) {
            best = s;
        } else if (cmp == 0) {
            best.constant += s.constant;
        }
    }
    return best;
}

// Last-three probe ratios within rel 1e-3 of each other.
bool probes_stable(const std::vector<double>& r) {
    const std::size_t n = r.size();
    if (n < 3) return false;
    const double v = r[n - 1];
    if (!std::isfinite(v) || v <= 0.0) return false;
    return std::abs(r[n - 1] - r[n - 2]) <= 1e-3 * v &&
           std::abs(r[n - 2] - r[n - 3]) <= 1e-3 * v;
}

// Numeric reading of the probe trail: FirstHeavier / SecondHeavier past the
// 1e+-6 thresholds, TailEquivalent when the trail has stabilized.
std::optional<TailVerdict> classify_probes(const std::vector<TailProbe>& probes) {
    std::vector<double> valid;
    for (const auto& p : probes) {
        if (!std::isnan(p.ratio)) valid.push_back(p.ratio);
    }
    if (valid.empty()) return std::nullopt;
    if (probes_stable(valid)) return TailVerdict::TailEquivalent;
    const double last = valid.back();
    if (last >= 1e6) return TailVerdict::FirstHeavier;
    if (last <= 1e-6) return TailVerdict::SecondHeavier;
    return std::nullopt;
}

}  // namespace

std::string to_string(TailVerdict v) {
    switch (v) {
        case TailVerdict::FirstHeavier: return "first_heavier";
        case TailVerdict::SecondHeavier: return "second_heavier";
        case TailVerdict::TailEquivalent: return "tail_equivalent";
        default: return "undetermined";
    }
}

TailComparison tail_compare(const Distribution& a, const Distribution& b) {
    const Sig sa = signature(a);
    const Sig sb = signature(b);
    const int cmp = heavier(sa, sb);

    TailComparison out;
    if (cmp > 0) {
        out.verdict = TailVerdict::FirstHeavier;
    } else if (cmp < 0) {
        out.verdict = TailVerdict::SecondHeavier;
    } else {
        out.verdict = TailVerdict::TailEquivalent;
        out.ratio = sa.constant / sb.constant;
    }

    const Distribution& lead = cmp >= 0 ? a : b;
    for (int k = 1; k <= 12; ++k) {
        TailProbe probe;
        probe.k = k;
        probe.x = lead.quantile(1.0 - std::pow(10.0, -k));
        const double su = a.survival(probe.x);
        const double sv = b.survival(probe.x);
        if (su == 0.0 && sv == 0.0) {
            probe.ratio = std::numeric_limits<double>::quiet_NaN();
        } else if (sv == 0.0) {
            probe.ratio = kInf;
        } else {
            probe.ratio = su / sv;
        }
        out.probes.push_back(probe);
    }

    // Demote only on a direct contradiction; the probes cannot tell slow
    // divergence apart from equivalence within twelve decades.
    const auto numeric = classify_probes(out.probes);
    if (numeric &&
        ((out.verdict == TailVerdict::FirstHeavier &&
          *numeric == TailVerdict::SecondHeavier) ||
         (out.verdict == TailVerdict::SecondHeavier &&
          *numeric == TailVerdict::FirstHeavier))) {
        out.verdict = TailVerdict::Undetermined;
        out.ratio.reset();
    }
    return out;
}

std::optional<double> tail_equivalent(const Distribution& a, const Distribution& b) {
    const TailComparison c = tail_compare(a, b);
    if (c.verdict == TailVerdict::TailEquivalent) return c.ratio;
    return std::nullopt;
}

}  // namespace tailscore
