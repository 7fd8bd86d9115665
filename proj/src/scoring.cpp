#include "tailscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailscore/error.hpp"
#include "tailscore/numeric.hpp"

namespace tailscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double cut_of(const ScoringRule& rule) {
    if (const auto* w = std::get_if<WeightedCrps>(&rule)) {
        if (std::isnan(w->threshold)) {
            throw std::invalid_argument("weighted crps threshold must not be NaN");
        }
        return w->threshold;
    }
    return -kInf;
}

void require_finite_mean(const Distribution& d, const char* role) {
    if (!d.has_finite_moment(1)) {
        throw numeric_error(std::string(role) + " must have a finite mean");
    }
}

// Compensated sum; exact cancellation of matched coefficients survives.
double neumaier(std::vector<double> v) {
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    double s = 0.0, c = 0.0;
    for (const double x : v) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    return s + c;
}

// Truncation window: exact endpoints where finite, deep quantiles where not.
// lower_open / upper_open flag the sides that still hide tail_mass-level mass.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
    bool lower_open = false;
    bool upper_open = false;
};

template <typename Range>
Window window_over(const Range& dists, double cut, double tail_mass) {
    Window w{kInf, -kInf, false, false};
    for (const Distribution* d : dists) {
        const double le = d->lower_endpoint();
        const double ue = d->upper_endpoint();
        if (std::isfinite(le)) {
            w.lo = std::min(w.lo, le);
        } else {
            w.lower_open = true;
            w.lo = std::min(w.lo, d->quantile(tail_mass));
        }
        if (std::isfinite(ue)) {
            w.hi = std::max(w.hi, ue);
        } else {
            w.upper_open = true;
            w.hi = std::max(w.hi, d->quantile(1.0 - tail_mass));
        }
    }
    if (cut >= w.lo) {
        w.lo = cut;
        w.lower_open = false;  // mass below the cut is outside the score by definition
    }
    if (w.hi < w.lo) w.hi = w.lo;
    return w;
}

// Quantiles at survival levels 1e-2..1e-10 of each open tail. Splitting
// there keeps every segment's dynamic range bounded; otherwise a panel
// stretching to the truncation point can sample past all the mass and
// report a spuriously small error.
template <typename Range>
void push_tail_ladder(const Range& dists, std::vector<double>& pts) {
    for (const Distribution* d : dists) {
        if (!std::isfinite(d->upper_endpoint())) {
            for (int k = 2; k <= 10; k += 2) pts.push_back(d->quantile(1.0 - std::pow(10.0, -k)));
        }
        if (!std::isfinite(d->lower_endpoint())) {
            for (int k = 2; k <= 10; k += 2) pts.push_back(d->quantile(std::pow(10.0, -k)));
        }
    }
}

template <typename Range>
std::vector<double> seg_points(const Range& dists, const Window& w) {
    std::vector<double> pts{w.lo, w.hi};
    std::vector<double> inner;
    for (const Distribution* d : dists) {
        for (const double k : d->kinks()) inner.push_back(k);
    }
    push_tail_ladder(dists, inner);
    for (const double k : inner) {
        if (k > w.lo && k < w.hi) pts.push_back(k);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

struct Strip {
    double value = 0.0;
    double error = 0.0;
};

// Mass of the integrand (F-G)^2 + G(1-G) over [u, inf): the G(1-G) part is
// restored from the analytic tail mass, the rest enters as half-width bounds.
Strip upper_strip(const Distribution& f, const Distribution& g, double u) {
    const Bounded umf = f.upper_tail_mass(u);
    const Bounded umg = g.upper_tail_mass(u);
    const double fs = f.survival(u);
    const double gs = g.survival(u);
    const double gg = 0.5 * gs * umg.value;
    const double cross = 0.5 * (fs + gs) * (umf.value + umg.value);
    return {umg.value - gg + cross, umg.error + umf.error + gg + cross};
}

// Counterpart over (-inf, l], restricted to [cut, l] when the cut is finite.
Strip lower_strip(const Distribution& f, const Distribution& g, double l, double cut) {
    Bounded lmf = f.lower_tail_mass(l);
    Bounded lmg = g.lower_tail_mass(l);
    if (std::isfinite(cut)) {
        const Bounded cf = f.lower_tail_mass(cut);
        const Bounded cg = g.lower_tail_mass(cut);
        lmf.value = std::max(0.0, lmf.value - cf.value);
        lmf.error += cf.error;
        lmg.value = std::max(0.0, lmg.value - cg.value);
        lmg.error += cg.error;
    }
    const double fc = f.cdf(l);
    const double gc = g.cdf(l);
    const double gg = 0.5 * gc * lmg.value;
    const double cross = 0.5 * (fc + gc) * (lmf.value + lmg.value);
    return {lmg.value - gg + cross, lmg.error + lmf.error + gg + cross};
}

// Exact integral for two step cdfs: constant between consecutive atoms.
ExpectedScore step_pair(const Distribution& f, const Distribution& g, double cut) {
    std::vector<double> xs;
    for (const auto& [x, w] : f.step_atoms()) xs.push_back(x);
    for (const auto& [x, w] : g.step_atoms()) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> pts;
    if (std::isfinite(cut)) {
        pts.push_back(cut);
        for (const double x : xs) {
            if (x > cut) pts.push_back(x);
        }
    } else {
        pts = xs;
    }

    double value = 0.0, absum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double fc = f.cdf(a), gc = g.cdf(a);
        const double fs = f.survival(a), gs = g.survival(a);
        const double d = (fc + gc <= 1.0) ? fc - gc : gs - fs;
        const double term = (d * d + gc * gs) * (pts[i + 1] - a);
        value += term;
        absum += std::abs(term);
    }
    return {value, 64.0 * kEps * absum, Method::ClosedForm, 0, 0.0};
}

// Shared quadrature core for S(f, g) = integral of (F-G)^2 + G(1-G) above the cut.
ExpectedScore expected_pair(const Distribution& f, const Distribution& g, double cut,
                            const QuadOptions& opts) {
    require_finite_mean(f, "forecast");
    require_finite_mean(g, "truth");
    if (f.is_step() && g.is_step()) return step_pair(f, g, cut);

    const std::vector<const Distribution*> ds{&f, &g};
    const Window w = window_over(ds, cut, opts.tail_mass);

    double value = 0.0, err = 0.0;
    if (w.hi > w.lo) {
        const auto pts = seg_points(ds, w);
        const auto integrand = [&](double x) {
            const double fc = f.cdf(x), gc = g.cdf(x);
            const double fs = f.survival(x), gs = g.survival(x);
            const double d = (fc + gc <= 1.0) ? fc - gc : gs - fs;
            return d * d + gc * gs;
        };
        const numeric::Integral q =
            numeric::integrate_segmented(integrand, pts, opts.abs_tol, opts.max_panels);
        value = q.value;
        err = q.abs_error;
    }
    if (w.upper_open) {
        const Strip s = upper_strip(f, g, w.hi);
        value += s.value;
        err += s.error;
    }
    if (w.lower_open) {
        const Strip s = lower_strip(f, g, w.lo, cut);
        value += s.value;
        err += s.error;
    }
    return {value, err, Method::Quadrature, 0, 0.0};
}

// Realized-score engine for point outcomes; the forecast-side window, kinks,
// and tail masses are computed once so repeated calls stay cheap.
class PointEngine {
  public:
    PointEngine(const ScoringRule& rule, const Distribution& f, const QuadOptions& opts)
        : f_(f), opts_(opts), cut_(cut_of(rule)) {
        require_finite_mean(f, "forecast");
        const double le = f.lower_endpoint();
        const double ue = f.upper_endpoint();
        lopen_ = !std::isfinite(le);
        uopen_ = !std::isfinite(ue);
        lo_ = lopen_ ? f.quantile(opts.tail_mass) : le;
        hi_ = uopen_ ? f.quantile(1.0 - opts.tail_mass) : ue;
        kinks_ = f.kinks();
        push_tail_ladder(std::vector<const Distribution*>{&f}, kinks_);
        std::sort(kinks_.begin(), kinks_.end());
        if (uopen_) {
            um_ = f.upper_tail_mass(hi_);
            fs_hi_ = f.survival(hi_);
        }
        if (lopen_) {
            lm_ = f.lower_tail_mass(lo_);
            fc_lo_ = f.cdf(lo_);
        }
    }

    ExpectedScore at(double y) const {
        if (!std::isfinite(y)) throw std::invalid_argument("outcome must be finite");
        double lo = std::min(lo_, y), hi = std::max(hi_, y);
        bool lopen = lopen_, uopen = uopen_;
        if (cut_ >= lo) {
            lo = cut_;
            lopen = false;
        }
        if (hi < lo) hi = lo;

        double value = 0.0, err = 0.0;
        if (hi > lo) {
            std::vector<double> pts{lo, hi};
            if (y > lo && y < hi) pts.push_back(y);
            for (const double k : kinks_) {
                if (k > lo && k < hi) pts.push_back(k);
            }
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            const auto integrand = [&](double x) {
                if (x >= y) {
                    const double fs = f_.survival(x);
                    return fs * fs;
                }
                const double fc = f_.cdf(x);
                return fc * fc;
            };
            const numeric::Integral q =
                numeric::integrate_segmented(integrand, pts, opts_.abs_tol, opts_.max_panels);
            value = q.value;
            err = q.abs_error;
        }
        if (uopen) {  // beyond hi the integrand is survival^2, y being below
            const Bounded um = (hi == hi_) ? um_ : f_.upper_tail_mass(hi);
            const double fs = (hi == hi_) ? fs_hi_ : f_.survival(hi);
            const double bound = fs * um.value;
            value += 0.5 * bound;
            err += fs * um.error + 0.5 * bound;
        }
        if (lopen) {  // below lo the integrand is cdf^2, y being above
            const Bounded lm = (lo == lo_) ? lm_ : f_.lower_tail_mass(lo);
            const double fc = (lo == lo_) ? fc_lo_ : f_.cdf(lo);
            const double bound = fc * lm.value;
            value += 0.5 * bound;
            err += fc * lm.error + 0.5 * bound;
        }
        return {value, err, Method::Quadrature, 0, 0.0};
    }

  private:
    const Distribution& f_;
    QuadOptions opts_;
    double cut_;
    double lo_ = 0.0, hi_ = 0.0;
    bool lopen_ = false, uopen_ = false;
    std::vector<double> kinks_;
    Bounded um_, lm_;
    double fs_hi_ = 0.0, fc_lo_ = 0.0;
};

// Signed combination of family cdfs with exactly merged coefficients.
// Above xswitch it evaluates through survivals: the coefficients sum to
// resid (near zero), so the huge common part cancels symbolically.
struct SignedCombo {
    const std::vector<Distribution>* singles = nullptr;
    std::vector<double> coeffs;
    double resid = 0.0;
    double xswitch = 0.0;

    bool empty() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
    }

    double operator()(double x) const {
        if (x < xswitch) {
            double s = 0.0;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                if (coeffs[i] != 0.0) s += coeffs[i] * (*singles)[i].cdf(x);
            }
            return s;
        }
        double s = resid;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] != 0.0) s -= coeffs[i] * (*singles)[i].survival(x);
        }
        return s;
    }
};

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::ClosedForm: return "closed_form";
        case Method::Quadrature: return "quadrature";
        case Method::MonteCarlo: return "monte_carlo";
    }
    throw std::invalid_argument("unknown method");
}

ExpectedScore score_rule(const ScoringRule& rule, const Distribution& f, double y,
                         const QuadOptions& opts) {
    if (!std::isfinite(y)) throw std::invalid_argument("outcome must be finite");
    if (f.is_step()) {
        return step_pair(f, Distribution{Family{PointMass{y}}}, cut_of(rule));
    }
    return PointEngine(rule, f, opts).at(y);
}

ExpectedScore expected_score_rule(const ScoringRule& rule, const Distribution& f,
                                  const Distribution& g, const QuadOptions& opts) {
    return expected_pair(f, g, cut_of(rule), opts);
}

ExpectedScore expected_score_diff(const ScoringRule& rule, const Distribution& fa,
                                  const Distribution& fb, const Distribution& g,
                                  const QuadOptions& opts) {
    require_finite_mean(fa, "forecast");
    require_finite_mean(fb, "forecast");
    require_finite_mean(g, "truth");
    const double cut = cut_of(rule);

    // Unique families across all three distributions, with per-family
    // coefficient lists for d1 = Fa - Fb and d2 = Fa + Fb - 2G.
    std::vector<Distribution> singles;
    std::vector<std::vector<double>> raw1, raw2;
    const auto add = [&](const Distribution& d, double scale, bool first) {
        for (const auto& part : d.parts()) {
            std::size_t slot = singles.size();
            for (std::size_t i = 0; i < singles.size(); ++i) {
                if (family_equal(singles[i].parts()[0].family, part.family)) {
                    slot = i;
                    break;
                }
            }
            if (slot == singles.size()) {
                singles.emplace_back(part.family);
                raw1.emplace_back();
                raw2.emplace_back();
            }
            (first ? raw1 : raw2)[slot].push_back(scale * part.weight);
        }
    };
    add(fa, 1.0, true);
    add(fb, -1.0, true);
    add(fa, 1.0, false);
    add(fb, 1.0, false);
    add(g, -2.0, false);

    SignedCombo d1{&singles, {}, 0.0, 0.0};
    SignedCombo d2{&singles, {}, 0.0, 0.0};
    for (std::size_t i = 0; i < singles.size(); ++i) {
        d1.coeffs.push_back(neumaier(raw1[i]));
        d2.coeffs.push_back(neumaier(raw2[i]));
    }
    if (d1.empty() || d2.empty()) return {0.0, 0.0, Method::ClosedForm, 0, 0.0};
    d1.resid = neumaier(d1.coeffs);
    d2.resid = neumaier(d2.coeffs);

    std::vector<const Distribution*> involved;
    for (std::size_t i = 0; i < singles.size(); ++i) {
        if (d1.coeffs[i] != 0.0 || d2.coeffs[i] != 0.0) involved.push_back(&singles[i]);
    }
    double xswitch = -kInf;
    for (const Distribution* d : involved) xswitch = std::max(xswitch, d->quantile(0.5));
    d1.xswitch = xswitch;
    d2.xswitch = xswitch;

    const Window w = window_over(involved, cut, opts.tail_mass);
    double value = 0.0, err = 0.0;
    if (w.hi > w.lo) {
        const auto pts = seg_points(involved, w);
        const auto integrand = [&](double x) { return d1(x) * d2(x); };
        const numeric::Integral q = numeric::integrate_segmented(
            integrand, pts, std::min(opts.abs_tol, 1e-12), opts.max_panels);
        value = q.value;
        err = q.abs_error;
    }
    if (w.upper_open) {
        double sup1 = std::abs(d1.resid), int2 = 0.0;
        for (std::size_t i = 0; i < singles.size(); ++i) {
            sup1 += std::abs(d1.coeffs[i]) * singles[i].survival(w.hi);
            if (d2.coeffs[i] != 0.0) {
                const Bounded um = singles[i].upper_tail_mass(w.hi);
                int2 += std::abs(d2.coeffs[i]) * (um.value + um.error);
            }
        }
        err += sup1 * int2;
    }
    if (w.lower_open) {
        double sup1 = 0.0, int2 = 0.0;
        for (std::size_t i = 0; i < singles.size(); ++i) {
            sup1 += std::abs(d1.coeffs[i]) * singles[i].cdf(w.lo);
            if (d2.coeffs[i] != 0.0) {
                const Bounded lm = singles[i].lower_tail_mass(w.lo);
                int2 += std::abs(d2.coeffs[i]) * (lm.value + lm.error);
            }
        }
        err += sup1 * int2;
    }
    return {value, err, Method::Quadrature, 0, 0.0};
}

namespace {

double pow_int(double y, int k) {
    switch (k) {
        case 1: return y;
        case 2: return y * y;
        case 3: return y * y * y;
        default: throw std::invalid_argument("squared error power must be 1, 2, or 3");
    }
}

double check_level(double level) {
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("pinball level must lie in (0, 1)");
    }
    return level;
}

}  // namespace

double score_fn(const ScoringFunction& fn, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("report and outcome must be finite");
    }
    return std::visit(
        overloaded{[&](const SquaredError& se) {
                       const double t = x - pow_int(y, se.power);
                       return t * t;
                   },
                   [&](const Pinball& pb) {
                       const double ind = (y <= x) ? 1.0 : 0.0;
                       return (ind - check_level(pb.level)) * (x - y);
                   }},
        fn);
}

ExpectedScore expected_score_fn(const ScoringFunction& fn, double x, const Distribution& g,
                                const QuadOptions&) {
    if (!std::isfinite(x)) throw std::invalid_argument("report must be finite");
    return std::visit(
        overloaded{
            [&](const SquaredError& se) -> ExpectedScore {
                if (se.power < 1 || se.power > 3) {
                    throw std::invalid_argument("squared error power must be 1, 2, or 3");
                }
                if (!g.has_finite_moment(2 * se.power)) {
                    throw numeric_error("truth must have finite moment of order twice the power");
                }
                const double mk = g.moment(se.power);
                const double m2k = g.moment(2 * se.power);
                const double a = x - mk;
                const double vark = std::max(0.0, m2k - mk * mk);
                const double value = a * a + vark;
                const double err = 16.0 * kEps * (a * a + vark + std::abs(m2k) + mk * mk);
                return {value, err, Method::ClosedForm, 0, 0.0};
            },
            [&](const Pinball& pb) -> ExpectedScore {
                check_level(pb.level);
                require_finite_mean(g, "truth");
                const Bounded lm = g.lower_tail_mass(x);  // E max(x - Y, 0)
                const double m1 = g.mean();
                const double value = lm.value - pb.level * (x - m1);
                const double err =
                    lm.error + 16.0 * kEps * (lm.value + std::abs(x) + std::abs(m1));
                return {value, err, Method::ClosedForm, 0, 0.0};
            }},
        fn);
}

namespace {

// One realized score per draw, cached engine when the forecast is continuous.
class DrawScorer {
  public:
    DrawScorer(const ScoringRule& rule, const Distribution& f, const QuadOptions& opts)
        : f_(f), cut_(cut_of(rule)) {
        if (!f.is_step()) engine_.emplace(rule, f, opts);
    }
    ExpectedScore at(double y) const {
        if (engine_) return engine_->at(y);
        return step_pair(f_, Distribution{Family{PointMass{y}}}, cut_);
    }

  private:
    const Distribution& f_;
    double cut_;
    std::optional<PointEngine> engine_;
};

template <typename Eval>
ExpectedScore welford_mc(const std::vector<double>& ys, const Eval& eval) {
    double mean = 0.0, m2 = 0.0, errsum = 0.0;
    long k = 0;
    for (const double y : ys) {
        const auto [v, e] = eval(y);
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
        errsum += e;
    }
    const long n = k;
    const double std_error =
        n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : kInf;
    return {mean, errsum / static_cast<double>(n), Method::MonteCarlo, n, std_error};
}

// Sampling error dominates; per-draw quadrature only needs to stay below it.
QuadOptions mc_quad_options(const QuadOptions& opts) {
    QuadOptions per = opts;
    per.abs_tol = std::max(opts.abs_tol, 1e-7);
    return per;
}

}  // namespace

ExpectedScore mc_expected_score(const ScoringRule& rule, const Distribution& f,
                                const Distribution& g, long n, std::uint64_t seed,
                                const QuadOptions& opts) {
    if (n < 1) throw std::invalid_argument("sample count must be positive");
    require_finite_mean(g, "truth");
    const QuadOptions per = mc_quad_options(opts);
    const DrawScorer scorer(rule, f, per);
    const std::vector<double> ys = g.sample(static_cast<std::size_t>(n), seed);
    return welford_mc(ys, [&](double y) {
        const ExpectedScore s = scorer.at(y);
        return std::pair{s.value, s.abs_error};
    });
}

ExpectedScore mc_expected_score_diff(const ScoringRule& rule, const Distribution& fa,
                                     const Distribution& fb, const Distribution& g, long n,
                                     std::uint64_t seed, const QuadOptions& opts) {
    if (n < 1) throw std::invalid_argument("sample count must be positive");
    require_finite_mean(g, "truth");
    const QuadOptions per = mc_quad_options(opts);
    const DrawScorer sa(rule, fa, per);
    const DrawScorer sb(rule, fb, per);
    const std::vector<double> ys = g.sample(static_cast<std::size_t>(n), seed);
    return welford_mc(ys, [&](double y) {
        const ExpectedScore a = sa.at(y);
        const ExpectedScore b = sb.at(y);
        return std::pair{a.value - b.value, a.abs_error + b.abs_error};
    });
}

}  // namespace tailscore
