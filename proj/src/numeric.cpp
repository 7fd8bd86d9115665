#include "tailscore/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "tailscore/error.hpp"

namespace tailscore::numeric {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767,
    0.3818300505051189, 0.4179591836734694};

struct Panel {
    double a = 0.0, b = 0.0;
    double value = 0.0;
    double error = 0.0;
};

bool operator<(const Panel& x, const Panel& y) { return x.error < y.error; }

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    double fv1[7], fv2[7];
    const double fc = f(centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        fv1[jtw] = f(centr - hlgth * kXgk[jtw]);
        fv2[jtw] = f(centr + hlgth * kXgk[jtw]);
        const double fsum = fv1[jtw] + fv2[jtw];
        resg += kWg[j] * fsum;
        resk += kWgk[jtw] * fsum;
        resabs += kWgk[jtw] * (std::abs(fv1[jtw]) + std::abs(fv2[jtw]));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        fv1[jtwm1] = f(centr - hlgth * kXgk[jtwm1]);
        fv2[jtwm1] = f(centr + hlgth * kXgk[jtwm1]);
        const double fsum = fv1[jtwm1] + fv2[jtwm1];
        resk += kWgk[jtwm1] * fsum;
        resabs += kWgk[jtwm1] * (std::abs(fv1[jtwm1]) + std::abs(fv2[jtwm1]));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }

    const double ah = std::abs(hlgth);
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * hlgth;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / eps50) {
        err = std::max(eps50 * resabs, err);
    }
    p.error = err;
    if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
        throw numeric_error("quadrature: integrand produced a nonfinite value");
    }
    return p;
}

bool splittable(const Panel& p) {
    const double mid = 0.5 * (p.a + p.b);
    return mid > p.a && mid < p.b;
}

}  // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_panels) {
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw std::invalid_argument("integrate: endpoints must be finite");
    }
    if (!(abs_tol > 0.0)) {
        throw std::invalid_argument("integrate: abs_tol must be positive");
    }
    if (a == b) return {};
    if (a > b) {
        Integral r = integrate(f, b, a, abs_tol, max_panels);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel> active;
    active.push(eval_panel(f, a, b));
    double active_value = active.top().value;
    double active_error = active.top().error;
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    int panels = 1;

    while (!active.empty() && active_error + frozen_error > abs_tol &&
           panels < max_panels) {
        const Panel worst = active.top();
        active.pop();
        active_value -= worst.value;
        active_error -= worst.error;
        if (!splittable(worst)) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = eval_panel(f, worst.a, mid);
        const Panel right = eval_panel(f, mid, worst.b);
        active_value += left.value + right.value;
        active_error += left.error + right.error;
        active.push(left);
        active.push(right);
        ++panels;
    }

    Integral out;
    out.value = active_value + frozen_value;
    out.abs_error = active_error + frozen_error;
    if (out.abs_error > 1000.0 * abs_tol && panels >= max_panels) {
        throw numeric_error("quadrature: error estimate did not converge");
    }
    return out;
}

Integral integrate_segmented(const std::function<double(double)>& f,
                             const std::vector<double>& pts, double abs_tol,
                             int max_panels) {
    if (pts.size() < 2) return {};
    const double seg_tol = abs_tol / static_cast<double>(pts.size() - 1);
    Integral total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Integral seg = integrate(f, pts[i], pts[i + 1], seg_tol, max_panels);
        total.value += seg.value;
        total.abs_error += seg.abs_error;
    }
    return total;
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_survival(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation to the standard normal quantile,
// accurate to ~1e-9 before refinement.
double acklam(double p) {
    constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
    constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    }
    // Work on the lower half so cdf(x) retains full relative precision;
    // 1 - p is exact for p >= 0.5.
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;
    double x = acklam(q);
    for (int i = 0; i < 2; ++i) {
        const double d = normal_pdf(x);
        if (d <= 0.0) break;
        const double u = (normal_cdf(x) - q) / d;
        x -= u / (1.0 + 0.5 * x * u);  // Halley step
    }
    return flip ? -x : x;
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace

double uniform_draw(std::uint64_t seed, std::uint64_t i) {
    const std::uint64_t z = splitmix(seed + (i + 1) * 0x9E3779B97F4A7C15ull);
    // (z >> 11) + 0.5 in [0.5, 2^53 - 0.5]: strictly inside (0, 1) after scaling.
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix(seed ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull)));
}

double bisect_boundary(const std::function<bool(double)>& pred, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("bisect_boundary: requires lo < hi");
    while (true) {
        const double mid = std::midpoint(lo, hi);
        if (!(mid > lo && mid < hi)) break;
        if (pred(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace tailscore::numeric
