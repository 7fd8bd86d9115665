#include "tailscore/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tailscore/numeric.hpp"

namespace tailscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEuler = 0.5772156649015329;
// zeta(2) .. zeta(6), used by the Gumbel cumulant recursion.
constexpr double kZeta[5] = {1.6449340668482264, 1.2020569031595943,
                             1.0823232337111382, 1.0369277551433699,
                             1.0173430619844491};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

void validate(const Family& f) {
    std::visit(
        overloaded{
            [](const Pareto& p) {
                if (!(finite(p.alpha) && p.alpha > 0.0))
                    throw std::invalid_argument("pareto: alpha must be positive");
                if (!(finite(p.scale) && p.scale > 0.0))
                    throw std::invalid_argument("pareto: scale must be positive");
            },
            [](const GeneralizedPareto& g) {
                if (!finite(g.gamma)) throw std::invalid_argument("gpd: gamma must be finite");
                if (!(finite(g.sigma) && g.sigma > 0.0))
                    throw std::invalid_argument("gpd: sigma must be positive");
                if (!finite(g.mu)) throw std::invalid_argument("gpd: mu must be finite");
            },
            [](const GeneralizedExtremeValue& g) {
                if (!finite(g.gamma)) throw std::invalid_argument("gev: gamma must be finite");
                if (!(finite(g.sigma) && g.sigma > 0.0))
                    throw std::invalid_argument("gev: sigma must be positive");
                if (!finite(g.mu)) throw std::invalid_argument("gev: mu must be finite");
            },
            [](const Exponential& e) {
                if (!(finite(e.rate) && e.rate > 0.0))
                    throw std::invalid_argument("exp: rate must be positive");
            },
            [](const Uniform& u) {
                if (!(finite(u.lower) && finite(u.upper) && u.lower < u.upper))
                    throw std::invalid_argument("unif: requires a < b");
            },
            [](const Normal& n) {
                if (!finite(n.mu)) throw std::invalid_argument("norm: mu must be finite");
                if (!(finite(n.sigma) && n.sigma > 0.0))
                    throw std::invalid_argument("norm: sigma must be positive");
            },
            [](const PointMass& p) {
                if (!finite(p.c)) throw std::invalid_argument("point: c must be finite");
            },
            [](const Empirical& e) {
                if (e.sample.empty())
                    throw std::invalid_argument("emp: sample must be nonempty");
                for (double v : e.sample) {
                    if (!finite(v))
                        throw std::invalid_argument("emp: sample values must be finite");
                }
            }},
        f);
}

double fam_cdf(const Family& f, double x) {
    return std::visit(
        overloaded{
            [x](const Pareto& p) {
                if (x <= p.scale) return 0.0;
                return -std::expm1(p.alpha * std::log(p.scale / x));
            },
            [x](const GeneralizedPareto& g) {
                const double z = (x - g.mu) / g.sigma;
                if (z <= 0.0) return 0.0;
                if (g.gamma == 0.0) return -std::expm1(-z);
                const double t = 1.0 + g.gamma * z;
                if (t <= 0.0) return 1.0;  // past the finite endpoint, gamma < 0
                return -std::expm1(-std::log(t) / g.gamma);
            },
            [x](const GeneralizedExtremeValue& g) {
                const double z = (x - g.mu) / g.sigma;
                double v;
                if (g.gamma == 0.0) {
                    v = std::exp(-z);
                } else {
                    const double t = 1.0 + g.gamma * z;
                    if (t <= 0.0) return g.gamma > 0.0 ? 0.0 : 1.0;
                    v = std::pow(t, -1.0 / g.gamma);
                }
                return std::exp(-v);
            },
            [x](const Exponential& e) {
                if (x <= 0.0) return 0.0;
                return -std::expm1(-e.rate * x);
            },
            [x](const Uniform& u) {
                if (x <= u.lower) return 0.0;
                if (x >= u.upper) return 1.0;
                return (x - u.lower) / (u.upper - u.lower);
            },
            [x](const Normal& n) { return numeric::normal_cdf((x - n.mu) / n.sigma); },
            [x](const PointMass& p) { return x >= p.c ? 1.0 : 0.0; },
            [x](const Empirical& e) {
                const auto it = std::upper_bound(e.sample.begin(), e.sample.end(), x);
                return static_cast<double>(it - e.sample.begin()) /
                       static_cast<double>(e.sample.size());
            }},
        f);
}

double fam_survival(const Family& f, double x) {
    return std::visit(
        overloaded{
            [x](const Pareto& p) {
                if (x <= p.scale) return 1.0;
                return std::pow(p.scale / x, p.alpha);
            },
            [x](const GeneralizedPareto& g) {
                const double z = (x - g.mu) / g.sigma;
                if (z <= 0.0) return 1.0;
                if (g.gamma == 0.0) return std::exp(-z);
                const double t = 1.0 + g.gamma * z;
                if (t <= 0.0) return 0.0;
                return std::pow(t, -1.0 / g.gamma);
            },
            [x](const GeneralizedExtremeValue& g) {
                const double z = (x - g.mu) / g.sigma;
                double v;
                if (g.gamma == 0.0) {
                    v = std::exp(-z);
                } else {
                    const double t = 1.0 + g.gamma * z;
                    if (t <= 0.0) return g.gamma > 0.0 ? 1.0 : 0.0;
                    v = std::pow(t, -1.0 / g.gamma);
                }
                return -std::expm1(-v);
            },
            [x](const Exponential& e) {
                if (x <= 0.0) return 1.0;
                return std::exp(-e.rate * x);
            },
            [x](const Uniform& u) {
                if (x <= u.lower) return 1.0;
                if (x >= u.upper) return 0.0;
                return (u.upper - x) / (u.upper - u.lower);
            },
            [x](const Normal& n) { return numeric::normal_survival((x - n.mu) / n.sigma); },
            [x](const PointMass& p) { return x >= p.c ? 0.0 : 1.0; },
            [x](const Empirical& e) {
                const auto it = std::upper_bound(e.sample.begin(), e.sample.end(), x);
                return static_cast<double>(e.sample.end() - it) /
                       static_cast<double>(e.sample.size());
            }},
        f);
}

double fam_quantile(const Family& f, double p) {
    return std::visit(
        overloaded{
            [p](const Pareto& pa) { return pa.scale * std::pow(1.0 - p, -1.0 / pa.alpha); },
            [p](const GeneralizedPareto& g) {
                if (g.gamma == 0.0) return g.mu - g.sigma * std::log1p(-p);
                return g.mu + g.sigma / g.gamma * std::expm1(-g.gamma * std::log1p(-p));
            },
            [p](const GeneralizedExtremeValue& g) {
                const double w = -std::log(p);
                if (g.gamma == 0.0) return g.mu - g.sigma * std::log(w);
                return g.mu + g.sigma / g.gamma * std::expm1(-g.gamma * std::log(w));
            },
            [p](const Exponential& e) { return -std::log1p(-p) / e.rate; },
            [p](const Uniform& u) { return u.lower + p * (u.upper - u.lower); },
            [p](const Normal& n) { return n.mu + n.sigma * numeric::normal_quantile(p); },
            [](const PointMass& pm) { return pm.c; },
            [p](const Empirical& e) {
                // Smallest i with (i+1)/n >= p, with the same division the cdf uses.
                const double n = static_cast<double>(e.sample.size());
                std::size_t lo = 0, hi = e.sample.size() - 1;
                while (lo < hi) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    if (static_cast<double>(mid + 1) / n >= p) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                return e.sample[lo];
            }},
        f);
}

double fam_lower_endpoint(const Family& f) {
    return std::visit(
        overloaded{[](const Pareto& p) { return p.scale; },
                   [](const GeneralizedPareto& g) { return g.mu; },
                   [](const GeneralizedExtremeValue& g) {
                       return g.gamma > 0.0 ? g.mu - g.sigma / g.gamma : -kInf;
                   },
                   [](const Exponential&) { return 0.0; },
                   [](const Uniform& u) { return u.lower; },
                   [](const Normal&) { return -kInf; },
                   [](const PointMass& p) { return p.c; },
                   [](const Empirical& e) { return e.sample.front(); }},
        f);
}

double fam_upper_endpoint(const Family& f) {
    return std::visit(
        overloaded{[](const Pareto&) { return kInf; },
                   [](const GeneralizedPareto& g) {
                       return g.gamma < 0.0 ? g.mu - g.sigma / g.gamma : kInf;
                   },
                   [](const GeneralizedExtremeValue& g) {
                       return g.gamma < 0.0 ? g.mu - g.sigma / g.gamma : kInf;
                   },
                   [](const Exponential&) { return kInf; },
                   [](const Uniform& u) { return u.upper; },
                   [](const Normal&) { return kInf; },
                   [](const PointMass& p) { return p.c; },
                   [](const Empirical& e) { return e.sample.back(); }},
        f);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// (j-1)!! for even j; 1 for j = 0.
double odd_double_factorial(int j) {
    double r = 1.0;
    for (int i = j - 1; i > 1; i -= 2) r *= i;
    return r;
}

bool fam_finite_moment(const Family& f, int k) {
    return std::visit(
        overloaded{[k](const Pareto& p) { return p.alpha > static_cast<double>(k); },
                   [k](const GeneralizedPareto& g) { return g.gamma * k < 1.0; },
                   [k](const GeneralizedExtremeValue& g) { return g.gamma * k < 1.0; },
                   [](const Exponential&) { return true; },
                   [](const Uniform&) { return true; },
                   [](const Normal&) { return true; },
                   [](const PointMass&) { return true; },
                   [](const Empirical&) { return true; }},
        f);
}

double gumbel_moment(double mu, double sigma, int m) {
    double kappa[7] = {};
    kappa[1] = mu + sigma * kEuler;
    double sp = sigma;
    for (int j = 2; j <= m; ++j) {
        sp *= sigma;
        kappa[j] = sp * factorial(j - 1) * kZeta[j - 2];
    }
    double mom[7] = {1.0};
    for (int n = 1; n <= m; ++n) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            s += binom(n - 1, k) * kappa[k + 1] * mom[n - 1 - k];
        }
        mom[n] = s;
    }
    return mom[m];
}

double fam_moment(const Family& f, int m) {
    if (!fam_finite_moment(f, m)) return kInf;
    return std::visit(
        overloaded{
            [m](const Pareto& p) {
                return p.alpha * std::pow(p.scale, m) / (p.alpha - m);
            },
            [m](const GeneralizedPareto& g) {
                if (g.gamma == 0.0) {
                    // mu + sigma E with E standard exponential
                    double s = 0.0;
                    for (int i = 0; i <= m; ++i) {
                        s += binom(m, i) * std::pow(g.mu, m - i) * std::pow(g.sigma, i) *
                             factorial(i);
                    }
                    return s;
                }
                // X = A + B U^{-gamma}, U uniform; E[U^{-i gamma}] = 1/(1 - i gamma)
                const double A = g.mu - g.sigma / g.gamma;
                const double B = g.sigma / g.gamma;
                double s = 0.0;
                for (int i = 0; i <= m; ++i) {
                    s += binom(m, i) * std::pow(A, m - i) * std::pow(B, i) /
                         (1.0 - i * g.gamma);
                }
                return s;
            },
            [m](const GeneralizedExtremeValue& g) {
                if (g.gamma == 0.0) return gumbel_moment(g.mu, g.sigma, m);
                // X = A + B W with W = (-ln U)^{-gamma}; E[W^i] = Gamma(1 - i gamma)
                const double A = g.mu - g.sigma / g.gamma;
                const double B = g.sigma / g.gamma;
                double s = 0.0;
                for (int i = 0; i <= m; ++i) {
                    s += binom(m, i) * std::pow(A, m - i) * std::pow(B, i) *
                         std::tgamma(1.0 - i * g.gamma);
                }
                return s;
            },
            [m](const Exponential& e) { return factorial(m) / std::pow(e.rate, m); },
            [m](const Uniform& u) {
                return (std::pow(u.upper, m + 1) - std::pow(u.lower, m + 1)) /
                       ((m + 1) * (u.upper - u.lower));
            },
            [m](const Normal& n) {
                double s = 0.0;
                for (int j = 0; j <= m; j += 2) {
                    s += binom(m, j) * std::pow(n.mu, m - j) * std::pow(n.sigma, j) *
                         odd_double_factorial(j);
                }
                return s;
            },
            [m](const PointMass& p) { return std::pow(p.c, m); },
            [m](const Empirical& e) {
                double s = 0.0;
                for (double v : e.sample) s += std::pow(v, m);
                return s / static_cast<double>(e.sample.size());
            }},
        f);
}

// Series for the generalized extreme value upper mass in V = -ln cdf(u):
// integral of survival over [u, inf) = sigma * sum_j (-1)^{j+1} V^{j-g} / (j! (j-g)).
// Alternating with decreasing terms for small V; the next term bounds the error.
Bounded gev_series_upper(double sigma, double gamma, double v) {
    const double t1 = std::pow(v, 1.0 - gamma) / (1.0 - gamma);
    const double t2 = std::pow(v, 2.0 - gamma) / (2.0 * (2.0 - gamma));
    const double t3 = std::pow(v, 3.0 - gamma) / (6.0 * (3.0 - gamma));
    const double t4 = std::pow(v, 4.0 - gamma) / (24.0 * (4.0 - gamma));
    return {sigma * (t1 - t2 + t3), sigma * t4};
}

Bounded gev_upper_mass(const GeneralizedExtremeValue& g, double u) {
    if (g.gamma >= 1.0) return {kInf, 0.0};
    double v;
    if (g.gamma == 0.0) {
        v = std::exp(-(u - g.mu) / g.sigma);
    } else {
        const double t = 1.0 + g.gamma * (u - g.mu) / g.sigma;
        if (t <= 0.0) {
            if (g.gamma < 0.0) return {0.0, 0.0};  // beyond the finite endpoint
            // u below the support: full mean excess at the lower edge
            const double lb = g.mu - g.sigma / g.gamma;
            return {(lb - u) + g.sigma / g.gamma * std::tgamma(1.0 - g.gamma), 0.0};
        }
        v = std::pow(t, -1.0 / g.gamma);
    }
    if (v <= 0.25) return gev_series_upper(g.sigma, g.gamma, v);
    // Moderate v: integrate the survival down to where the series is sharp.
    const Family ff = g;
    const double far = fam_quantile(ff, 1.0 - 1e-13);
    if (!(far > u)) return gev_series_upper(g.sigma, g.gamma, v);
    const auto tail = gev_series_upper(g.sigma, g.gamma, 1e-13);
    const auto mid = numeric::integrate([&ff](double x) { return fam_survival(ff, x); },
                                        u, far, 1e-13 * g.sigma + 1e-300);
    return {mid.value + tail.value, mid.abs_error + tail.error};
}

// integral over [mu, l] of the generalized Pareto survival, l inside the support.
double gpd_partial_survival_mass(const GeneralizedPareto& g, double l) {
    const double z = (l - g.mu) / g.sigma;
    if (g.gamma == 0.0) return g.sigma * -std::expm1(-z);
    const double t = 1.0 + g.gamma * z;
    const double eps = (g.gamma - 1.0) / g.gamma;  // 1 - 1/gamma
    if (eps == 0.0) return g.sigma * std::log(t) / g.gamma;
    return g.sigma * std::expm1(eps * std::log(t)) / (g.gamma * eps);
}

Bounded fam_upper_mass(const Family& f, double u) {
    return std::visit(
        overloaded{
            [u](const Pareto& p) -> Bounded {
                if (p.alpha <= 1.0) return {kInf, 0.0};
                const double lo = std::max(u, p.scale);
                const double head = u < p.scale ? p.scale - u : 0.0;
                return {head + std::pow(p.scale, p.alpha) * std::pow(lo, 1.0 - p.alpha) /
                                   (p.alpha - 1.0),
                        0.0};
            },
            [u](const GeneralizedPareto& g) -> Bounded {
                if (g.gamma >= 1.0) return {kInf, 0.0};
                const double lo = std::max(u, g.mu);
                const double head = u < g.mu ? g.mu - u : 0.0;
                if (g.gamma == 0.0) {
                    return {head + g.sigma * std::exp(-(lo - g.mu) / g.sigma), 0.0};
                }
                const double t = std::max(0.0, 1.0 + g.gamma * (lo - g.mu) / g.sigma);
                return {head + g.sigma * std::pow(t, 1.0 - 1.0 / g.gamma) / (1.0 - g.gamma),
                        0.0};
            },
            [u](const GeneralizedExtremeValue& g) { return gev_upper_mass(g, u); },
            [u](const Exponential& e) -> Bounded {
                const double lo = std::max(u, 0.0);
                const double head = u < 0.0 ? -u : 0.0;
                return {head + std::exp(-e.rate * lo) / e.rate, 0.0};
            },
            [u](const Uniform& un) -> Bounded {
                if (u >= un.upper) return {0.0, 0.0};
                if (u <= un.lower) {
                    return {(un.lower - u) + 0.5 * (un.upper - un.lower), 0.0};
                }
                const double d = un.upper - u;
                return {0.5 * d * d / (un.upper - un.lower), 0.0};
            },
            [u](const Normal& n) -> Bounded {
                const double z = (u - n.mu) / n.sigma;
                return {n.sigma * (numeric::normal_pdf(z) - z * numeric::normal_survival(z)),
                        0.0};
            },
            [u](const PointMass& p) -> Bounded { return {std::max(p.c - u, 0.0), 0.0}; },
            [u](const Empirical& e) -> Bounded {
                double s = 0.0;
                for (double v : e.sample) s += std::max(v - u, 0.0);
                return {s / static_cast<double>(e.sample.size()), 0.0};
            }},
        f);
}

Bounded fam_lower_mass(const Family& f, double l) {
    return std::visit(
        overloaded{
            [l](const Pareto& p) -> Bounded {
                if (l <= p.scale) return {0.0, 0.0};
                const double s = p.scale;
                double drop;
                if (p.alpha == 1.0) {
                    drop = s * std::log(l / s);
                } else {
                    drop = std::pow(s, p.alpha) *
                           (std::pow(l, 1.0 - p.alpha) - std::pow(s, 1.0 - p.alpha)) /
                           (1.0 - p.alpha);
                }
                return {(l - s) - drop, 0.0};
            },
            [l](const GeneralizedPareto& g) -> Bounded {
                if (l <= g.mu) return {0.0, 0.0};
                const double top = fam_upper_endpoint(Family{g});
                const double lc = std::min(l, top);
                const double over = l > top ? l - top : 0.0;
                return {(lc - g.mu) - gpd_partial_survival_mass(g, lc) + over, 0.0};
            },
            [l](const GeneralizedExtremeValue& g) -> Bounded {
                if (g.gamma > 0.0) {
                    const double lb = g.mu - g.sigma / g.gamma;
                    if (l <= lb) return {0.0, 0.0};
                    const double cap = (l - lb) * fam_cdf(Family{g}, l);
                    return {0.5 * cap, 0.5 * cap};
                }
                if (g.gamma == 0.0) {
                    // sigma * E1(t), t = exp(-(l - mu) / sigma); sandwich
                    // exp(-t) ln(1 + 1/t) in [E1(t), 2 E1(t)].
                    const double t = std::exp(-(l - g.mu) / g.sigma);
                    const double u = std::exp(-t) * std::log1p(1.0 / t);
                    return {g.sigma * 0.75 * u, g.sigma * 0.25 * u};
                }
                // gamma < 0: sigma * Gamma(a, S), a = -gamma, S = (-ln cdf(l)).
                const double a = -g.gamma;
                const double t = 1.0 + g.gamma * (l - g.mu) / g.sigma;
                const double S = std::pow(t, -1.0 / g.gamma);
                if (!(S > std::max(2.0, 2.0 * a))) {
                    const double whole = g.sigma * std::tgamma(a);
                    return {whole, whole};
                }
                const double base = std::pow(S, a - 1.0) * std::exp(-S);
                if (a <= 1.0) {
                    const double gap = base * (1.0 - a) / S;
                    return {g.sigma * (base - 0.5 * gap), g.sigma * (0.5 * gap + 1e-18)};
                }
                const double upper = base / (1.0 - (a - 1.0) / S);
                return {g.sigma * 0.5 * (base + upper), g.sigma * 0.5 * (upper - base)};
            },
            [l](const Exponential& e) -> Bounded {
                if (l <= 0.0) return {0.0, 0.0};
                return {l + std::expm1(-e.rate * l) / e.rate, 0.0};
            },
            [l](const Uniform& u) -> Bounded {
                if (l <= u.lower) return {0.0, 0.0};
                if (l >= u.upper) return {l - 0.5 * (u.lower + u.upper), 0.0};
                const double d = l - u.lower;
                return {0.5 * d * d / (u.upper - u.lower), 0.0};
            },
            [l](const Normal& n) -> Bounded {
                const double z = (l - n.mu) / n.sigma;
                return {n.sigma * (numeric::normal_pdf(z) + z * numeric::normal_cdf(z)),
                        0.0};
            },
            [l](const PointMass& p) -> Bounded { return {std::max(l - p.c, 0.0), 0.0}; },
            [l](const Empirical& e) -> Bounded {
                double s = 0.0;
                for (double v : e.sample) s += std::max(l - v, 0.0);
                return {s / static_cast<double>(e.sample.size()), 0.0};
            }},
        f);
}

void fam_kinks(const Family& f, std::vector<double>& out) {
    std::visit(overloaded{[&](const Pareto& p) { out.push_back(p.scale); },
                          [&](const GeneralizedPareto& g) {
                              out.push_back(g.mu);
                              if (g.gamma < 0.0) out.push_back(g.mu - g.sigma / g.gamma);
                          },
                          [&](const GeneralizedExtremeValue& g) {
                              if (g.gamma != 0.0) out.push_back(g.mu - g.sigma / g.gamma);
                          },
                          [&](const Exponential&) { out.push_back(0.0); },
                          [&](const Uniform& u) {
                              out.push_back(u.lower);
                              out.push_back(u.upper);
                          },
                          [&](const Normal&) {},
                          [&](const PointMass& p) { out.push_back(p.c); },
                          [&](const Empirical& e) {
                              out.insert(out.end(), e.sample.begin(), e.sample.end());
                          }},
               f);
}

}  // namespace

bool family_equal(const Family& a, const Family& b) { return a == b; }

std::optional<double> family_evi(const Family& f) {
    return std::visit(
        overloaded{[](const Pareto& p) { return std::optional<double>(1.0 / p.alpha); },
                   [](const GeneralizedPareto& g) { return std::optional<double>(g.gamma); },
                   [](const GeneralizedExtremeValue& g) {
                       return std::optional<double>(g.gamma);
                   },
                   [](const Exponential&) { return std::optional<double>(0.0); },
                   [](const Uniform&) { return std::optional<double>(-1.0); },
                   [](const Normal&) { return std::optional<double>(0.0); },
                   [](const PointMass&) { return std::optional<double>(); },
                   [](const Empirical&) { return std::optional<double>(); }},
        f);
}

std::optional<double> family_rv_index(const Family& f) {
    return std::visit(
        overloaded{
            [](const Pareto& p) { return std::optional<double>(-p.alpha); },
            [](const GeneralizedPareto& g) {
                if (g.gamma > 0.0) return std::optional<double>(-1.0 / g.gamma);
                if (g.gamma == 0.0) return std::optional<double>(-kInf);
                return std::optional<double>();
            },
            [](const GeneralizedExtremeValue& g) {
                if (g.gamma > 0.0) return std::optional<double>(-1.0 / g.gamma);
                if (g.gamma == 0.0) return std::optional<double>(-kInf);
                return std::optional<double>();
            },
            [](const Exponential&) { return std::optional<double>(-kInf); },
            [](const Uniform&) { return std::optional<double>(); },
            [](const Normal&) { return std::optional<double>(-kInf); },
            [](const PointMass&) { return std::optional<double>(); },
            [](const Empirical&) { return std::optional<double>(); }},
        f);
}

Distribution::Distribution(Family f) {
    validate(f);
    if (auto* e = std::get_if<Empirical>(&f)) {
        std::sort(e->sample.begin(), e->sample.end());
    }
    parts_.push_back({1.0, std::move(f)});
}

Distribution::Distribution(std::vector<WeightedFamily> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) {
        throw std::invalid_argument("mixture: requires at least one component");
    }
    double total = 0.0;
    for (auto& part : parts_) {
        validate(part.family);
        if (auto* e = std::get_if<Empirical>(&part.family)) {
            std::sort(e->sample.begin(), e->sample.end());
        }
        if (!(finite(part.weight) && part.weight > 0.0)) {
            throw std::invalid_argument("mixture: weights must be positive");
        }
        total += part.weight;
    }
    if (!(finite(total) && total > 0.0)) {
        throw std::invalid_argument("mixture: weights must sum to a positive value");
    }
    for (auto& part : parts_) part.weight /= total;
}

double Distribution::cdf(double x) const {
    if (parts_.size() == 1) return fam_cdf(parts_[0].family, x);
    double s = 0.0;
    for (const auto& part : parts_) s += part.weight * fam_cdf(part.family, x);
    return s;
}

double Distribution::survival(double x) const {
    if (parts_.size() == 1) return fam_survival(parts_[0].family, x);
    double s = 0.0;
    for (const auto& part : parts_) s += part.weight * fam_survival(part.family, x);
    return s;
}

double Distribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("quantile: p must lie in (0, 1)");
    }
    if (parts_.size() == 1) return fam_quantile(parts_[0].family, p);

    double lo = kInf, hi = -kInf;
    for (const auto& part : parts_) {
        const double q = fam_quantile(part.family, p);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    // For x < lo every component cdf is < p, so the mixture cdf is too.
    if (cdf(lo) >= p) return lo;
    // hi has mixture cdf >= p up to roundoff; expand on the rare shortfall.
    int guard = 0;
    while (cdf(hi) < p) {
        hi = std::nextafter(hi, kInf);
        if (++guard > 64) throw numeric_error("quantile: failed to bracket");
    }
    return numeric::bisect_boundary([this, p](double x) { return cdf(x) >= p; }, lo, hi);
}

std::vector<double> Distribution::sample(std::size_t n, std::uint64_t seed) const {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(quantile(numeric::uniform_draw(seed, i)));
    }
    return out;
}

double Distribution::lower_endpoint() const {
    double lo = kInf;
    for (const auto& part : parts_) lo = std::min(lo, fam_lower_endpoint(part.family));
    return lo;
}

double Distribution::upper_endpoint() const {
    double hi = -kInf;
    for (const auto& part : parts_) hi = std::max(hi, fam_upper_endpoint(part.family));
    return hi;
}

double Distribution::moment(int k) const {
    if (k < 1 || k > 6) throw std::invalid_argument("moment: order must lie in 1..6");
    double s = 0.0;
    for (const auto& part : parts_) {
        const double m = fam_moment(part.family, k);
        if (!std::isfinite(m)) return kInf;
        s += part.weight * m;
    }
    return s;
}

bool Distribution::has_finite_moment(int k) const {
    if (k < 1 || k > 6) throw std::invalid_argument("moment: order must lie in 1..6");
    for (const auto& part : parts_) {
        if (!fam_finite_moment(part.family, k)) return false;
    }
    return true;
}

Bounded Distribution::upper_tail_mass(double u) const {
    Bounded total;
    for (const auto& part : parts_) {
        const Bounded b = fam_upper_mass(part.family, u);
        if (!std::isfinite(b.value)) return {kInf, 0.0};
        total.value += part.weight * b.value;
        total.error += part.weight * b.error;
    }
    return total;
}

Bounded Distribution::lower_tail_mass(double l) const {
    Bounded total;
    for (const auto& part : parts_) {
        const Bounded b = fam_lower_mass(part.family, l);
        total.value += part.weight * b.value;
        total.error += part.weight * b.error;
    }
    return total;
}

std::vector<double> Distribution::kinks() const {
    std::vector<double> out;
    for (const auto& part : parts_) fam_kinks(part.family, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Distribution::is_step() const {
    for (const auto& part : parts_) {
        if (!std::holds_alternative<PointMass>(part.family) &&
            !std::holds_alternative<Empirical>(part.family)) {
            return false;
        }
    }
    return true;
}

std::vector<std::pair<double, double>> Distribution::step_atoms() const {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& part : parts_) {
        if (const auto* pm = std::get_if<PointMass>(&part.family)) {
            atoms.emplace_back(pm->c, part.weight);
        } else if (const auto* e = std::get_if<Empirical>(&part.family)) {
            const double unit = part.weight / static_cast<double>(e->sample.size());
            for (double v : e->sample) atoms.emplace_back(v, unit);
        } else {
            throw std::invalid_argument("step_atoms: distribution is not a step function");
        }
    }
    std::sort(atoms.begin(), atoms.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().first == a.first) {
            merged.back().second += a.second;
        } else {
            merged.push_back(a);
        }
    }
    return merged;
}

Distribution mix(const Distribution& f0, const Distribution& f1, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("mix: lambda must lie in [0, 1]");
    }
    if (lambda == 0.0) return f0;
    if (lambda == 1.0) return f1;
    std::vector<WeightedFamily> parts;
    parts.reserve(f0.parts().size() + f1.parts().size());
    for (const auto& part : f0.parts()) {
        parts.push_back({(1.0 - lambda) * part.weight, part.family});
    }
    for (const auto& part : f1.parts()) {
        parts.push_back({lambda * part.weight, part.family});
    }
    return Distribution(std::move(parts));
}

}  // namespace tailscore
