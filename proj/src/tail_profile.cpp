#include "tailscore/tail_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tailscore/tail_order.hpp"

namespace tailscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ProbeRow {
    int k;
    double x;
    double s;
};

// Last value once the final two increments are within rel tol of it.
std::optional<double> tail_converged(const std::vector<double>& v, double tol = 1e-3) {
    const std::size_t n = v.size();
    if (n < 3) return std::nullopt;
    const double a = v[n - 3], b = v[n - 2], c = v[n - 1];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return std::nullopt;
    if (std::abs(c - b) <= tol * std::abs(c) && std::abs(b - a) <= tol * std::abs(c)) {
        return c;
    }
    return std::nullopt;
}

// Aitken delta-squared acceleration; degenerate denominators pass through.
std::vector<double> aitken(const std::vector<double>& s) {
    std::vector<double> out;
    if (s.size() < 3) return out;
    for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        const double d1 = s[i + 1] - s[i];
        const double d2 = s[i + 2] - s[i + 1];
        const double den = d2 - d1;
        if (std::abs(den) < 1e-13 * std::max(1.0, std::abs(s[i + 2]))) {
            out.push_back(s[i + 2]);
        } else {
            out.push_back(s[i + 2] - d2 * d2 / den);
        }
    }
    return out;
}

// Slopes march off without settling: strictly decreasing with increments
// that stop shrinking and total drift too large for a finite limit.
bool slopes_diverge(const std::vector<double>& slopes) {
    const std::size_t half = slopes.size() / 2;
    if (half < 1) return false;
    const std::vector<double> tail(slopes.begin() + (half - 1), slopes.end());
    if (tail.size() < 3) return false;
    std::vector<double> diffs;
    for (std::size_t i = 0; i + 1 < tail.size(); ++i) diffs.push_back(tail[i + 1] - tail[i]);
    for (double d : diffs) {
        if (!(d < -1e-12)) return false;
    }
    const double d_last = diffs.back();
    const double d_mid = diffs[diffs.size() / 2];
    if (!(std::abs(d_last) >= 0.5 * std::abs(d_mid))) return false;
    return tail.front() - tail.back() > 0.5;
}

std::optional<double> classify_rows(const std::vector<ProbeRow>& rows) {
    if (rows.size() < 5) return std::nullopt;

    // Raw ratio ln s / ln x is constant for clean power tails; a multiplied
    // constant makes it drift by ~1e-3 per decade, so the gate must sit far
    // below that to avoid freezing the drift into the answer.
    std::vector<double> raw;
    for (const auto& r : rows) {
        if (r.x > 1.5) raw.push_back(std::log(r.s) / std::log(r.x));
    }
    if (const auto v = tail_converged(raw, 1e-6)) return v;

    // Log-log slopes between consecutive decades cancel the multiplicative
    // constant that stalls the raw ratio.
    std::vector<double> slopes;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i + 1].k != rows[i].k + 1) continue;
        const double dlx = std::log(rows[i + 1].x) - std::log(rows[i].x);
        if (!(dlx > 1e-12)) continue;
        slopes.push_back((std::log(rows[i + 1].s) - std::log(rows[i].s)) / dlx);
    }
    if (slopes.size() < 4) return std::nullopt;

    const auto slope_val = tail_converged(slopes);
    if (!slope_val && slopes_diverge(slopes)) return -kInf;

    const auto a1 = aitken(slopes);
    if (const auto v = tail_converged(a1)) return v;
    const auto a2 = aitken(a1);
    if (const auto v = tail_converged(a2)) return v;
    return slope_val;
}

}  // namespace

std::optional<double> evi(const Distribution& d) {
    const auto& parts = d.parts();
    if (parts.size() == 1) return family_evi(parts[0].family);

    std::vector<std::optional<double>> gs;
    gs.reserve(parts.size());
    bool all_defined = true;
    for (const auto& part : parts) {
        gs.push_back(family_evi(part.family));
        all_defined = all_defined && gs.back().has_value();
    }

    if (all_defined) {
        bool all_pos = true, all_neg = true;
        for (const auto& g : gs) {
            all_pos = all_pos && *g > 0.0;
            all_neg = all_neg && *g < 0.0;
        }
        if (all_pos) {
            double m = -kInf;
            for (const auto& g : gs) m = std::max(m, *g);
            return m;
        }
        if (all_neg) {
            const double top = Distribution(parts[0].family).upper_endpoint();
            bool shared = true;
            for (std::size_t i = 1; i < parts.size(); ++i) {
                shared = shared && Distribution(parts[i].family).upper_endpoint() == top;
            }
            if (shared) {
                double m = kInf;
                for (const auto& g : gs) m = std::min(m, *g);
                return m;
            }
        }
    }

    // A component at least as heavy as every other fixes the mixture's tail;
    // equivalent components share one tail class, so ties do not block.
    std::vector<Distribution> singles;
    singles.reserve(parts.size());
    for (const auto& part : parts) singles.emplace_back(part.family);
    for (std::size_t i = 0; i < singles.size(); ++i) {
        if (!gs[i]) continue;
        bool dominates = true;
        for (std::size_t j = 0; j < singles.size() && dominates; ++j) {
            if (i == j) continue;
            const TailVerdict v = tail_compare(singles[i], singles[j]).verdict;
            dominates = v == TailVerdict::FirstHeavier || v == TailVerdict::TailEquivalent;
        }
        if (dominates) return gs[i];
    }
    return std::nullopt;
}

std::optional<double> rv_index(const Distribution& d) {
    double m = -kInf;
    for (const auto& part : d.parts()) {
        const auto r = family_rv_index(part.family);
        if (!r) return std::nullopt;
        m = std::max(m, *r);
    }
    return m;
}

std::optional<double> m_index(const Distribution& d) {
    if (std::isfinite(d.upper_endpoint())) return std::nullopt;

    std::vector<ProbeRow> rows;
    for (int k = 1; k <= 12; ++k) {
        const double p = 1.0 - std::pow(10.0, -k);
        const double x = d.quantile(p);
        if (!std::isfinite(x)) continue;
        const double s = d.survival(x);
        if (!(s > 0.0) || !std::isfinite(s)) continue;
        rows.push_back({k, x, s});
    }
    return classify_rows(rows);
}

TailProfile tail_profile(const Distribution& d) {
    TailProfile p;
    p.upper_endpoint = d.upper_endpoint();
    p.evi = evi(d);
    p.rv_index = rv_index(d);
    p.m_index = m_index(d);
    return p;
}

}  // namespace tailscore
