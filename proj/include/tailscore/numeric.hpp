#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace tailscore::numeric {

struct Integral {
    double value = 0.0;
    double abs_error = 0.0;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Splits the worst panel until the
// summed error estimate drops below abs_tol, a panel is too narrow to split,
// or the panel budget runs out. Returns the achieved error honestly; throws
// numeric_error only on nonfinite integrand values or gross nonconvergence.
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_panels = 4000);

// Sum of integrate() over consecutive intervals [pts[i], pts[i+1]].
// abs_tol is the total budget, divided evenly across segments.
Integral integrate_segmented(const std::function<double(double)>& f,
                             const std::vector<double>& pts, double abs_tol,
                             int max_panels = 4000);

double normal_pdf(double z);
double normal_cdf(double z);
double normal_survival(double z);
double normal_quantile(double p);

// Counter-based uniform in (0, 1): draw i of the stream identified by seed.
// Pure function of (seed, i); no state, so streams can be evaluated in any order.
double uniform_draw(std::uint64_t seed, std::uint64_t i);

// Derives an independent substream id from a base seed and an index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// Smallest x in (lo, hi] with pred(x) true, located to one ulp.
// Requires pred(lo) false, pred(hi) true, pred monotone on [lo, hi].
double bisect_boundary(const std::function<bool(double)>& pred, double lo, double hi);

}  // namespace tailscore::numeric
