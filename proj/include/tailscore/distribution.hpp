#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tailscore/error.hpp"

namespace tailscore {

// Survival (s/x)^alpha on [scale, inf).
struct Pareto {
    double alpha = 1.0;
    double scale = 1.0;
    friend bool operator==(const Pareto&, const Pareto&) = default;
};

// Survival (1 + gamma (x - mu) / sigma)^(-1/gamma); exp(-(x - mu) / sigma) at gamma = 0.
struct GeneralizedPareto {
    double gamma = 0.0;
    double sigma = 1.0;
    double mu = 0.0;
    friend bool operator==(const GeneralizedPareto&, const GeneralizedPareto&) = default;
};

// Cdf exp(-(1 + gamma (x - mu) / sigma)^(-1/gamma)); Gumbel at gamma = 0.
struct GeneralizedExtremeValue {
    double gamma = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    friend bool operator==(const GeneralizedExtremeValue&,
                           const GeneralizedExtremeValue&) = default;
};

struct Exponential {
    double rate = 1.0;
    friend bool operator==(const Exponential&, const Exponential&) = default;
};

struct Uniform {
    double lower = 0.0;
    double upper = 1.0;
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

struct Normal {
    double mu = 0.0;
    double sigma = 1.0;
    friend bool operator==(const Normal&, const Normal&) = default;
};

struct PointMass {
    double c = 0.0;
    friend bool operator==(const PointMass&, const PointMass&) = default;
};

// Equal mass 1/n on each sample point; sample is kept sorted.
// source records the file the sample was loaded from, if any.
struct Empirical {
    std::vector<double> sample;
    std::string source;
    friend bool operator==(const Empirical&, const Empirical&) = default;
};

using Family = std::variant<Pareto, GeneralizedPareto, GeneralizedExtremeValue,
                            Exponential, Uniform, Normal, PointMass, Empirical>;

struct WeightedFamily {
    double weight = 1.0;
    Family family;
};

// Value with a guaranteed bound on its absolute error. Used for analytic
// tail masses where some families only admit a sandwich, not a closed form.
struct Bounded {
    double value = 0.0;
    double error = 0.0;
};

bool family_equal(const Family& a, const Family& b);

// Extreme value index of a single family; nullopt when the family is not in
// any max-domain of attraction (atoms, finite samples).
std::optional<double> family_evi(const Family& f);

// Index of regular variation of the survival function: -alpha for power
// tails, -inf for faster-than-polynomial decay, nullopt for bounded support.
std::optional<double> family_rv_index(const Family& f);

// Finite mixture of parametric families. A non-mixture is a single
// weight-one part; weights are positive and are normalized to sum to one.
// Nested mixtures flatten, so parts() is never itself a mixture.
class Distribution {
public:
    explicit Distribution(Family f);
    explicit Distribution(std::vector<WeightedFamily> parts);

    const std::vector<WeightedFamily>& parts() const { return parts_; }
    bool is_mixture() const { return parts_.size() > 1; }

    double cdf(double x) const;
    // Complement computed directly from family survival functions, never as 1 - cdf.
    double survival(double x) const;
    // Generalized inverse: smallest x with cdf(x) >= p. Rejects p outside (0, 1).
    double quantile(double p) const;
    // Inverse-transform draws; a pure function of (n, seed).
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    double lower_endpoint() const;
    double upper_endpoint() const;

    // Raw moment E[Y^k], k in 1..6; +inf when divergent.
    double moment(int k) const;
    double mean() const { return moment(1); }
    bool has_finite_moment(int k) const;

    // Analytic bounds on the mass integrals used when quadrature truncates an
    // unbounded support:
    //   upper_tail_mass(u) ~ integral over [u, inf) of survival
    //   lower_tail_mass(l) ~ integral over (-inf, l] of cdf
    Bounded upper_tail_mass(double u) const;
    Bounded lower_tail_mass(double l) const;

    // Finite points where the cdf or its derivative is discontinuous
    // (atoms and support edges); quadrature must split there.
    std::vector<double> kinks() const;

    // True when every part is an atom or a finite sample, so the cdf is a
    // step function and integrals against it have exact closed forms.
    bool is_step() const;
    // Atoms of a step distribution: (location, mass), sorted, locations unique.
    std::vector<std::pair<double, double>> step_atoms() const;

private:
    std::vector<WeightedFamily> parts_;
};

// Mixture lambda F1 + (1 - lambda) F0: cdf(mix) = lambda cdf(f1) + (1 - lambda) cdf(f0).
// Rejects lambda outside [0, 1]; at the ends returns the component itself.
Distribution mix(const Distribution& f0, const Distribution& f1, double lambda);

}  // namespace tailscore
