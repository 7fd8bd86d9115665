#pragma once

#include <optional>

#include "tailscore/distribution.hpp"

namespace tailscore {

struct TailProfile {
    double upper_endpoint = 0.0;
    std::optional<double> evi;
    // -inf inside the optional encodes faster-than-polynomial decay;
    // nullopt means the index does not apply (bounded support, atoms).
    std::optional<double> rv_index;
    std::optional<double> m_index;
};

// Extreme value index. Mixtures resolve by, in order: all components positive
// -> max; all negative with a shared endpoint -> min; strictly tail-ordered
// components -> the heaviest one's index; otherwise undefined.
std::optional<double> evi(const Distribution& d);

// Index of regular variation of the survival function. Mixtures resolve to
// the max when every component has one (including -inf); otherwise undefined.
std::optional<double> rv_index(const Distribution& d);

// Numeric tail index read off survival probes at quantile levels 1 - 10^-k,
// k = 1..12: log-log slopes between consecutive probes, accelerated with
// Aitken extrapolation; -inf when the slopes diverge. Undefined for bounded
// support or when the probe trail settles nowhere.
std::optional<double> m_index(const Distribution& d);

TailProfile tail_profile(const Distribution& d);

}  // namespace tailscore
