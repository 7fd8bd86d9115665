#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailscore/distribution.hpp"

namespace tailscore {

enum class TailVerdict { FirstHeavier, SecondHeavier, TailEquivalent, Undetermined };

std::string to_string(TailVerdict v);

// One survival-ratio probe: x = quantile of the heavier candidate at 1 - 10^-k.
struct TailProbe {
    int k = 0;
    double x = 0.0;
    double ratio = 0.0;  // survival_a(x) / survival_b(x)
};

struct TailComparison {
    TailVerdict verdict = TailVerdict::Undetermined;
    // Limiting survival ratio in (0, inf) when the tails are equivalent.
    std::optional<double> ratio;
    std::vector<TailProbe> probes;
};

// Orders two distributions by right-tail weight. The verdict comes from the
// closed-form tail behaviour of the families; the probes record numeric
// evidence and demote the verdict to Undetermined when they contradict it.
TailComparison tail_compare(const Distribution& a, const Distribution& b);

// Limiting ratio survival_a / survival_b when it is a positive finite
// constant, nullopt otherwise.
std::optional<double> tail_equivalent(const Distribution& a, const Distribution& b);

}  // namespace tailscore
