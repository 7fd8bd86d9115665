#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailscore/distribution.hpp"
#include "tailscore/tail_order.hpp"

namespace tailscore {

enum class Functional { Mean, UpperEndpoint, Evi, RvIndex, MIndex };

const char* functional_name(Functional f);

// Value of the functional, nullopt where it does not apply. Mean may be +inf.
std::optional<double> evaluate(Functional f, const Distribution& d);

// A pair with its tail-order verdict known from the family parameters.
struct AnalyticPair {
    std::string label;
    Distribution a;
    Distribution b;
    TailVerdict verdict = TailVerdict::Undetermined;
    // Limiting survival ratio a/b when the verdict is TailEquivalent.
    std::optional<double> ratio;
};

// Pairs spanning power, exponential, Gaussian, and bounded tails, plus
// mixture-versus-component cases.
std::vector<AnalyticPair> analytic_pairs();

struct RespectReport {
    int pairs_checked = 0;
    int pairs_skipped = 0;
    int violations = 0;
    bool passed = false;
};

// Checks that the functional follows the tail order on each pair where it is
// defined: the heavier side scores at least as high, equivalent tails score
// equal, and every mixture scores max of the two sides. MIndex is compared
// at relative tolerance 2e-3, the analytic functionals exactly.
RespectReport tail_order_respect_check(Functional f, const std::vector<AnalyticPair>& pairs,
                                       const std::vector<double>& lambdas);

}  // namespace tailscore
