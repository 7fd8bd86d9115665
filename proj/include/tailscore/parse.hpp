#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "tailscore/distribution.hpp"
#include "tailscore/functionals.hpp"
#include "tailscore/scoring.hpp"

namespace tailscore {

// what() carries the message with the offset already rendered.
class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

// Grammar (keyword arguments in any order; duplicates, omissions, and
// unknown names are rejected):
//   SPEC := pareto(alpha=, scale=) | gpd(gamma=, sigma=, mu=)
//         | gev(gamma=, mu=, sigma=) | exp(rate=) | unif(a=, b=)
//         | norm(mu=, sigma=) | point(c=) | emp(file=PATH)
//         | mix(W:SPEC, W:SPEC, ...)
// emp loads whitespace-separated numbers from PATH; PATH runs to the
// closing parenthesis and may not contain ',' or ')'.
Distribution parse_distribution(const std::string& spec);

// "crps" or "wcrps(q=...)"; q = -inf reproduces crps.
ScoringRule parse_scoring_rule(const std::string& spec);

// "se(k=...)" with integer k, or "pinball(alpha=...)".
ScoringFunction parse_scoring_function(const std::string& spec);

// "mean", "upper_endpoint", "evi", "rv_index", or "m_index".
Functional parse_functional(const std::string& name);

// Inverses of the parsers above, printing parameters at full precision.
// An Empirical part renders as emp(file=SOURCE) from its recorded source.
std::string format_distribution(const Distribution& d);
std::string format_scoring_rule(const ScoringRule& rule);
std::string format_scoring_function(const ScoringFunction& fn);

}  // namespace tailscore
