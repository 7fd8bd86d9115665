#pragma once

#include <stdexcept>
#include <string>

namespace tailscore {

// Numerical failure: divergent integral, violated precondition, nonconvergent probe.
// Distinct from std::invalid_argument (bad parameters) and parse_error (bad spec text)
// so the CLI can map each to its own exit status.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tailscore
