// Shared error types and small numeric helpers.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crowdflow {

// A precondition or contract of an operation was violated by the caller.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The computation itself went numerically wrong (NaN, lost positivity,
// non-optimal map, solver stall). Carries the failing step index when the
// failure happened inside a time-stepping loop.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what, int step = -1)
        : std::runtime_error(what), step_index(step) {}
    int step_index;
};

// Configuration errors collect every violation, not just the first.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs)
        : std::runtime_error(join(errs)), violations(std::move(errs)) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& errs) {
        std::string s = "invalid configuration:";
        for (const auto& e : errs) s += "\n  - " + e;
        return s;
    }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace crowdflow
