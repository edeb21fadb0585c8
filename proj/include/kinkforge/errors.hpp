#pragma once

#include <stdexcept>
#include <string>

namespace kinkforge {

// Thrown when |g(a+) - g(a-)| is below the segment tolerance: the
// straight-segment mechanism cannot produce a connection.
struct DegenerateSegment : std::runtime_error {
    explicit DegenerateSegment(const std::string& msg) : std::runtime_error(msg) {}
};

// Trajectory entered an intermediate well before reaching the target.
struct BlockedByWell : std::runtime_error {
    explicit BlockedByWell(const std::string& msg) : std::runtime_error(msg) {}
};

// Segment invariant violated during integration.
struct LeftSegment : std::runtime_error {
    explicit LeftSegment(const std::string& msg) : std::runtime_error(msg) {}
};

// Integration exceeded its x budget without reaching the target well.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGrid : std::invalid_argument {
    explicit InvalidGrid(const std::string& msg) : std::invalid_argument(msg) {}
};

struct IllConditioned : std::runtime_error {
    explicit IllConditioned(const std::string& msg) : std::runtime_error(msg) {}
};

// Near-singular pivot in a symmetric factorization; callers jitter the
// shift and retry.
struct Breakdown : std::runtime_error {
    explicit Breakdown(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

} // namespace kinkforge
