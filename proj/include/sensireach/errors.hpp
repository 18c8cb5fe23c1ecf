#pragma once

#include <stdexcept>
#include <string>

namespace sensireach {

// Shape mismatch between operands (or between a matrix and a declared layout).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Truncation order too small for the requested horizon; carries the smallest
// admissible order so callers can retry.
class TaylorOrderError : public std::domain_error {
public:
    TaylorOrderError(const std::string& msg, int min_order)
        : std::domain_error(msg), min_order(min_order) {}
    int min_order;
};

// Non-finite state during numerical integration; carries the time at which
// the state first left the finite range.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& msg, double time)
        : std::runtime_error(msg), time(time) {}
    double time;
};

// A computed lower reach bound exceeded the upper bound in some component,
// which means the supplied sensitivity bounds were not sound.
class OrderingError : public std::runtime_error {
public:
    OrderingError(const std::string& msg, int component)
        : std::runtime_error(msg), component(component) {}
    int component;
};

}  // namespace sensireach
