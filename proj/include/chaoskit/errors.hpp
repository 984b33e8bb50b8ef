#pragma once

#include <stdexcept>
#include <string>

namespace chaoskit {

// Failure categories used across the toolkit. Operations document which of
// these they can raise; anything else escaping is a bug.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched sizes: horizons, alphabets, schedule vs. orbit length.
struct DimensionError : Error {
    using Error::Error;
};

// A structural impossibility: graph not mixing, no bridge path, conflicting
// paste blocks, missing fixed-point symbol.
struct StructureError : Error {
    using Error::Error;
};

// Precondition violation on a value argument.
struct ParameterError : Error {
    using Error::Error;
};

// Numerical breakdown inside an integrator or solver.
struct NumericError : Error {
    using Error::Error;
};

// A trajectory left the computational domain (bailout radius).
struct EscapeError : Error {
    EscapeError(const std::string& msg, double time, double radius)
        : Error(msg), time_of_escape(time), radius_at_escape(radius) {}
    double time_of_escape = 0.0;
    double radius_at_escape = 0.0;
};

// An iterative search failed to converge.
struct SearchError : Error {
    using Error::Error;
};

// Bad run configuration (CLI / config file).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace chaoskit
