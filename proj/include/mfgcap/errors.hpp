#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace mfgcap {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter or argument outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Infinite-horizon routine called with beta >= 1 + rho/delta.
class HorizonError : public Error {
public:
    using Error::Error;
};

// Inconsistent solver or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Fixed-point iteration did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Shooting/bisection could not isolate the initial slope.
class ShootingError : public Error {
public:
    using Error::Error;
};

// Compact scientific rendering for error messages.
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace mfgcap
