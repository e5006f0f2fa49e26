#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rotsmag {

/// Base class for every error raised by the library. The CLI maps the
/// subclasses onto distinct process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or object lies outside the computational domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range argument (empty family, mismatched layout, bad exponent).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// An operator precondition on its input field is violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative solver exceeded its iteration cap.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + format(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }

    double residual_;
};

/// NaN or Inf detected in a computed quantity.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (syntax or semantics). Carries every
/// violation found, not only the first.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what), violations_{what} {}
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& x : v) s += "\n  - " + x;
        return s;
    }

    std::vector<std::string> violations_;
};

}  // namespace rotsmag
