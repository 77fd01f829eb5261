#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace eiskit {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    ok = 0,
    configuration = 2,
    data = 3,
    numerical = 4,
};

/// Root of the library's exception hierarchy. Every error carries the exit
/// code the CLI reports for it.
class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// A parameter lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ExitCode::configuration, what) {}
};

/// Invalid configuration (aliasing, incoherent sampling, unknown preset...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::configuration, what) {}
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

/// Index outside the valid range of a container or spectrum.
class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error(ExitCode::configuration, what) {}
};

/// Numerical failure: underflow, non-convergence, singular systems.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

inline void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw DomainError(std::string(name) + " must be > 0");
}

inline void require_non_negative(double v, const char* name) {
    if (!(v >= 0.0)) throw DomainError(std::string(name) + " must be >= 0");
}

}  // namespace detail
}  // namespace eiskit
