#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcal {

/// Coarse failure category, used by callers (e.g. the CLI) to map failures
/// to exit codes without parsing message text.
enum class ErrorCategory { Config, Data, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Malformed or inconsistent run configuration (unknown key, bad value, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message)
        : Error(ErrorCategory::Config, message) {}
};

/// Malformed or inconsistent input data (CSV parse failures, frame
/// validation failures, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& message)
        : Error(ErrorCategory::Data, message) {}
};

/// Numerical failure: domain violations (e.g. an infeasible correlation
/// matrix) or a computation that cannot proceed.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message)
        : Error(ErrorCategory::Numerical, message) {}
};

/// A symmetric system handed to the solver is singular (or not positive
/// definite) at the reported pivot. The pivot index identifies the first
/// failing leading minor, which usually points at a collinear column.
class SingularSystem : public NumericalError {
public:
    SingularSystem(std::size_t pivot_index, const std::string& message)
        : NumericalError(message), pivot_index_(pivot_index) {}

    std::size_t pivot_index() const noexcept { return pivot_index_; }

private:
    std::size_t pivot_index_;
};

} // namespace dcal
