#pragma once

#include <stdexcept>
#include <string>

namespace impdelay {

enum class ErrorKind {
    invalid_input,
    not_exponentially_stable,
    configuration,
    numeric_failure,
    non_convergence,
    unsupported_configuration,
    internal_consistency,
};

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

class NotExponentiallyStable : public Error {
public:
    explicit NotExponentiallyStable(const std::string& what)
        : Error(ErrorKind::not_exponentially_stable, what) {}
};

class ConfigurationError : public Error {
public:
    explicit ConfigurationError(const std::string& what)
        : Error(ErrorKind::configuration, what) {}
};

class UnsupportedConfiguration : public Error {
public:
    explicit UnsupportedConfiguration(const std::string& what)
        : Error(ErrorKind::unsupported_configuration, what) {}
};

class InternalConsistencyError : public Error {
public:
    explicit InternalConsistencyError(const std::string& what)
        : Error(ErrorKind::internal_consistency, what) {}
};

/// NaN or overflow produced while evaluating the right-hand side.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double time)
        : Error(ErrorKind::numeric_failure, what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, int iterations, double last_ratio)
        : Error(ErrorKind::non_convergence, what),
          iterations_(iterations),
          last_ratio_(last_ratio) {}

    int iterations() const noexcept { return iterations_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    int iterations_;
    double last_ratio_;
};

/// Rethrows e as the same error type with "context: " prepended to its message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace impdelay
