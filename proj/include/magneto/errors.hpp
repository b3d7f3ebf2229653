#pragma once

#include <stdexcept>
#include <string>

namespace magneto {

// Domain errors map to CLI exit code 1.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateMetricError : DomainError {
    using DomainError::DomainError;
};

struct UndefinedCurvatureError : DomainError {
    using DomainError::DomainError;
};

struct BlowUpError : DomainError {
    double last_valid_time;
    BlowUpError(const std::string& what, double t)
        : DomainError(what), last_valid_time(t) {}
};

struct BracketError : DomainError {
    using DomainError::DomainError;
};

struct NotOscillatingError : DomainError {
    using DomainError::DomainError;
};

struct InvalidDirectionError : DomainError {
    using DomainError::DomainError;
};

struct ClassEscapeError : DomainError {
    using DomainError::DomainError;
};

// Config errors map to CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace magneto
