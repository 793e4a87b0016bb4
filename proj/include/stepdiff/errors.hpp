#pragma once

#include <stdexcept>
#include <string>

namespace stepdiff {

/// A caller broke an API precondition (size mismatch, misaligned grids, ...).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A configuration (file or programmatic) is invalid or inconsistent.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A component was asked for a feature it does not provide
/// (e.g. truncated conditional moments on a model without them).
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A simulation produced an invalid state (non-finite values, ...).
/// Carries the step index and a rendering of the offending state.
class ModelRuntimeError : public std::runtime_error {
public:
    ModelRuntimeError(const std::string& msg, long step)
        : std::runtime_error(msg), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace stepdiff
