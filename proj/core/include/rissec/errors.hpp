// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rissec {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument sits on (or within tolerance of) a pole of a Gamma-type factor.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An iterative evaluation (contour integral, series, continued fraction)
/// failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not reach the requested tolerance. Carries the
/// best estimate so callers can still report it.
class QuadratureError : public ConvergenceError {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : ConvergenceError(what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// A closed-form path does not support the requested parameters (for
/// example a non-integer Meijer-G multiplicity).
class UnsupportedParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid user configuration. `field()` is a dotted path into the config.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)), message_(what) {}

    const std::string& field() const noexcept { return field_; }
    /// what() without the field prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

}  // namespace rissec
