#pragma once

#include <stdexcept>
#include <string>

namespace uexp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (p >= n, q not in (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Result not representable in double precision, or argument outside the supported range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// FunctionalSpec is missing parameters or carries parameters its kind does not accept.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Malformed observations or data file content.
class InputError : public Error {
public:
    using Error::Error;
};

/// Inversion or quadrature configuration that cannot be honoured.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Transfer function whose inverse Laplace transform is not an ordinary function.
class UnsupportedTransformError : public Error {
public:
    using Error::Error;
};

/// Estimator is not differentiable (or has zero derivative) at the expansion point.
class NondifferentiableError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical Laplace inversion did not settle: results at two orders disagree.
class NumericalInversionError : public Error {
public:
    NumericalInversionError(const std::string& what, double value, double lower_order_value)
        : Error(what), value_(value), lower_order_value_(lower_order_value) {}

    double value() const noexcept { return value_; }
    double lower_order_value() const noexcept { return lower_order_value_; }

private:
    double value_;
    double lower_order_value_;
};

/// Adaptive quadrature failed to reach its tolerance; carries the partial result.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double partial, double error_estimate)
        : Error(what), partial_(partial), error_estimate_(error_estimate) {}

    double partial() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

}  // namespace uexp
