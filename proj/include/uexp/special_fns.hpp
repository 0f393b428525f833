#pragma once

#include <cstdint>

namespace uexp {

/// Strictly positive, finite real. Construction throws DomainError otherwise.
class PosReal {
public:
    explicit PosReal(double value);
    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_;
};

/// ln Gamma(x) for finite x > 0.
double log_gamma(double x);

/// Gamma(a)/Gamma(b), evaluated as exp(ln Gamma(a) - ln Gamma(b)).
double gamma_ratio(double a, double b);

/// ln(Gamma(a)/Gamma(b)).
double log_gamma_ratio(double a, double b);

/// Lower incomplete gamma function gamma(n, x) for integer order n >= 1.
///
/// Valid for negative x as well (the integral from 0 to x is taken literally);
/// |x| is limited to 700 and larger arguments raise RangeError.
double lower_incomplete_gamma_int(std::int64_t n, double x);

/// Scaled kernel e^u gamma(n, u) / u^n, an entire function of u equal to
/// the integral of (1-w)^(n-1) e^(u w) over w in [0, 1].
///
/// All series involved have positive terms, so no cancellation occurs for
/// either sign of u. |u| <= 700.
double lower_gamma_kernel(std::int64_t n, double u);

/// Largest |x| accepted by the incomplete gamma routines.
inline constexpr double kIncompleteGammaMaxArg = 700.0;

}  // namespace uexp
