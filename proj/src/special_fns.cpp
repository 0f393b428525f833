#include "uexp/special_fns.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"

namespace uexp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_order(std::int64_t n) {
    if (n < 1) {
        throw RangeError("incomplete gamma order must be >= 1, got " + std::to_string(n));
    }
}

void require_argument(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("incomplete gamma argument must be finite");
    }
    if (std::abs(x) > kIncompleteGammaMaxArg) {
        throw RangeError("incomplete gamma argument |x| > 700 is outside the supported range");
    }
}

// sum_{k>=0} u^k / (n (n+1) ... (n+k)) for u > 0.
double kernel_positive(double n, double u) {
    detail::CompensatedSum<double> sum;
    double term = 1.0 / n;
    for (int k = 0; k < 100000; ++k) {
        sum += term;
        // terms increase while u > n + k + 1; only stop on the decreasing tail
        if (u < n + k + 1.0 && term < kEps * 0.25 * sum.value()) {
            break;
        }
        term *= u / (n + k + 1.0);
    }
    return sum.value();
}

// e^{-a} sum_{k>=0} a^k / (k! (n+k)) for a = -u > 0.
double kernel_negative(double n, double a) {
    detail::CompensatedSum<double> sum;
    double pmf = std::exp(-a);
    for (int k = 0; k < 100000; ++k) {
        const double term = pmf / (n + k);
        sum += term;
        if (k > a && term < kEps * 0.25 * sum.value()) {
            break;
        }
        pmf *= a / (k + 1.0);
    }
    return sum.value();
}

}  // namespace

PosReal::PosReal(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError("expected a finite positive real, got " + std::to_string(value));
    }
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma requires finite x > 0, got " + std::to_string(x));
    }
    return boost::math::lgamma(x);
}

double log_gamma_ratio(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("gamma_ratio requires positive arguments");
    }
    return log_gamma(a) - log_gamma(b);
}

double gamma_ratio(double a, double b) {
    return std::exp(log_gamma_ratio(a, b));
}

double lower_gamma_kernel(std::int64_t n, double u) {
    require_order(n);
    require_argument(u);
    const auto nd = static_cast<double>(n);
    if (u == 0.0) {
        return 1.0 / nd;
    }
    return u > 0.0 ? kernel_positive(nd, u) : kernel_negative(nd, -u);
}

double lower_incomplete_gamma_int(std::int64_t n, double x) {
    require_order(n);
    require_argument(x);
    if (x == 0.0) {
        return 0.0;
    }
    const auto nd = static_cast<double>(n);
    double result;
    if (x >= nd + 1.0) {
        // (n-1)! (1 - e^{-x} sum_{k<n} x^k/k!); the Poisson tail here is below ~1/2,
        // so the subtraction is benign.
        detail::CompensatedSum<double> tail;
        double pmf = std::exp(-x);
        for (std::int64_t k = 0; k < n; ++k) {
            tail += pmf;
            pmf *= x / static_cast<double>(k + 1);
        }
        result = std::exp(log_gamma(nd)) * (1.0 - tail.value());
    } else {
        // gamma(n,x) = x^n e^{-x} E(n,x); E has a positive series for either sign of x.
        const double log_mag = nd * std::log(std::abs(x)) - x + std::log(lower_gamma_kernel(n, x));
        const double sign = (x < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
        result = sign * std::exp(log_mag);
    }
    if (!std::isfinite(result)) {
        throw RangeError("lower incomplete gamma overflows for n=" + std::to_string(n) +
                         ", x=" + std::to_string(x));
    }
    return result;
}

}  // namespace uexp
