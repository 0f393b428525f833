#include "uexp/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "uexp/detail/format.hpp"
#include "uexp/detail/sift.hpp"
#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"
#include "uexp/laplace.hpp"
#include "uexp/special_fns.hpp"

namespace uexp {

namespace {

void require_mean(double sample_mean) {
    if (!(sample_mean > 0.0) || !std::isfinite(sample_mean)) {
        throw DomainError("sample mean must be finite and positive, got " +
                          detail::format_double(sample_mean));
    }
}

void require_n(std::int64_t n) {
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
}

void require_t(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("t must be finite and positive, got " + detail::format_double(t));
    }
}

using detail::sift_term;

// ln|Gamma(z)| for z that may be negative (non-integer).
double log_abs_gamma(double z) {
    if (z <= 0.0 && std::floor(z) == z) {
        throw DomainError("Gamma has a pole at " + detail::format_double(z));
    }
    return boost::math::lgamma(z);
}

}  // namespace

double target_value(const FunctionalSpec& spec, double lambda) {
    spec.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be finite and positive");
    }
    switch (spec.kind) {
        case Kind::RatePower:
            return std::pow(lambda, *spec.p);
        case Kind::Quantile:
            return -std::log1p(-*spec.q) / lambda;
        case Kind::Moment:
            return std::exp(log_gamma(*spec.p + 1.0) - *spec.p * std::log(lambda));
        case Kind::Survival:
            return std::exp(-lambda * *spec.t);
        case Kind::MaxCdfPower:
            return std::pow(-std::expm1(-lambda * *spec.t), static_cast<double>(*spec.m));
        case Kind::MinSurvival:
            return std::exp(-lambda * static_cast<double>(*spec.m) * *spec.t);
        case Kind::Pdf:
            return lambda * std::exp(-lambda * *spec.t);
        case Kind::MeanPastLifetime:
            return *spec.t / (-std::expm1(-lambda * *spec.t)) - 1.0 / lambda;
        case Kind::Mgf:
            if (!(*spec.t < lambda)) {
                throw DomainError("MGF target is infinite for t >= lambda");
            }
            return lambda / (lambda - *spec.t);
        case Kind::ExpectedShortfall:
            return (-std::log1p(-*spec.p) + 1.0) / lambda;
        case Kind::Custom:
            return static_cast<double>(spec.custom_transform->eval_real(static_cast<long double>(lambda)));
    }
    throw SpecError("unknown functional kind");
}

double rate_power(double sample_mean, std::int64_t n, double p, bool allow_negative_integer) {
    require_mean(sample_mean);
    require_n(n);
    if (!std::isfinite(p) || !(p < static_cast<double>(n))) {
        throw DomainError("rate-power requires p < n (p=" + detail::format_double(p) +
                          ", n=" + std::to_string(n) + ")");
    }
    if (p <= 0.0 && std::floor(p) == p && !(allow_negative_integer && p < 0.0)) {
        throw DomainError("rate-power exponent must not be zero or a negative integer");
    }
    const auto nd = static_cast<double>(n);
    const double log_coeff = log_gamma(nd) - p * std::log(nd) - log_gamma(nd - p);
    return std::exp(log_coeff - p * std::log(sample_mean));
}

double quantile(double sample_mean, double q) {
    require_mean(sample_mean);
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    return -std::log1p(-q) * sample_mean;
}

double moment(double sample_mean, std::int64_t n, double p) {
    require_mean(sample_mean);
    require_n(n);
    if (!(p > -1.0) || !std::isfinite(p)) {
        throw DomainError("moment order must exceed -1");
    }
    const auto nd = static_cast<double>(n);
    const double log_coeff =
        log_gamma(p + 1.0) + log_gamma(nd) + p * std::log(nd) - log_gamma(p + nd);
    return std::exp(log_coeff + p * std::log(sample_mean));
}

double survival(double sample_mean, std::int64_t n, double t) {
    require_mean(sample_mean);
    require_n(n);
    require_t(t);
    return sift_term(t / (static_cast<double>(n) * sample_mean), n - 1);
}

double max_cdf_power(double sample_mean, std::int64_t n, double t, std::int64_t m) {
    require_mean(sample_mean);
    require_n(n);
    require_t(t);
    if (m < 1) {
        throw DomainError("m must be >= 1");
    }
    const double scale = static_cast<double>(n) * sample_mean;
    detail::CompensatedSum<double> sum;
    sum += 1.0;
    double binom = 1.0;
    for (std::int64_t k = 1; k <= m; ++k) {
        binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
        const double a = static_cast<double>(k) * t / scale;
        if (a > 1.0) break;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom * sift_term(a, n - 1);
    }
    return sum.value();
}

double min_survival(double sample_mean, std::int64_t n, double t, std::int64_t m) {
    require_mean(sample_mean);
    require_n(n);
    require_t(t);
    if (m < 1) {
        throw DomainError("m must be >= 1");
    }
    return sift_term(static_cast<double>(m) * t / (static_cast<double>(n) * sample_mean), n - 1);
}

double pdf_at(double sample_mean, std::int64_t n, double t) {
    require_mean(sample_mean);
    require_t(t);
    if (n < 2) {
        throw DomainError("pdf estimator requires n >= 2");
    }
    const auto nd = static_cast<double>(n);
    const double a = t / (nd * sample_mean);
    if (a > 1.0) return 0.0;
    return (nd - 1.0) / nd / sample_mean * sift_term(a, n - 2);
}

double mean_past_lifetime_sum(double sample_mean, std::int64_t n, double t, std::int64_t last_k) {
    require_mean(sample_mean);
    require_n(n);
    require_t(t);
    const double scale = static_cast<double>(n) * sample_mean;
    detail::CompensatedSum<double> sum;
    for (std::int64_t k = 0; k <= last_k; ++k) {
        sum += sift_term(static_cast<double>(k) * t / scale, n - 1);
    }
    return t * sum.value() - sample_mean;
}

double mean_past_lifetime(double sample_mean, std::int64_t n, double t) {
    require_mean(sample_mean);
    require_n(n);
    require_t(t);
    const double scale = static_cast<double>(n) * sample_mean;
    const double k_max = std::floor(scale / t);
    if (n == 1) {
        // every surviving term equals 1
        return t * (k_max + 1.0) - sample_mean;
    }
    detail::CompensatedSum<double> sum;
    for (double k = 0.0; k <= k_max; k += 1.0) {
        const double term = sift_term(k * t / scale, n - 1);
        sum += term;
        // terms decrease in k; stop when the rest cannot move the sum
        if (term * (k_max - k) < 1e-3 * std::numeric_limits<double>::epsilon() * sum.value()) {
            break;
        }
    }
    return t * sum.value() - sample_mean;
}

double mgf(double sample_mean, std::int64_t n, double t) {
    require_mean(sample_mean);
    require_n(n);
    if (!std::isfinite(t)) {
        throw DomainError("MGF argument must be finite");
    }
    if (t == 0.0) return 1.0;
    const double u = static_cast<double>(n) * t * sample_mean;
    if (std::abs(u) > kIncompleteGammaMaxArg) {
        throw RangeError("MGF estimator overflows: |n t xbar| = " + detail::format_double(std::abs(u)) +
                         " exceeds 700");
    }
    const double value = 1.0 + u * lower_gamma_kernel(n, u);
    if (!std::isfinite(value)) {
        throw RangeError("MGF estimator overflows");
    }
    return value;
}

double expected_shortfall(double sample_mean, double level) {
    require_mean(sample_mean);
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("expected-shortfall level must lie in (0, 1)");
    }
    return (-std::log1p(-level) + 1.0) * sample_mean;
}

double closed_form_at(const FunctionalSpec& spec, std::int64_t n, double sample_mean) {
    spec.validate_for(n);
    switch (spec.kind) {
        case Kind::RatePower:
            return rate_power(sample_mean, n, *spec.p, spec.allow_negative_integer_power);
        case Kind::Quantile:
            return quantile(sample_mean, *spec.q);
        case Kind::Moment:
            return moment(sample_mean, n, *spec.p);
        case Kind::Survival:
            return survival(sample_mean, n, *spec.t);
        case Kind::MaxCdfPower:
            return max_cdf_power(sample_mean, n, *spec.t, *spec.m);
        case Kind::MinSurvival:
            return min_survival(sample_mean, n, *spec.t, *spec.m);
        case Kind::Pdf:
            return pdf_at(sample_mean, n, *spec.t);
        case Kind::MeanPastLifetime:
            return mean_past_lifetime(sample_mean, n, *spec.t);
        case Kind::Mgf:
            return mgf(sample_mean, n, *spec.t);
        case Kind::ExpectedShortfall:
            return expected_shortfall(sample_mean, *spec.p);
        case Kind::Custom:
            throw SpecError("custom functionals have no closed form; use generic_unbiased_estimate");
    }
    throw SpecError("unknown functional kind");
}

EstimateResult estimate(const FunctionalSpec& spec, const Sample& sample) {
    return {closed_form_at(spec, sample.size(), sample.mean()), spec, sample.size(),
            EstimatorFamily::ClosedFormUnbiased};
}

EstimateResult mle_estimate(const FunctionalSpec& spec, const Sample& sample) {
    spec.validate();
    double value;
    if (spec.kind == Kind::Moment) {
        detail::CompensatedSum<double> sum;
        for (double x : sample.observations()) {
            sum += std::pow(x, *spec.p);
        }
        value = sum.value() / static_cast<double>(sample.size());
    } else {
        value = target_value(spec, 1.0 / sample.mean());
    }
    return {value, spec, sample.size(), EstimatorFamily::MlePlugin};
}

double mle_moment_plugin(double sample_mean, double p) {
    require_mean(sample_mean);
    if (!(p > -1.0)) {
        throw DomainError("moment order must exceed -1");
    }
    return std::exp(log_gamma(p + 1.0) + p * std::log(sample_mean));
}

double closed_form_variance_unbiased(double p, std::int64_t n, double lambda) {
    require_n(n);
    const auto nd = static_cast<double>(n);
    if (!(p > -nd / 2.0) || !std::isfinite(p)) {
        throw DomainError("unbiased moment variance requires p > -n/2");
    }
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    const double scale = std::exp(2.0 * log_abs_gamma(p + 1.0) - 2.0 * p * std::log(lambda));
    const double excess =
        std::expm1(log_gamma(nd) + log_gamma(2.0 * p + nd) - 2.0 * log_gamma(p + nd));
    return scale * excess;
}

double closed_form_variance_mle(double p, std::int64_t n, double lambda) {
    require_n(n);
    if (!(p > -0.5) || !std::isfinite(p)) {
        throw DomainError("MLE moment variance requires p > -1/2");
    }
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    const double lg1 = log_gamma(p + 1.0);
    const double scale = std::exp(2.0 * lg1 - 2.0 * p * std::log(lambda));
    return scale * std::expm1(log_gamma(2.0 * p + 1.0) - 2.0 * lg1) / static_cast<double>(n);
}

}  // namespace uexp
