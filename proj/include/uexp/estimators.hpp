#pragma once

#include <cstdint>

#include "uexp/functional.hpp"
#include "uexp/sample.hpp"

namespace uexp {

// Closed-form unbiased estimators phi(xbar) of xi(lambda) for X ~ exp(lambda).
// Each depends on the sample only through its mean xbar and size n.
// Indicators 1{xbar >= k t / n} are evaluated with >=.

/// xi(lambda) for the given functional. Mgf with t >= lambda raises DomainError.
double target_value(const FunctionalSpec& spec, double lambda);

/// Gamma(n) / (n^p Gamma(n-p)) * xbar^{-p}; requires p < n.
double rate_power(double sample_mean, std::int64_t n, double p,
                  bool allow_negative_integer = false);

/// -ln(1-q) * xbar.
double quantile(double sample_mean, double q);

/// Gamma(p+1) Gamma(n) n^p / Gamma(p+n) * xbar^p; requires p > -1.
double moment(double sample_mean, std::int64_t n, double p);

/// (1 - t/(n xbar))^{n-1} 1{xbar >= t/n}.
double survival(double sample_mean, std::int64_t n, double t);

/// 1 + sum_{k=1}^m C(m,k) (-1)^k (1 - k t/(n xbar))^{n-1} 1{xbar >= k t/n}.
double max_cdf_power(double sample_mean, std::int64_t n, double t, std::int64_t m);

/// (1 - m t/(n xbar))^{n-1} 1{xbar >= m t/n}.
double min_survival(double sample_mean, std::int64_t n, double t, std::int64_t m);

/// ((n-1)/n) (1/xbar) (1 - t/(n xbar))^{n-2} 1{xbar >= t/n}; requires n >= 2.
double pdf_at(double sample_mean, std::int64_t n, double t);

/// t * sum_{k>=0} (1 - t k/(n xbar))^{n-1} 1{xbar >= t k/n} - xbar.
///
/// The sum stops at K = floor(n xbar / t); for n >= 2 it may stop earlier
/// once the remaining terms are below double resolution.
double mean_past_lifetime(double sample_mean, std::int64_t n, double t);

/// Same estimator with the sum taken literally over k = 0..last_k (no early exit).
double mean_past_lifetime_sum(double sample_mean, std::int64_t n, double t, std::int64_t last_k);

/// e^{n t xbar} gamma(n, n t xbar) / (n t xbar)^{n-1} + 1; t = 0 returns 1.
///
/// Evaluated as 1 + u E(n, u) with u = n t xbar and E the scaled incomplete
/// gamma kernel. |u| > 700 raises RangeError.
double mgf(double sample_mean, std::int64_t n, double t);

/// (-ln(1-level) + 1) * xbar.
double expected_shortfall(double sample_mean, double level);

/// Dispatches to the closed form for spec.kind at the given sample mean.
/// Validates spec for n; Custom raises SpecError.
double closed_form_at(const FunctionalSpec& spec, std::int64_t n, double sample_mean);

/// Closed-form unbiased estimate; family = ClosedFormUnbiased.
EstimateResult estimate(const FunctionalSpec& spec, const Sample& sample);

/// Plug-in maximum likelihood estimate xi(1/xbar); for Moment the sample
/// average of X_i^p is returned instead. family = MlePlugin.
EstimateResult mle_estimate(const FunctionalSpec& spec, const Sample& sample);

/// Plug-in Gamma(p+1) xbar^p, the alternative MLE of the p-th moment.
double mle_moment_plugin(double sample_mean, double p);

/// Exact variance of the unbiased p-th moment estimator; requires p > -n/2.
double closed_form_variance_unbiased(double p, std::int64_t n, double lambda);

/// Exact variance of (1/n) sum X_i^p; requires p > -1/2.
double closed_form_variance_mle(double p, std::int64_t n, double lambda);

}  // namespace uexp
