#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uexp/execution.hpp"
#include "uexp/functional.hpp"

namespace uexp {

/// Density of the sample mean of n exp(lambda) draws, Gamma(n, n lambda), evaluated in log space.
double gamma_mean_density(double x, std::int64_t n, double lambda);

struct ExpectationOptions {
    /// Points where the estimator is not smooth; the domain is split there.
    std::vector<double> kinks;
    /// Exponential rate of the integrand's tail; 0 means n * lambda. Estimators that
    /// grow exponentially (the MGF) need the slower effective rate to place the cut-off.
    double tail_rate = 0.0;
    int max_refinements = 15;
};

struct Expectation {
    double value = 0.0;
    double err_estimate = 0.0;
};

/// E[estimator(xbar)] for xbar ~ Gamma(n, n lambda), by tanh-sinh quadrature on
/// (0, U] split at the kinks and around the bulk of the density. U leaves tail mass
/// below 1e-17. Throws QuadratureError carrying the partial result when the summed
/// error estimate exceeds rel_tol * |value|.
Expectation expectation(const std::function<double(double)>& estimator, std::int64_t n,
                        double lambda, double rel_tol, const ExpectationOptions& options = {});

struct VerificationReport {
    FunctionalSpec spec;
    std::int64_t n = 0;
    double lambda = 0.0;
    double oracle_expectation = 0.0;
    /// The value the estimator is expected to average to: xi(lambda) for unbiased
    /// estimators, the closed-form biased expectation for Tate's.
    double target = 0.0;
    /// xi(lambda) itself; differs from `target` only for Tate reports.
    double functional_value = 0.0;
    double abs_bias = 0.0;
    double rel_bias = 0.0;
    double quad_abs_err_estimate = 0.0;
    double rel_tol = 0.0;
    EstimatorFamily estimator_family = EstimatorFamily::ClosedFormUnbiased;
};

/// Kink points below `upper` of the closed-form estimator for `spec` (Tate's
/// max-cdf-power estimator kinks at the same points).
std::vector<double> kink_points(const FunctionalSpec& spec, std::int64_t n, double upper);

/// Quadrature expectation of the closed-form estimator against target_value.
VerificationReport verify_unbiasedness(const FunctionalSpec& spec, std::int64_t n, double lambda,
                                       double rel_tol);

// Tate's estimators phi*(xbar) = Gamma(n-1)/xbar^{n-2} L^{-1}{xi(s/n)/s^{n-1}}(xbar),
// in closed form for RatePower, Quantile and MaxCdfPower. They are biased.

/// phi*(xbar); n >= 2, RatePower requires p < n - 1.
double tate_estimator_at(const FunctionalSpec& spec, std::int64_t n, double sample_mean);

EstimateResult tate_estimate(const FunctionalSpec& spec, double sample_mean, std::int64_t n);

/// E[phi*(xbar)] as tabulated for the three kinds. The MaxCdfPower row is implemented
/// as written, with the factor 1/(1 - e^{lambda t}).
double tate_expected_value(const FunctionalSpec& spec, std::int64_t n, double lambda);

/// Quadrature expectation of phi* against tate_expected_value.
VerificationReport verify_tate(const FunctionalSpec& spec, std::int64_t n, double lambda,
                               double rel_tol);

struct GridCell {
    FunctionalSpec spec;
    std::int64_t n = 1;
    double lambda = 1.0;
};

struct SweepRow {
    GridCell cell;
    std::optional<VerificationReport> report;
    /// Set when the cell raised; the sweep continues with the remaining cells.
    std::string failure;
    bool numerical_failure = false;
};

/// Runs verify_unbiasedness (or verify_tate) over every cell. Rows come back in
/// cell order whatever the execution mode.
std::vector<SweepRow> verify_sweep(std::span<const GridCell> cells, double rel_tol, bool tate,
                                   Execution execution);

}  // namespace uexp
