#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "uexp/execution.hpp"
#include "uexp/functional.hpp"
#include "uexp/rng.hpp"
#include "uexp/sample.hpp"

namespace uexp {

struct McConfig {
    std::int64_t replications = 1;
    std::int64_t n = 1;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    /// Number of OpenMP threads splitting the replication loop; 1 runs serially.
    /// Results do not depend on it.
    std::int64_t parallel_chunks = 1;

    void validate() const;
};

struct McSummary {
    double mean = 0.0;
    double variance = 0.0;     // unbiased (R - 1 denominator)
    double std_error = 0.0;    // sqrt(variance / replications)
    std::int64_t replications = 0;
    std::optional<double> ks_statistic;
    /// (skewness, excess kurtosis)
    std::optional<std::pair<double, double>> standardized_moments;
    /// Standard error of `variance` itself, from the fourth central moment.
    double variance_std_error = 0.0;
};

/// n draws from exp(lambda) on `stream`.
Sample sample_exponential(double lambda, std::int64_t n, Substream& stream);

/// Statistic evaluated on one replication's observations; writes `width` outputs.
using ReplicationStatistic = std::function<void(std::span<const double>, std::span<double>)>;

/// Outputs of every replication, column-major: column k holds output k of all replications.
struct ReplicationTable {
    std::int64_t replications = 0;
    std::int64_t width = 0;
    std::vector<double> values;

    std::span<const double> column(std::int64_t k) const {
        return std::span<const double>(values).subspan(static_cast<std::size_t>(k * replications),
                                                       static_cast<std::size_t>(replications));
    }
};

/// Reference kernel: replications in index order on the calling thread.
ReplicationTable replicate_serial(const McConfig& config, std::int64_t width,
                                  const ReplicationStatistic& statistic);

/// OpenMP kernel over config.parallel_chunks threads; bit-identical to replicate_serial.
/// An exception from the statistic is rethrown for the lowest failing replication.
ReplicationTable replicate_parallel(const McConfig& config, std::int64_t width,
                                    const ReplicationStatistic& statistic);

/// Dispatches on config.parallel_chunks.
ReplicationTable replicate(const McConfig& config, std::int64_t width,
                           const ReplicationStatistic& statistic);

struct SummaryOptions {
    bool ks_against_normal = false;
    bool standardized_moments = false;
};

/// Mean, variance and higher moments with a fixed blocked reduction order, so the
/// result does not depend on how the values were produced.
McSummary summarize(std::span<const double> values, const SummaryOptions& options = {});

/// sup |F_empirical - Phi| against the standard normal.
double ks_statistic_normal(std::span<const double> values);

/// Estimator of `spec` for `family` (closed form, Tate or plug-in MLE) over replications.
McSummary empirical_bias(const FunctionalSpec& spec, const McConfig& config,
                         EstimatorFamily family = EstimatorFamily::ClosedFormUnbiased);

struct VarianceComparison {
    McSummary empirical_unbiased;
    McSummary empirical_mle;
    double closed_unbiased = 0.0;
    double closed_mle = 0.0;
};

/// Unbiased moment estimator vs (1/n) sum X_i^p on the same samples; p > -1/2, p != 0.
VarianceComparison variance_comparison(double p, const McConfig& config);

/// Analytic derivative of the closed-form estimator at sample mean x. Throws
/// NondifferentiableError when x sits on an indicator kink.
double estimator_derivative(const FunctionalSpec& spec, std::int64_t n, double x);

/// [phi'(1/lambda) / lambda]^2. Throws NondifferentiableError at a kink or when
/// the derivative vanishes.
double asymptotic_variance(const FunctionalSpec& spec, std::int64_t n, double lambda);

/// Z_r = sqrt(n) (phi(xbar_r) - xi(lambda)) / sigma_n for every replication.
std::vector<double> clt_replicates(const FunctionalSpec& spec, const McConfig& config);

/// Summary of clt_replicates with the KS statistic and standardized moments.
McSummary clt_check(const FunctionalSpec& spec, const McConfig& config);

struct Histogram {
    std::vector<double> edges;          // bins + 1 entries
    std::vector<std::int64_t> counts;   // values outside [edges.front(), edges.back()] are dropped
};

Histogram histogram(std::span<const double> values, int bins, double lo, double hi);

}  // namespace uexp
