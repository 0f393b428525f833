#include "uexp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include <omp.h>

#include "uexp/detail/format.hpp"
#include "uexp/detail/sift.hpp"
#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/laplace.hpp"
#include "uexp/oracle.hpp"
#include "uexp/special_fns.hpp"

namespace uexp {

namespace {

// Summaries reduce in blocks of this size, combined left to right.
constexpr std::size_t kBlock = 16384;

struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
};

Moments welford(std::span<const double> values) {
    Moments m;
    for (double v : values) {
        m.count += 1.0;
        const double delta = v - m.mean;
        m.mean += delta / m.count;
        m.m2 += delta * (v - m.mean);
    }
    return m;
}

Moments combine(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments out;
    out.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * b.count / out.count;
    out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
    return out;
}

void fill_exponential(double lambda, Substream& stream, std::span<double> out) {
    for (double& x : out) x = stream.exponential(lambda);
}

void run_replication(const McConfig& config, std::int64_t width, const ReplicationStatistic& statistic,
                     std::int64_t r, std::vector<double>& obs, std::vector<double>& row,
                     ReplicationTable& table) {
    Substream stream(config.seed, static_cast<std::uint64_t>(r));
    fill_exponential(config.lambda, stream, obs);
    statistic(obs, row);
    for (std::int64_t k = 0; k < width; ++k) {
        table.values[static_cast<std::size_t>(k * config.replications + r)] = row[static_cast<std::size_t>(k)];
    }
}

ReplicationTable make_table(const McConfig& config, std::int64_t width) {
    config.validate();
    if (width < 1) {
        throw ConfigError("statistic width must be >= 1");
    }
    ReplicationTable table;
    table.replications = config.replications;
    table.width = width;
    table.values.assign(static_cast<std::size_t>(config.replications * width), 0.0);
    return table;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// d/dx (1 - c/x)^e 1{x >= c}, with a = c/x.
double sift_derivative(double a, std::int64_t e, double x) {
    if (a > 1.0) return 0.0;
    if (a == 1.0) {
        throw NondifferentiableError("estimator has a kink at xbar = " + detail::format_double(x));
    }
    if (e == 0) return 0.0;
    return static_cast<double>(e) * detail::sift_term(a, e - 1) * a / x;
}

}  // namespace

void McConfig::validate() const {
    if (replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be finite and positive");
    }
    if (parallel_chunks < 1) {
        throw ConfigError("parallel_chunks must be >= 1");
    }
}

Sample sample_exponential(double lambda, std::int64_t n, Substream& stream) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be finite and positive");
    }
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    std::vector<double> obs(static_cast<std::size_t>(n));
    fill_exponential(lambda, stream, obs);
    return Sample(std::move(obs));
}

ReplicationTable replicate_serial(const McConfig& config, std::int64_t width,
                                  const ReplicationStatistic& statistic) {
    ReplicationTable table = make_table(config, width);
    std::vector<double> obs(static_cast<std::size_t>(config.n));
    std::vector<double> row(static_cast<std::size_t>(width));
    for (std::int64_t r = 0; r < config.replications; ++r) {
        run_replication(config, width, statistic, r, obs, row, table);
    }
    return table;
}

ReplicationTable replicate_parallel(const McConfig& config, std::int64_t width,
                                    const ReplicationStatistic& statistic) {
    ReplicationTable table = make_table(config, width);
    const std::int64_t none = std::numeric_limits<std::int64_t>::max();
    std::int64_t first_failure = none;
    std::exception_ptr failure;

#pragma omp parallel num_threads(static_cast<int>(config.parallel_chunks))
    {
        std::vector<double> obs(static_cast<std::size_t>(config.n));
        std::vector<double> row(static_cast<std::size_t>(width));
        std::int64_t local_failure = none;
        std::exception_ptr local_error;
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < config.replications; ++r) {
            if (local_failure != none) continue;
            try {
                run_replication(config, width, statistic, r, obs, row, table);
            } catch (...) {
                local_failure = r;
                local_error = std::current_exception();
            }
        }
#pragma omp critical(uexp_replicate_failure)
        if (local_failure < first_failure) {
            first_failure = local_failure;
            failure = local_error;
        }
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

ReplicationTable replicate(const McConfig& config, std::int64_t width,
                           const ReplicationStatistic& statistic) {
    return config.parallel_chunks > 1 ? replicate_parallel(config, width, statistic)
                                      : replicate_serial(config, width, statistic);
}

double ks_statistic_normal(std::span<const double> values) {
    if (values.empty()) {
        throw InputError("KS statistic needs at least one value");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto count = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / count - f, f - static_cast<double>(i) / count});
    }
    return d;
}

McSummary summarize(std::span<const double> values, const SummaryOptions& options) {
    if (values.empty()) {
        throw InputError("cannot summarize zero replications");
    }
    Moments total;
    for (std::size_t start = 0; start < values.size(); start += kBlock) {
        total = combine(total, welford(values.subspan(start, std::min(kBlock, values.size() - start))));
    }
    const auto count = static_cast<double>(values.size());

    double m3 = 0.0;
    double m4 = 0.0;
    for (std::size_t start = 0; start < values.size(); start += kBlock) {
        double b3 = 0.0;
        double b4 = 0.0;
        for (double v : values.subspan(start, std::min(kBlock, values.size() - start))) {
            const double d = v - total.mean;
            const double d2 = d * d;
            b3 += d2 * d;
            b4 += d2 * d2;
        }
        m3 += b3;
        m4 += b4;
    }

    McSummary s;
    s.replications = static_cast<std::int64_t>(values.size());
    s.mean = total.mean;
    s.variance = values.size() > 1 ? total.m2 / (count - 1.0) : 0.0;
    s.std_error = std::sqrt(s.variance / count);
    const double mu2 = total.m2 / count;
    const double mu4 = m4 / count;
    if (values.size() > 1) {
        s.variance_std_error =
            std::sqrt(std::max(0.0, (mu4 - (count - 3.0) / (count - 1.0) * s.variance * s.variance) / count));
    }
    if (options.standardized_moments) {
        const double skew = mu2 > 0.0 ? (m3 / count) / std::pow(mu2, 1.5) : 0.0;
        const double kurt = mu2 > 0.0 ? mu4 / (mu2 * mu2) - 3.0 : 0.0;
        s.standardized_moments = std::make_pair(skew, kurt);
    }
    if (options.ks_against_normal) {
        s.ks_statistic = ks_statistic_normal(values);
    }
    return s;
}

McSummary empirical_bias(const FunctionalSpec& spec, const McConfig& config, EstimatorFamily family) {
    config.validate();
    const std::int64_t n = config.n;
    ReplicationStatistic statistic;
    switch (family) {
        case EstimatorFamily::ClosedFormUnbiased:
            spec.validate_for(n);
            statistic = [&spec, n](std::span<const double> obs, std::span<double> out) {
                out[0] = closed_form_at(spec, n, compensated_mean(obs));
            };
            break;
        case EstimatorFamily::TateBiased:
            statistic = [&spec, n](std::span<const double> obs, std::span<double> out) {
                out[0] = tate_estimator_at(spec, n, compensated_mean(obs));
            };
            break;
        case EstimatorFamily::MlePlugin:
            spec.validate();
            statistic = [&spec](std::span<const double> obs, std::span<double> out) {
                if (spec.kind == Kind::Moment) {
                    detail::CompensatedSum<double> sum;
                    for (double x : obs) sum += std::pow(x, *spec.p);
                    out[0] = sum.value() / static_cast<double>(obs.size());
                } else {
                    out[0] = target_value(spec, 1.0 / compensated_mean(obs));
                }
            };
            break;
        case EstimatorFamily::GenericLaplace: {
            auto xi = builtin_transform(spec);
            const InversionConfig inversion = default_inversion_config(*xi);
            statistic = [xi, n, inversion](std::span<const double> obs, std::span<double> out) {
                out[0] = generic_unbiased_at(*xi, n, compensated_mean(obs), inversion);
            };
            break;
        }
    }
    const ReplicationTable table = replicate(config, 1, statistic);
    return summarize(table.column(0));
}

VarianceComparison variance_comparison(double p, const McConfig& config) {
    if (!(p > -0.5) || p == 0.0 || !std::isfinite(p)) {
        throw DomainError("variance comparison requires p > -1/2 and p != 0, got " + detail::format_double(p));
    }
    config.validate();
    const std::int64_t n = config.n;
    const ReplicationStatistic statistic = [n, p](std::span<const double> obs, std::span<double> out) {
        out[0] = moment(compensated_mean(obs), n, p);
        detail::CompensatedSum<double> sum;
        for (double x : obs) sum += std::pow(x, p);
        out[1] = sum.value() / static_cast<double>(obs.size());
    };
    const ReplicationTable table = replicate(config, 2, statistic);
    VarianceComparison out;
    out.empirical_unbiased = summarize(table.column(0));
    out.empirical_mle = summarize(table.column(1));
    out.closed_unbiased = closed_form_variance_unbiased(p, n, config.lambda);
    out.closed_mle = closed_form_variance_mle(p, n, config.lambda);
    return out;
}

double estimator_derivative(const FunctionalSpec& spec, std::int64_t n, double x) {
    spec.validate_for(n);
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("sample mean must be finite and positive");
    }
    const auto nd = static_cast<double>(n);
    switch (spec.kind) {
        case Kind::RatePower:
            return -*spec.p * closed_form_at(spec, n, x) / x;
        case Kind::Moment:
            return *spec.p * closed_form_at(spec, n, x) / x;
        case Kind::Quantile:
            return -std::log1p(-*spec.q);
        case Kind::ExpectedShortfall:
            return -std::log1p(-*spec.p) + 1.0;
        case Kind::Survival:
            return sift_derivative(*spec.t / (nd * x), n - 1, x);
        case Kind::MinSurvival:
            return sift_derivative(static_cast<double>(*spec.m) * *spec.t / (nd * x), n - 1, x);
        case Kind::MaxCdfPower: {
            const std::int64_t m = *spec.m;
            detail::CompensatedSum<double> sum;
            double binom = 1.0;
            for (std::int64_t k = 1; k <= m; ++k) {
                binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
                const double a = static_cast<double>(k) * *spec.t / (nd * x);
                sum += ((k % 2 == 0) ? 1.0 : -1.0) * binom * sift_derivative(a, n - 1, x);
            }
            return sum.value();
        }
        case Kind::Pdf: {
            const double a = *spec.t / (nd * x);
            if (a > 1.0) return 0.0;
            if (a == 1.0) {
                throw NondifferentiableError("estimator has a kink at xbar = " + detail::format_double(x));
            }
            const double c = (nd - 1.0) / nd;
            double d = -c / (x * x) * detail::sift_term(a, n - 2);
            if (n > 2) {
                d += c / x * (nd - 2.0) * detail::sift_term(a, n - 3) * a / x;
            }
            return d;
        }
        case Kind::MeanPastLifetime: {
            const double t = *spec.t;
            detail::CompensatedSum<double> sum;
            for (double k = 1.0; k * t <= nd * x; k += 1.0) {
                sum += sift_derivative(k * t / (nd * x), n - 1, x);
            }
            return t * sum.value() - 1.0;
        }
        case Kind::Mgf: {
            const double t = *spec.t;
            const double u = nd * t * x;
            if (std::abs(u) > kIncompleteGammaMaxArg) {
                throw RangeError("MGF estimator derivative overflows");
            }
            return nd * t * ((u + 1.0 - nd) * lower_gamma_kernel(n, u) + 1.0);
        }
        case Kind::Custom:
            throw SpecError("custom functionals have no analytic derivative");
    }
    throw SpecError("unknown functional kind");
}

double asymptotic_variance(const FunctionalSpec& spec, std::int64_t n, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be finite and positive");
    }
    const double d = estimator_derivative(spec, n, 1.0 / lambda);
    if (d == 0.0) {
        throw NondifferentiableError("estimator derivative vanishes at 1/lambda; the normal limit is degenerate");
    }
    const double s = d / lambda;
    return s * s;
}

std::vector<double> clt_replicates(const FunctionalSpec& spec, const McConfig& config) {
    config.validate();
    const std::int64_t n = config.n;
    const double sigma = std::sqrt(asymptotic_variance(spec, n, config.lambda));
    const double xi = target_value(spec, config.lambda);
    const double root_n = std::sqrt(static_cast<double>(n));
    const ReplicationStatistic statistic = [&spec, n, sigma, xi, root_n](std::span<const double> obs,
                                                                       std::span<double> out) {
        out[0] = root_n * (closed_form_at(spec, n, compensated_mean(obs)) - xi) / sigma;
    };
    ReplicationTable table = replicate(config, 1, statistic);
    return std::move(table.values);
}

McSummary clt_check(const FunctionalSpec& spec, const McConfig& config) {
    const std::vector<double> z = clt_replicates(spec, config);
    return summarize(z, {.ks_against_normal = true, .standardized_moments = true});
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConfigError("histogram needs bins >= 1 and finite lo < hi");
    }
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + i * width;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        if (!(v >= lo && v <= hi)) continue;
        auto idx = static_cast<std::int64_t>(std::floor((v - lo) / width));
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

}  // namespace uexp
