#include "uexp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <omp.h>

#include "uexp/detail/format.hpp"
#include "uexp/detail/sift.hpp"
#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/quadrature.hpp"
#include "uexp/special_fns.hpp"

namespace uexp {

namespace {

constexpr double kTailMass = 1e-17;
constexpr double kRelBiasFloor = 1e-300;
// exp() underflows below this; the estimator is not evaluated there.
constexpr double kLogUnderflow = -745.0;

void require_rate(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be finite and positive, got " + detail::format_double(lambda));
    }
}

double upper_limit(std::int64_t n, double rate) {
    return boost::math::gamma_q_inv(static_cast<double>(n), kTailMass) / rate;
}

double tail_rate_for(const FunctionalSpec& spec, std::int64_t n, double lambda) {
    if (spec.kind == Kind::Mgf && *spec.t > 0.0) {
        return static_cast<double>(n) * (lambda - *spec.t);
    }
    return static_cast<double>(n) * lambda;
}

VerificationReport make_report(const FunctionalSpec& spec, std::int64_t n, double lambda,
                               double rel_tol, const Expectation& e, double target,
                               double functional_value, EstimatorFamily family) {
    VerificationReport r;
    r.spec = spec;
    r.n = n;
    r.lambda = lambda;
    r.oracle_expectation = e.value;
    r.target = target;
    r.functional_value = functional_value;
    r.abs_bias = std::abs(e.value - target);
    r.rel_bias = r.abs_bias / std::max(std::abs(target), kRelBiasFloor);
    r.quad_abs_err_estimate = e.err_estimate;
    r.rel_tol = rel_tol;
    r.estimator_family = family;
    return r;
}

void require_tate_kind(const FunctionalSpec& spec) {
    if (spec.kind != Kind::RatePower && spec.kind != Kind::Quantile && spec.kind != Kind::MaxCdfPower) {
        throw SpecError("Tate estimators exist for rate-power, quantile and max-cdf-power only, not " +
                        std::string(kind_name(spec.kind)));
    }
}

}  // namespace

double gamma_mean_density(double x, std::int64_t n, double lambda) {
    require_rate(lambda);
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    if (!(x > 0.0)) return 0.0;
    const auto nd = static_cast<double>(n);
    const double rate = nd * lambda;
    return std::exp(nd * std::log(rate) + (nd - 1.0) * std::log(x) - rate * x - log_gamma(nd));
}

Expectation expectation(const std::function<double(double)>& estimator, std::int64_t n,
                        double lambda, double rel_tol, const ExpectationOptions& options) {
    require_rate(lambda);
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    if (!(rel_tol > 0.0)) {
        throw ConfigError("rel_tol must be positive");
    }
    const auto nd = static_cast<double>(n);
    const double rate = nd * lambda;
    const double tail_rate = options.tail_rate > 0.0 ? options.tail_rate : rate;
    const double upper = upper_limit(n, tail_rate);

    std::vector<double> breaks{0.0, upper};
    for (double k : options.kinks) {
        if (k > 0.0 && k < upper) breaks.push_back(k);
    }
    const double mean = nd / tail_rate;
    const double sd = std::sqrt(nd) / tail_rate;
    for (int k = -8; k <= 8; ++k) {
        const double x = mean + k * sd;
        if (x > 0.0 && x < upper) breaks.push_back(x);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double log_norm = nd * std::log(rate) - log_gamma(nd);
    const auto integrand = [&](double x) {
        const double log_density = log_norm + (nd - 1.0) * std::log(x) - rate * x;
        if (log_density < kLogUnderflow) return 0.0;
        return estimator(x) * std::exp(log_density);
    };
    QuadratureResult q =
        integrate_piecewise(integrand, breaks, false, rel_tol / 4.0, options.max_refinements);
    // a signed estimator cancels: tighten by |value| / L1 so the check against |value| can pass
    if (q.error > rel_tol * std::abs(q.value) && std::abs(q.value) < q.l1) {
        const double tighter = std::max(rel_tol / 4.0 * std::abs(q.value) / q.l1, 1e-15);
        const QuadratureResult again =
            integrate_piecewise(integrand, breaks, false, tighter, options.max_refinements);
        if (again.error < q.error) q = again;
    }
    if (!(q.error <= rel_tol * std::abs(q.value)) || !std::isfinite(q.value)) {
        throw QuadratureError("expectation did not reach rel_tol " + detail::format_double(rel_tol) +
                                  " (error estimate " + detail::format_double(q.error) + ")",
                              q.value, q.error);
    }
    return {q.value, q.error};
}

std::vector<double> kink_points(const FunctionalSpec& spec, std::int64_t n, double upper) {
    const auto nd = static_cast<double>(n);
    std::vector<double> kinks;
    const auto add_multiples = [&](double step, double count) {
        for (double k = 1.0; k <= count; k += 1.0) {
            const double x = k * step;
            if (x > upper) break;
            kinks.push_back(x);
        }
    };
    switch (spec.kind) {
        case Kind::Survival:
        case Kind::Pdf:
            kinks.push_back(*spec.t / nd);
            break;
        case Kind::MinSurvival:
            kinks.push_back(static_cast<double>(*spec.m) * *spec.t / nd);
            break;
        case Kind::MaxCdfPower:
            add_multiples(*spec.t / nd, static_cast<double>(*spec.m));
            break;
        case Kind::MeanPastLifetime:
            add_multiples(*spec.t / nd, std::ceil(nd * upper / *spec.t));
            break;
        default:
            break;
    }
    std::erase_if(kinks, [upper](double x) { return x > upper; });
    return kinks;
}

VerificationReport verify_unbiasedness(const FunctionalSpec& spec, std::int64_t n, double lambda,
                                       double rel_tol) {
    spec.validate_for(n);
    const double target = target_value(spec, lambda);
    ExpectationOptions options;
    options.tail_rate = tail_rate_for(spec, n, lambda);
    options.kinks = kink_points(spec, n, upper_limit(n, options.tail_rate));
    const Expectation e = expectation(
        [&](double x) { return closed_form_at(spec, n, x); }, n, lambda, rel_tol, options);
    return make_report(spec, n, lambda, rel_tol, e, target, target,
                       EstimatorFamily::ClosedFormUnbiased);
}

double tate_estimator_at(const FunctionalSpec& spec, std::int64_t n, double sample_mean) {
    spec.validate();
    require_tate_kind(spec);
    if (n < 2) {
        throw DomainError("Tate estimators require n >= 2");
    }
    if (!(sample_mean > 0.0) || !std::isfinite(sample_mean)) {
        throw DomainError("sample mean must be finite and positive");
    }
    const auto nd = static_cast<double>(n);
    switch (spec.kind) {
        case Kind::RatePower: {
            const double p = *spec.p;
            if (!(p < nd - 1.0)) {
                throw DomainError("Tate rate-power estimator requires p < n - 1 (p=" +
                                  detail::format_double(p) + ", n=" + std::to_string(n) + ")");
            }
            return std::exp(log_gamma(nd - 1.0) - p * std::log(nd) - log_gamma(nd - 1.0 - p) -
                            p * std::log(sample_mean));
        }
        case Kind::Quantile:
            return nd / (nd - 1.0) * -std::log1p(-*spec.q) * sample_mean;
        case Kind::MaxCdfPower: {
            const double scale = nd * sample_mean;
            const std::int64_t m = *spec.m;
            detail::CompensatedSum<double> sum;
            sum += 1.0;
            double binom = 1.0;
            for (std::int64_t k = 1; k <= m; ++k) {
                binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
                const double a = static_cast<double>(k) * *spec.t / scale;
                if (a > 1.0) break;
                sum += ((k % 2 == 0) ? 1.0 : -1.0) * binom * detail::sift_term(a, n - 2);
            }
            return sum.value();
        }
        default:
            break;
    }
    throw SpecError("unreachable");
}

EstimateResult tate_estimate(const FunctionalSpec& spec, double sample_mean, std::int64_t n) {
    return {tate_estimator_at(spec, n, sample_mean), spec, n, EstimatorFamily::TateBiased};
}

double tate_expected_value(const FunctionalSpec& spec, std::int64_t n, double lambda) {
    spec.validate();
    require_tate_kind(spec);
    require_rate(lambda);
    if (n < 2) {
        throw DomainError("Tate estimators require n >= 2");
    }
    const auto nd = static_cast<double>(n);
    switch (spec.kind) {
        case Kind::RatePower: {
            const double p = *spec.p;
            if (!(p < nd - 1.0)) return 0.0;
            return (1.0 - p / (nd - 1.0)) * std::pow(lambda, p);
        }
        case Kind::Quantile:
            return nd / (nd - 1.0) * (-std::log1p(-*spec.q) / lambda);
        case Kind::MaxCdfPower: {
            const double lt = lambda * *spec.t;
            const auto m = static_cast<double>(*spec.m);
            return (lt * m / ((nd - 1.0) * -std::expm1(lt)) + 1.0) * std::pow(-std::expm1(-lt), m);
        }
        default:
            break;
    }
    throw SpecError("unreachable");
}

VerificationReport verify_tate(const FunctionalSpec& spec, std::int64_t n, double lambda,
                               double rel_tol) {
    const double target = tate_expected_value(spec, n, lambda);
    const double functional_value = target_value(spec, lambda);
    ExpectationOptions options;
    options.kinks = kink_points(spec, n, upper_limit(n, static_cast<double>(n) * lambda));
    const Expectation e = expectation(
        [&](double x) { return tate_estimator_at(spec, n, x); }, n, lambda, rel_tol, options);
    return make_report(spec, n, lambda, rel_tol, e, target, functional_value,
                       EstimatorFamily::TateBiased);
}

std::vector<SweepRow> verify_sweep(std::span<const GridCell> cells, double rel_tol, bool tate,
                                   Execution execution) {
    std::vector<SweepRow> rows(cells.size());
    const auto run = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.cell = cells[i];
        try {
            row.report = tate ? verify_tate(cells[i].spec, cells[i].n, cells[i].lambda, rel_tol)
                              : verify_unbiasedness(cells[i].spec, cells[i].n, cells[i].lambda, rel_tol);
        } catch (const QuadratureError& e) {
            row.failure = e.what();
            row.numerical_failure = true;
        } catch (const NumericalInversionError& e) {
            row.failure = e.what();
            row.numerical_failure = true;
        } catch (const RangeError& e) {
            row.failure = e.what();
            row.numerical_failure = true;
        } catch (const Error& e) {
            row.failure = e.what();
        }
    };
    const auto count = static_cast<std::int64_t>(cells.size());
    if (execution.parallel) {
        const int threads = execution.threads > 0 ? execution.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::int64_t i = 0; i < count; ++i) {
            run(static_cast<std::size_t>(i));
        }
    } else {
        for (std::int64_t i = 0; i < count; ++i) {
            run(static_cast<std::size_t>(i));
        }
    }
    return rows;
}

}  // namespace uexp
