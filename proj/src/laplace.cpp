#include "uexp/laplace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "uexp/detail/format.hpp"
#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"
#include "uexp/quadrature.hpp"
#include "uexp/special_fns.hpp"

namespace uexp {

namespace {

constexpr int kMaxGsOrder = 20;

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::vector<long double> compute_weights(int order) {
    const int half = order / 2;
    std::array<cpp_int, 2 * kMaxGsOrder + 1> fact;
    fact[0] = 1;
    for (int i = 1; i <= 2 * kMaxGsOrder; ++i) fact[i] = fact[i - 1] * i;

    std::vector<long double> weights(static_cast<std::size_t>(order));
    for (int k = 1; k <= order; ++k) {
        cpp_rational sum = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            cpp_int num = boost::multiprecision::pow(cpp_int(j), static_cast<unsigned>(half)) * fact[2 * j];
            cpp_int den = fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k];
            sum += cpp_rational(num, den);
        }
        if ((k + half) % 2 != 0) sum = -sum;
        using Wide = boost::multiprecision::cpp_bin_float_50;
        const Wide wide = Wide(boost::multiprecision::numerator(sum)) /
                          Wide(boost::multiprecision::denominator(sum));
        weights[static_cast<std::size_t>(k - 1)] = wide.convert_to<long double>();
    }
    return weights;
}

void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("inversion point must be finite and positive, got " + detail::format_double(t));
    }
}

bool differs(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return !(std::abs(a - b) <= tol * scale);
}

// Smallest j >= 0 with xi(s/n)/s^j decaying at infinity.
std::int64_t reduction_order(double beta) {
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(beta + 1e-6)) + 1);
}

// a * sum_k V_k F(k a), kept in long double for callers that rescale afterwards.
long double stehfest_sum(const RealTransform& transform, long double a, int order) {
    const auto weights = gaver_stehfest_weights(order);
    detail::CompensatedSum<long double> sum;
    for (int k = 1; k <= order; ++k) {
        const long double s = a * static_cast<long double>(k);
        const long double f = transform(s);
        if (!std::isfinite(f)) {
            throw NumericalInversionError(
                "transform is not finite at s=" + detail::format_double(static_cast<double>(s)),
                std::nan(""), std::nan(""));
        }
        sum += weights[static_cast<std::size_t>(k - 1)] * f;
    }
    return a * sum.value();
}

// K_j(v) = v^{1-j} h_j(v) with h_j = L^{-1}{xi(s/n)/s^j}. Substituting s = sigma/v moves the
// inversion point to 1, so tiny or huge v never forms v^j.
long double scaled_original(const TransferFunction& xi, std::int64_t n, std::int64_t j, double shift,
                            long double v, int order) {
    const long double nv = static_cast<long double>(n) * v;
    const long double sv = static_cast<long double>(shift) * v;
    const auto transform = [&](long double sigma) {
        const long double z = sigma + sv;
        return xi.eval_real(z / nv) / std::pow(z, static_cast<long double>(j));
    };
    return std::exp(sv) * stehfest_sum(transform, std::numbers::ln2_v<long double>, order);
}

double real_axis_estimate(const TransferFunction& xi, std::int64_t n, double xbar, std::int64_t j,
                          int order, const InversionConfig& config) {
    double shift = static_cast<double>(n) * xi.abscissa;
    if (j >= 1) shift = std::max(shift, 0.0);
    const auto nd = static_cast<double>(n);
    const auto jd = static_cast<double>(j);

    if (j == n) {
        return std::exp(log_gamma(nd)) * static_cast<double>(scaled_original(xi, n, j, shift, xbar, order));
    }

    // Gamma(n)/Gamma(n-j) int_0^1 (1-w)^{n-j-1} w^{j-1} K_j(xbar w) dw
    const double power = nd - jd - 1.0;
    const Integrand integrand = [&](double w) {
        const long double wl = w;
        const long double weight = (power == 0.0 ? 1.0L : std::pow(1.0L - wl, static_cast<long double>(power))) *
                                   std::pow(wl, static_cast<long double>(jd - 1.0));
        if (weight == 0.0L) return 0.0;
        // K_j can exceed double range near w = 0 where the weight cancels it
        return static_cast<double>(weight * scaled_original(xi, n, j, shift, xbar * wl, order));
    };
    const QuadratureResult q =
        integrate_finite(integrand, 0.0, 1.0, config.quad_rel_tol, config.quad_max_subdiv, 0);
    if (!(q.error <= config.divergence_tol * std::max(q.l1, 1e-300))) {
        throw QuadratureError("Riemann-Liouville integral did not converge", q.value, q.error);
    }
    return std::exp(log_gamma(nd) - log_gamma(nd - jd)) * q.value;
}

double talbot_estimate(const TransferFunction& xi, std::int64_t n, double xbar, int nodes) {
    const auto nd = static_cast<double>(n);
    // s = sigma / xbar maps the inversion point to 1, so no power of xbar is ever formed
    const double shift = std::max(0.0, nd * xi.abscissa) * xbar;
    const double log_gn = log_gamma(nd);
    const double scale = nd * xbar;
    const auto transform = [&](std::complex<double> sigma) {
        return xi.eval_complex(sigma / scale) * std::exp(log_gn - nd * std::log(sigma));
    };
    return invert_talbot(transform, 1.0, nodes, shift);
}

std::shared_ptr<TransferFunction> make_transform(RealTransform real, ComplexTransform complex,
                                                 double abscissa, bool distributional,
                                                 std::string note) {
    auto tf = std::make_shared<TransferFunction>();
    tf->eval_real = std::move(real);
    tf->eval_complex = std::move(complex);
    tf->abscissa = abscissa;
    tf->distributional = distributional;
    tf->domain_note = std::move(note);
    return tf;
}

}  // namespace

double real_axis_mismatch(const TransferFunction& xi, std::span<const double> points) {
    if (!xi.eval_real || !xi.eval_complex) {
        throw ConfigError("both evaluators are required to compare them");
    }
    double worst = 0.0;
    for (double s : points) {
        const auto r = static_cast<double>(xi.eval_real(s));
        const double c = xi.eval_complex({s, 0.0}).real();
        worst = std::max(worst, std::abs(r - c) / std::max(std::abs(r), 1e-300));
    }
    return worst;
}

TransferFunction linear_combination(double a, const TransferFunction& f, double b,
                                    const TransferFunction& g) {
    TransferFunction out;
    out.eval_real = [a, b, fr = f.eval_real, gr = g.eval_real](long double s) {
        return static_cast<long double>(a) * fr(s) + static_cast<long double>(b) * gr(s);
    };
    if (f.eval_complex && g.eval_complex) {
        out.eval_complex = [a, b, fc = f.eval_complex, gc = g.eval_complex](std::complex<double> s) {
            return a * fc(s) + b * gc(s);
        };
    }
    out.abscissa = std::max(f.abscissa, g.abscissa);
    out.distributional = f.distributional || g.distributional;
    out.domain_note = "linear combination";
    return out;
}

std::string_view method_name(InversionMethod method) {
    switch (method) {
        case InversionMethod::GaverStehfest: return "gaver-stehfest";
        case InversionMethod::Talbot: return "talbot";
        case InversionMethod::ConvolutionQuadrature: return "convolution";
    }
    return "unknown";
}

void InversionConfig::validate() const {
    if (gs_order < 8 || gs_order > kMaxGsOrder || gs_order % 2 != 0) {
        throw ConfigError("gs_order must be an even integer in [8, 20], got " + std::to_string(gs_order));
    }
    if (talbot_nodes < 16 || talbot_nodes > 64) {
        throw ConfigError("talbot_nodes must lie in [16, 64], got " + std::to_string(talbot_nodes));
    }
    if (!(quad_rel_tol > 0.0) || !(divergence_tol > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (quad_max_subdiv < 1 || quad_max_subdiv > 20) {
        throw ConfigError("quad_max_subdiv must lie in [1, 20]");
    }
}

InversionConfig default_inversion_config(const TransferFunction& xi) {
    InversionConfig config;
    config.method = xi.eval_complex ? InversionMethod::Talbot : InversionMethod::GaverStehfest;
    return config;
}

std::span<const long double> gaver_stehfest_weights(int order) {
    if (order < 2 || order > kMaxGsOrder || order % 2 != 0) {
        throw ConfigError("Gaver-Stehfest order must be even and in [2, 20], got " +
                          std::to_string(order));
    }
    static const std::array<std::vector<long double>, kMaxGsOrder / 2> table = [] {
        std::array<std::vector<long double>, kMaxGsOrder / 2> t;
        for (int i = 0; i < kMaxGsOrder / 2; ++i) t[static_cast<std::size_t>(i)] = compute_weights(2 * (i + 1));
        return t;
    }();
    return table[static_cast<std::size_t>(order / 2 - 1)];
}

double invert_gaver_stehfest(const RealTransform& transform, double t, int order) {
    require_positive_time(t);
    if (!transform) {
        throw ConfigError("Gaver-Stehfest needs a real evaluator");
    }
    return static_cast<double>(
        stehfest_sum(transform, std::numbers::ln2_v<long double> / static_cast<long double>(t), order));
}

double invert_talbot(const ComplexTransform& transform, double t, int nodes, double shift) {
    require_positive_time(t);
    if (!transform) {
        throw ConfigError("Talbot inversion needs a complex evaluator");
    }
    if (nodes < 2) {
        throw ConfigError("Talbot inversion needs at least 2 nodes");
    }
    const double m = nodes;
    const double r = 2.0 * m / (5.0 * t);
    const std::complex<double> f0 = transform({shift + r, 0.0});
    detail::CompensatedSum<double> sum;
    sum += 0.5 * std::exp((shift + r) * t) * f0.real();
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / m;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s{shift + r * theta * cot, r * theta};
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> term = std::exp(t * s) * transform(s) * std::complex<double>(1.0, sigma);
        sum += term.real();
    }
    const double value = r / m * sum.value();
    if (!std::isfinite(value)) {
        throw NumericalInversionError("Talbot sum is not finite", value, std::nan(""));
    }
    return value;
}

double growth_exponent(const TransferFunction& xi) {
    if (!xi.eval_real) {
        throw ConfigError("transfer function has no real evaluator");
    }
    constexpr long double lo = 1e8L;
    constexpr long double hi = 1e10L;
    const long double a = std::abs(xi.eval_real(lo));
    const long double b = std::abs(xi.eval_real(hi));
    if (!(a > 0.0L) || !(b > 0.0L) || !std::isfinite(a) || !std::isfinite(b)) {
        throw UnsupportedTransformError(
            "transfer function vanishes or blows up at large lambda; its inverse carries "
            "shifted delta content");
    }
    return static_cast<double>(std::log(b / a) / std::log(hi / lo));
}

double generic_unbiased_at(const TransferFunction& xi, std::int64_t n, double sample_mean,
                           const InversionConfig& config) {
    config.validate();
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    if (!(sample_mean > 0.0) || !std::isfinite(sample_mean)) {
        throw DomainError("sample mean must be finite and positive");
    }
    if (xi.distributional) {
        throw UnsupportedTransformError("transfer function is declared distributional (" +
                                        xi.domain_note + "); use the closed-form estimator");
    }
    const double beta = growth_exponent(xi);
    const std::int64_t j = reduction_order(beta);
    if (j > n) {
        throw UnsupportedTransformError("xi grows like lambda^" + detail::format_double(beta) +
                                        "; xi(s/n)/s^n has no ordinary inverse for n=" +
                                        std::to_string(n));
    }

    double value = 0.0;
    double lower = 0.0;
    switch (config.method) {
        case InversionMethod::Talbot: {
            if (!xi.eval_complex) {
                throw ConfigError("Talbot method requires a complex evaluator");
            }
            value = talbot_estimate(xi, n, sample_mean, config.talbot_nodes);
            lower = talbot_estimate(xi, n, sample_mean, config.talbot_nodes - config.talbot_nodes / 4);
            break;
        }
        case InversionMethod::GaverStehfest:
            value = real_axis_estimate(xi, n, sample_mean, j, config.gs_order, config);
            lower = real_axis_estimate(xi, n, sample_mean, j, config.gs_order - 2, config);
            break;
        case InversionMethod::ConvolutionQuadrature:
            if (j != 0) {
                throw UnsupportedTransformError(
                    "xi(s/n) has no ordinary inverse (xi does not decay); use gaver-stehfest or talbot");
            }
            value = real_axis_estimate(xi, n, sample_mean, 0, config.gs_order, config);
            lower = real_axis_estimate(xi, n, sample_mean, 0, config.gs_order - 2, config);
            break;
    }
    if (!std::isfinite(value) || differs(value, lower, config.divergence_tol)) {
        throw NumericalInversionError("inversion did not settle: " + detail::format_double(value) +
                                          " vs " + detail::format_double(lower) + " at lower order",
                                      value, lower);
    }
    return value;
}

EstimateResult generic_unbiased_estimate(const TransferFunction& xi, const Sample& sample,
                                         const InversionConfig& config) {
    FunctionalSpec spec;
    spec.kind = Kind::Custom;
    spec.custom_transform = std::make_shared<const TransferFunction>(xi);
    return {generic_unbiased_at(xi, sample.size(), sample.mean(), config), std::move(spec),
            sample.size(), EstimatorFamily::GenericLaplace};
}

std::shared_ptr<const TransferFunction> builtin_transform(const FunctionalSpec& spec) {
    spec.validate();
    using C = std::complex<double>;
    using L = long double;
    switch (spec.kind) {
        case Kind::RatePower: {
            const double p = *spec.p;
            return make_transform([p](L s) { return std::pow(s, static_cast<L>(p)); },
                                  [p](C s) { return std::pow(s, p); }, 0.0, false, "lambda^p");
        }
        case Kind::Quantile: {
            const double c = -std::log1p(-*spec.q);
            return make_transform([c](L s) { return static_cast<L>(c) / s; },
                                  [c](C s) { return c / s; }, 0.0, false, "-ln(1-q)/lambda");
        }
        case Kind::ExpectedShortfall: {
            const double c = -std::log1p(-*spec.p) + 1.0;
            return make_transform([c](L s) { return static_cast<L>(c) / s; },
                                  [c](C s) { return c / s; }, 0.0, false, "(-ln(1-p)+1)/lambda");
        }
        case Kind::Moment: {
            const double p = *spec.p;
            const double g = std::exp(log_gamma(p + 1.0));
            return make_transform([p, g](L s) { return static_cast<L>(g) * std::pow(s, static_cast<L>(-p)); },
                                  [p, g](C s) { return g * std::pow(s, -p); }, 0.0, false,
                                  "Gamma(p+1)/lambda^p");
        }
        case Kind::Mgf: {
            const double t = *spec.t;
            return make_transform([t](L s) { return s / (s - static_cast<L>(t)); },
                                  [t](C s) { return s / (s - t); }, t, false,
                                  "lambda/(lambda-t), singular at lambda=t");
        }
        case Kind::Survival: {
            const double t = *spec.t;
            return make_transform([t](L s) { return std::exp(-s * static_cast<L>(t)); },
                                  [t](C s) { return std::exp(-s * t); }, 0.0, true,
                                  "e^{-lambda t}: shifted delta");
        }
        case Kind::MinSurvival: {
            const double mt = static_cast<double>(*spec.m) * *spec.t;
            return make_transform([mt](L s) { return std::exp(-s * static_cast<L>(mt)); },
                                  [mt](C s) { return std::exp(-s * mt); }, 0.0, true,
                                  "e^{-lambda m t}: shifted delta");
        }
        case Kind::MaxCdfPower: {
            const double t = *spec.t;
            const double m = static_cast<double>(*spec.m);
            return make_transform(
                [t, m](L s) { return std::pow(-std::expm1(-s * static_cast<L>(t)), static_cast<L>(m)); },
                [t, m](C s) { return std::pow(1.0 - std::exp(-s * t), m); }, 0.0, true,
                "(1-e^{-lambda t})^m: comb of shifted deltas");
        }
        case Kind::Pdf: {
            const double t = *spec.t;
            return make_transform([t](L s) { return s * std::exp(-s * static_cast<L>(t)); },
                                  [t](C s) { return s * std::exp(-s * t); }, 0.0, true,
                                  "lambda e^{-lambda t}: shifted delta derivative");
        }
        case Kind::MeanPastLifetime: {
            const double t = *spec.t;
            return make_transform(
                [t](L s) { return static_cast<L>(t) / -std::expm1(-s * static_cast<L>(t)) - 1.0L / s; },
                [t](C s) { return t / (1.0 - std::exp(-s * t)) - 1.0 / s; }, 0.0, true,
                "t/(1-e^{-lambda t}) - 1/lambda: delta comb");
        }
        case Kind::Custom:
            return spec.custom_transform;
    }
    throw SpecError("unknown functional kind");
}

std::vector<RegistryEntry> builtin_registry() {
    return {
        {"rate-power", "lambda^p; needs p < n, inverts for every admissible p"},
        {"quantile", "-ln(1-q)/lambda"},
        {"moment", "Gamma(p+1)/lambda^p, p > -1"},
        {"mgf", "lambda/(lambda-t); contour shifted past lambda = t"},
        {"expected-shortfall", "(-ln(1-p)+1)/lambda"},
        {"survival", "distributional: closed form only"},
        {"max-cdf-power", "distributional: closed form only"},
        {"min-survival", "distributional: closed form only"},
        {"pdf", "distributional: closed form only"},
        {"mean-past-lifetime", "distributional: closed form only"},
    };
}

}  // namespace uexp
