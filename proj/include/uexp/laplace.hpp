#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uexp/functional.hpp"
#include "uexp/sample.hpp"

namespace uexp {

using RealTransform = std::function<long double(long double)>;
using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;

/// A functional xi(lambda), viewed as a function of the transform variable.
///
/// The engine composes xi(s/n) / s^j itself; users describe xi only.
/// `eval_real` is evaluated in long double because Gaver-Stehfest sums
/// alternating terms with weights up to ~1e11. `eval_complex` is the analytic
/// continuation used by the Talbot contour; when present it must agree with
/// `eval_real` on the positive axis. Evaluations must be reentrant.
struct TransferFunction {
    RealTransform eval_real;
    ComplexTransform eval_complex;
    /// Real part of the rightmost singularity of xi in the lambda plane
    /// (0 for powers of lambda, t for the MGF). Used to shift the inversion.
    double abscissa = 0.0;
    /// Declared Dirac-delta content in the inverse of xi(s/n). Such transforms
    /// are rejected by the engine; their estimators exist only in closed form.
    bool distributional = false;
    std::string domain_note;
};

/// Largest relative disagreement between eval_real and eval_complex over `points`.
double real_axis_mismatch(const TransferFunction& xi, std::span<const double> points);

/// a * f + b * g.
TransferFunction linear_combination(double a, const TransferFunction& f, double b,
                                    const TransferFunction& g);

enum class InversionMethod {
    /// Real-axis inversion of xi(s/n)/s^j for the smallest admissible j; the
    /// remaining s^{-(n-j)} is applied as a Riemann-Liouville integral.
    GaverStehfest,
    /// Bromwich contour inversion of xi(s/n)/s^n on a fixed Talbot contour.
    Talbot,
    /// The convolution form: integral of (1 - v/x)^{n-1} L^{-1}{xi(s/n)}(v) over [0, x],
    /// with Gaver-Stehfest for the inner inversion. Needs xi(s/n) to have an
    /// ordinary inverse (xi decaying at infinity).
    ConvolutionQuadrature,
};

std::string_view method_name(InversionMethod method);

struct InversionConfig {
    InversionMethod method = InversionMethod::Talbot;
    int gs_order = 18;          // even, [8, 20]
    int talbot_nodes = 32;      // [16, 64]
    double quad_rel_tol = 1e-11;
    int quad_max_subdiv = 12;   // refinement levels of the Riemann-Liouville quadrature
    /// Relative disagreement tolerated between the configured order and the
    /// next-lower one before the inversion is declared divergent.
    double divergence_tol = 1e-5;

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

/// Talbot when `xi` has a complex evaluator, Gaver-Stehfest otherwise.
InversionConfig default_inversion_config(const TransferFunction& xi);

/// Stehfest weights V_1..V_order, computed exactly as rationals and rounded once.
std::span<const long double> gaver_stehfest_weights(int order);

/// f(t) ~ (ln 2 / t) sum_k V_k F(k ln 2 / t).
double invert_gaver_stehfest(const RealTransform& transform, double t, int order);

/// Fixed-Talbot approximation of the Bromwich integral, contour shifted by `shift`
/// (which must lie to the right of every singularity of the transform).
double invert_talbot(const ComplexTransform& transform, double t, int nodes, double shift = 0.0);

/// Exponent beta with |xi(lambda)| ~ lambda^beta as lambda -> infinity, estimated
/// from two large probes. Throws UnsupportedTransformError when xi vanishes or
/// is non-finite there (shifted delta content).
double growth_exponent(const TransferFunction& xi);

/// Unbiased estimate of xi(lambda) at sample mean `sample_mean` for sample size n,
/// Gamma(n)/x^{n-1} L^{-1}{xi(s/n)/s^n}(x), by the configured method.
double generic_unbiased_at(const TransferFunction& xi, std::int64_t n, double sample_mean,
                           const InversionConfig& config);

/// generic_unbiased_at for a Sample; family = GenericLaplace.
EstimateResult generic_unbiased_estimate(const TransferFunction& xi, const Sample& sample,
                                         const InversionConfig& config);

/// Built-in transfer function for a closed-form kind (or the user transform for Custom).
/// Distributional kinds come back with `distributional = true`.
std::shared_ptr<const TransferFunction> builtin_transform(const FunctionalSpec& spec);

struct RegistryEntry {
    std::string name;
    std::string note;
};

/// Names accepted by the CLI's generic engine, with their domain notes.
std::vector<RegistryEntry> builtin_registry();

}  // namespace uexp
