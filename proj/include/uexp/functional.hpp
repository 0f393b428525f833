#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace uexp {

struct TransferFunction;

/// Population quantities xi(lambda) of X ~ exp(lambda) with a closed-form unbiased estimator,
/// plus Custom for user-supplied functionals served by the Laplace engine.
enum class Kind {
    RatePower,          // lambda^p
    Quantile,           // -ln(1-q)/lambda
    Moment,             // Gamma(p+1)/lambda^p
    Survival,           // P(X > t)
    MaxCdfPower,        // P(X <= t)^m
    MinSurvival,        // P(X > t)^m
    Pdf,                // lambda e^{-lambda t}
    MeanPastLifetime,   // E[t - X | X <= t]
    Mgf,                // E[e^{tX}]
    ExpectedShortfall,  // (-ln(1-p) + 1)/lambda
    Custom,
};

std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);

/// True for kinds whose xi(s/n) inverts to Dirac-delta content; those are
/// served only by the closed forms.
bool is_distributional(Kind kind);

/// Tagged description of a target xi(lambda) and its parameters.
///
/// Only the parameters used by `kind` may be set; validate() rejects
/// missing or extraneous ones with SpecError and out-of-range values with
/// DomainError. ExpectedShortfall stores its level in `p`.
struct FunctionalSpec {
    Kind kind = Kind::Moment;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> t;
    std::optional<std::int64_t> m;
    std::shared_ptr<const TransferFunction> custom_transform;
    /// RatePower only: admit negative integer exponents, for which the final
    /// estimator stays finite even though the derivation passes through Gamma(-p).
    bool allow_negative_integer_power = false;

    static FunctionalSpec rate_power(double p, bool allow_negative_integer = false);
    static FunctionalSpec quantile(double q);
    static FunctionalSpec moment(double p);
    static FunctionalSpec survival(double t);
    static FunctionalSpec max_cdf_power(double t, std::int64_t m);
    static FunctionalSpec min_survival(double t, std::int64_t m);
    static FunctionalSpec pdf(double t);
    static FunctionalSpec mean_past_lifetime(double t);
    static FunctionalSpec mgf(double t);
    static FunctionalSpec expected_shortfall(double level);
    static FunctionalSpec custom(std::shared_ptr<const TransferFunction> transform);

    /// Sample-size independent checks.
    void validate() const;
    /// validate() plus the rules that depend on n (p < n for RatePower, n >= 2 for Pdf).
    void validate_for(std::int64_t n) const;

    /// Short human-readable rendering, e.g. "quantile(q=0.5)".
    std::string describe() const;
};

enum class EstimatorFamily { ClosedFormUnbiased, GenericLaplace, MlePlugin, TateBiased };

std::string_view family_name(EstimatorFamily family);

struct EstimateResult {
    double value = 0.0;
    FunctionalSpec spec;
    std::int64_t n = 0;
    EstimatorFamily family = EstimatorFamily::ClosedFormUnbiased;
};

}  // namespace uexp
