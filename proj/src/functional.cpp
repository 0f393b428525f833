#include "uexp/functional.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "uexp/detail/format.hpp"
#include "uexp/errors.hpp"

namespace uexp {

namespace {

constexpr std::array<std::pair<Kind, std::string_view>, 11> kKindNames{{
    {Kind::RatePower, "rate-power"},
    {Kind::Quantile, "quantile"},
    {Kind::Moment, "moment"},
    {Kind::Survival, "survival"},
    {Kind::MaxCdfPower, "max-cdf-power"},
    {Kind::MinSurvival, "min-survival"},
    {Kind::Pdf, "pdf"},
    {Kind::MeanPastLifetime, "mean-past-lifetime"},
    {Kind::Mgf, "mgf"},
    {Kind::ExpectedShortfall, "expected-shortfall"},
    {Kind::Custom, "custom"},
}};

struct Required {
    bool p = false, q = false, t = false, m = false;
};

Required required_params(Kind kind) {
    switch (kind) {
        case Kind::RatePower:
        case Kind::Moment:
        case Kind::ExpectedShortfall:
            return {.p = true};
        case Kind::Quantile:
            return {.q = true};
        case Kind::Survival:
        case Kind::Pdf:
        case Kind::MeanPastLifetime:
        case Kind::Mgf:
            return {.t = true};
        case Kind::MaxCdfPower:
        case Kind::MinSurvival:
            return {.t = true, .m = true};
        case Kind::Custom:
            return {};
    }
    return {};
}

void check_presence(const FunctionalSpec& spec) {
    const Required req = required_params(spec.kind);
    const auto check = [&](bool needed, bool present, const char* name) {
        if (needed && !present) {
            throw SpecError(std::string(kind_name(spec.kind)) + " requires parameter " + name);
        }
        if (!needed && present) {
            throw SpecError(std::string(kind_name(spec.kind)) + " does not accept parameter " + name);
        }
    };
    check(req.p, spec.p.has_value(), "p");
    check(req.q, spec.q.has_value(), "q");
    check(req.t, spec.t.has_value(), "t");
    check(req.m, spec.m.has_value(), "m");
    if (spec.kind == Kind::Custom && !spec.custom_transform) {
        throw SpecError("custom functional requires a transfer function");
    }
    if (spec.kind != Kind::Custom && spec.custom_transform) {
        throw SpecError(std::string(kind_name(spec.kind)) + " does not accept a transfer function");
    }
    if (spec.allow_negative_integer_power && spec.kind != Kind::RatePower) {
        throw SpecError("allow_negative_integer_power applies to rate-power only");
    }
}

void require_finite(std::optional<double> v, const char* name) {
    if (v && !std::isfinite(*v)) {
        throw DomainError(std::string("parameter ") + name + " must be finite");
    }
}

void require_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw DomainError(std::string("parameter ") + name + " must lie in (0, 1), got " +
                          detail::format_double(v));
    }
}

bool is_nonpositive_integer(double p) {
    return p <= 0.0 && std::floor(p) == p;
}

}  // namespace

std::string_view kind_name(Kind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<Kind> parse_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

bool is_distributional(Kind kind) {
    switch (kind) {
        case Kind::Survival:
        case Kind::MaxCdfPower:
        case Kind::MinSurvival:
        case Kind::Pdf:
        case Kind::MeanPastLifetime:
            return true;
        default:
            return false;
    }
}

std::string_view family_name(EstimatorFamily family) {
    switch (family) {
        case EstimatorFamily::ClosedFormUnbiased: return "closed-form-unbiased";
        case EstimatorFamily::GenericLaplace: return "generic-laplace";
        case EstimatorFamily::MlePlugin: return "mle-plugin";
        case EstimatorFamily::TateBiased: return "tate-biased";
    }
    return "unknown";
}

FunctionalSpec FunctionalSpec::rate_power(double p, bool allow_negative_integer) {
    FunctionalSpec s;
    s.kind = Kind::RatePower;
    s.p = p;
    s.allow_negative_integer_power = allow_negative_integer;
    return s;
}

FunctionalSpec FunctionalSpec::quantile(double q) {
    FunctionalSpec s;
    s.kind = Kind::Quantile;
    s.q = q;
    return s;
}

FunctionalSpec FunctionalSpec::moment(double p) {
    FunctionalSpec s;
    s.kind = Kind::Moment;
    s.p = p;
    return s;
}

FunctionalSpec FunctionalSpec::survival(double t) {
    FunctionalSpec s;
    s.kind = Kind::Survival;
    s.t = t;
    return s;
}

FunctionalSpec FunctionalSpec::max_cdf_power(double t, std::int64_t m) {
    FunctionalSpec s;
    s.kind = Kind::MaxCdfPower;
    s.t = t;
    s.m = m;
    return s;
}

FunctionalSpec FunctionalSpec::min_survival(double t, std::int64_t m) {
    FunctionalSpec s;
    s.kind = Kind::MinSurvival;
    s.t = t;
    s.m = m;
    return s;
}

FunctionalSpec FunctionalSpec::pdf(double t) {
    FunctionalSpec s;
    s.kind = Kind::Pdf;
    s.t = t;
    return s;
}

FunctionalSpec FunctionalSpec::mean_past_lifetime(double t) {
    FunctionalSpec s;
    s.kind = Kind::MeanPastLifetime;
    s.t = t;
    return s;
}

FunctionalSpec FunctionalSpec::mgf(double t) {
    FunctionalSpec s;
    s.kind = Kind::Mgf;
    s.t = t;
    return s;
}

FunctionalSpec FunctionalSpec::expected_shortfall(double level) {
    FunctionalSpec s;
    s.kind = Kind::ExpectedShortfall;
    s.p = level;
    return s;
}

FunctionalSpec FunctionalSpec::custom(std::shared_ptr<const TransferFunction> transform) {
    FunctionalSpec s;
    s.kind = Kind::Custom;
    s.custom_transform = std::move(transform);
    return s;
}

void FunctionalSpec::validate() const {
    check_presence(*this);
    require_finite(p, "p");
    require_finite(q, "q");
    require_finite(t, "t");

    switch (kind) {
        case Kind::RatePower:
            if (is_nonpositive_integer(*p) && !(allow_negative_integer_power && *p < 0.0)) {
                throw DomainError("rate-power exponent must not be zero or a negative integer, got " +
                                  detail::format_double(*p));
            }
            break;
        case Kind::Quantile:
            require_unit_interval(*q, "q");
            break;
        case Kind::ExpectedShortfall:
            require_unit_interval(*p, "p");
            break;
        case Kind::Moment:
            if (!(*p > -1.0)) {
                throw DomainError("moment order must exceed -1, got " + detail::format_double(*p));
            }
            break;
        case Kind::Survival:
        case Kind::Pdf:
        case Kind::MeanPastLifetime:
        case Kind::MaxCdfPower:
        case Kind::MinSurvival:
            if (!(*t > 0.0)) {
                throw DomainError("parameter t must be positive, got " + detail::format_double(*t));
            }
            if (m && *m < 1) {
                throw DomainError("parameter m must be >= 1");
            }
            break;
        case Kind::Mgf:
        case Kind::Custom:
            break;
    }
}

void FunctionalSpec::validate_for(std::int64_t n) const {
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    validate();
    if (kind == Kind::RatePower && !(*p < static_cast<double>(n))) {
        throw DomainError("rate-power requires p < n (p=" + detail::format_double(*p) +
                          ", n=" + std::to_string(n) + ")");
    }
    if (kind == Kind::Pdf && n < 2) {
        throw DomainError("pdf estimator requires n >= 2");
    }
}

std::string FunctionalSpec::describe() const {
    std::string out(kind_name(kind));
    std::string args;
    const auto add = [&](const char* name, const std::string& v) {
        if (!args.empty()) args += ",";
        args += name;
        args += "=";
        args += v;
    };
    if (p) add("p", detail::format_double(*p));
    if (q) add("q", detail::format_double(*q));
    if (t) add("t", detail::format_double(*t));
    if (m) add("m", std::to_string(*m));
    return out + "(" + args + ")";
}

}  // namespace uexp
