#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/laplace.hpp"
#include "uexp/oracle.hpp"

using namespace uexp;
using doctest::Approx;

namespace {

TransferFunction real_only(RealTransform f) {
    TransferFunction xi;
    xi.eval_real = std::move(f);
    return xi;
}

TransferFunction both(RealTransform f, ComplexTransform g, double abscissa = 0.0) {
    TransferFunction xi;
    xi.eval_real = std::move(f);
    xi.eval_complex = std::move(g);
    xi.abscissa = abscissa;
    return xi;
}

InversionConfig with_method(const TransferFunction& xi, InversionMethod m) {
    InversionConfig c = default_inversion_config(xi);
    c.method = m;
    return c;
}

}  // namespace

TEST_CASE("Stehfest weights sum to zero") {
    for (int order = 8; order <= 20; order += 2) {
        long double sum = 0.0L;
        for (long double w : gaver_stehfest_weights(order)) sum += w;
        CHECK(std::abs(static_cast<double>(sum)) < 1e-6);
    }
    CHECK_THROWS(gaver_stehfest_weights(7));
}

TEST_CASE("invert_gaver_stehfest") {
    const RealTransform inv_s = [](long double s) { return 1.0L / s; };
    const RealTransform inv_s2 = [](long double s) { return 1.0L / (s * s); };
    const RealTransform shifted = [](long double s) { return 1.0L / (s + 1.0L); };
    CHECK(invert_gaver_stehfest(inv_s, 3.0, 18) == Approx(1.0).epsilon(1e-8));
    CHECK(invert_gaver_stehfest(inv_s2, 2.0, 18) == Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(invert_gaver_stehfest(shifted, 1.0, 18) - std::exp(-1.0)) < 1e-8);
    CHECK_THROWS_AS(invert_gaver_stehfest(RealTransform{}, 1.0, 18), ConfigError);
}

TEST_CASE("invert_talbot") {
    using C = std::complex<double>;
    const ComplexTransform inv_s2 = [](C s) { return 1.0 / (s * s); };
    const ComplexTransform sine = [](C s) { return 1.0 / (s * s + 1.0); };
    const ComplexTransform inv_sqrt = [](C s) { return 1.0 / std::sqrt(s); };
    CHECK(std::abs(invert_talbot(inv_s2, 5.0, 32) - 5.0) < 1e-10);
    CHECK(std::abs(invert_talbot(sine, std::numbers::pi / 2.0, 32) - 1.0) < 1e-8);
    CHECK(std::abs(invert_talbot(inv_sqrt, 1.0, 32) - 1.0 / std::sqrt(std::numbers::pi)) < 1e-8);
}

TEST_CASE("generic engine reproduces simple closed forms") {
    const auto rate = builtin_transform(FunctionalSpec::rate_power(1.0));
    CHECK(generic_unbiased_at(*rate, 4, 1.0, default_inversion_config(*rate)) == Approx(0.75).epsilon(1e-6));

    const auto mean = builtin_transform(FunctionalSpec::moment(1.0));
    for (double x : {0.3, 1.0, 2.5}) {
        CHECK(generic_unbiased_at(*mean, 3, x, default_inversion_config(*mean)) == Approx(x).epsilon(1e-8));
    }

    const auto mgf_xi = builtin_transform(FunctionalSpec::mgf(0.1));
    CHECK(generic_unbiased_at(*mgf_xi, 3, 1.0, default_inversion_config(*mgf_xi)) ==
          Approx(mgf(1.0, 3, 0.1)).epsilon(1e-6));
}

TEST_CASE("Gaver-Stehfest and Talbot agree on smooth transforms") {
    const FunctionalSpec specs[] = {FunctionalSpec::rate_power(0.5), FunctionalSpec::rate_power(2.0),
                                    FunctionalSpec::moment(1.5), FunctionalSpec::mgf(-0.5), FunctionalSpec::mgf(0.5)};
    for (const auto& spec : specs) {
        const auto xi = builtin_transform(spec);
        for (int n : {2, 5, 10}) {
            if (spec.kind == Kind::RatePower && !(*spec.p < n)) continue;
            for (double x : {0.5, 1.0, 2.0}) {
                const double gs = generic_unbiased_at(*xi, n, x, with_method(*xi, InversionMethod::GaverStehfest));
                const double tb = generic_unbiased_at(*xi, n, x, with_method(*xi, InversionMethod::Talbot));
                CHECK(gs == Approx(tb).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("linearity of the generic engine") {
    const auto f = builtin_transform(FunctionalSpec::rate_power(1.0));
    const auto g = builtin_transform(FunctionalSpec::moment(2.0));
    const TransferFunction h = linear_combination(2.0, *f, -0.5, *g);
    for (double x : {0.5, 1.5}) {
        const double lhs = generic_unbiased_at(h, 6, x, default_inversion_config(h));
        const double rhs = 2.0 * rate_power(x, 6, 1.0) - 0.5 * moment(x, 6, 2.0);
        CHECK(lhs == Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("real-only transforms fall back to Gaver-Stehfest") {
    const TransferFunction xi = real_only([](long double lambda) { return lambda * lambda; });
    CHECK(default_inversion_config(xi).method == InversionMethod::GaverStehfest);
    CHECK(generic_unbiased_at(xi, 5, 1.3, default_inversion_config(xi)) ==
          Approx(rate_power(1.3, 5, 2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(generic_unbiased_at(xi, 5, 1.3, with_method(xi, InversionMethod::Talbot)), ConfigError);
}

TEST_CASE("transforms the engine cannot invert") {
    CHECK(builtin_transform(FunctionalSpec::survival(1.0))->distributional);
    const auto surv = builtin_transform(FunctionalSpec::survival(1.0));
    CHECK_THROWS_AS(generic_unbiased_at(*surv, 5, 1.0, default_inversion_config(*surv)), UnsupportedTransformError);

    // exponential growth in lambda has no order reduction
    const TransferFunction expo = both([](long double l) { return std::exp(l); },
                                       [](std::complex<double> l) { return std::exp(l); });
    CHECK_THROWS_AS(generic_unbiased_at(expo, 5, 1.0, default_inversion_config(expo)), UnsupportedTransformError);

    // lambda^3 needs n > 3
    const auto cube = builtin_transform(FunctionalSpec::rate_power(3.0));
    CHECK_THROWS_AS(generic_unbiased_at(*cube, 2, 1.0, with_method(*cube, InversionMethod::GaverStehfest)),
                    UnsupportedTransformError);
    CHECK_THROWS_AS(generic_unbiased_at(*cube, 6, 1.0, with_method(*cube, InversionMethod::ConvolutionQuadrature)),
                    UnsupportedTransformError);
}

TEST_CASE("mismatched real and complex evaluators are detected") {
    const TransferFunction bad = both([](long double l) { return l; },
                                      [](std::complex<double> l) { return 2.0 * l; });
    const double pts[] = {0.5, 1.0, 2.0};
    CHECK(real_axis_mismatch(bad, pts) > 0.1);
    const auto good = builtin_transform(FunctionalSpec::mgf(0.3));
    CHECK(real_axis_mismatch(*good, pts) < 1e-12);
}

TEST_CASE("generic path is unbiased under the oracle") {
    const FunctionalSpec specs[] = {FunctionalSpec::rate_power(0.5), FunctionalSpec::quantile(0.5),
                                    FunctionalSpec::moment(2.0), FunctionalSpec::mgf(0.1)};
    for (const auto& spec : specs) {
        const auto xi = builtin_transform(spec);
        const InversionConfig config = default_inversion_config(*xi);
        ExpectationOptions opt;
        if (spec.kind == Kind::Mgf) opt.tail_rate = 4.0 * (1.0 - 0.1);
        const auto e = expectation([&](double x) { return generic_unbiased_at(*xi, 4, x, config); }, 4, 1.0, 1e-8, opt);
        CHECK(e.value == Approx(target_value(spec, 1.0)).epsilon(1e-5));
    }
}

TEST_CASE("extreme sample means stay finite") {
    const auto xi = builtin_transform(FunctionalSpec::rate_power(0.5));
    for (auto method : {InversionMethod::GaverStehfest, InversionMethod::Talbot}) {
        for (double x : {1e-300, 1e-100, 1e100}) {
            CHECK(generic_unbiased_at(*xi, 30, x, with_method(*xi, method)) ==
                  Approx(rate_power(x, 30, 0.5)).epsilon(1e-7));
        }
    }
}

TEST_CASE("config validation") {
    InversionConfig c;
    c.gs_order = 13;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = InversionConfig{};
    c.talbot_nodes = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
