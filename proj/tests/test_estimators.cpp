#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/quadrature.hpp"

using namespace uexp;
using doctest::Approx;

TEST_CASE("target_value") {
    CHECK(target_value(FunctionalSpec::quantile(0.3), 2.0) == Approx(-std::log(0.7) / 2.0));
    CHECK(target_value(FunctionalSpec::rate_power(1.0), 2.0) == Approx(2.0));
    CHECK(target_value(FunctionalSpec::mean_past_lifetime(1.0), 1.0) == Approx(0.5819767068693265).epsilon(1e-14));
    CHECK_THROWS_AS(target_value(FunctionalSpec::mgf(2.0), 1.0), DomainError);
    CHECK_THROWS_AS(FunctionalSpec::rate_power(0.0).validate(), DomainError);
}

TEST_CASE("rate_power") {
    CHECK(rate_power(1.0, 2, 1.0) == Approx(0.5).epsilon(1e-15));
    CHECK(rate_power(3.0, 5, -1.0, true) == Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(rate_power(1.0, 10, 10.0), DomainError);
}

TEST_CASE("quantile and expected shortfall") {
    const double unit_level = -std::expm1(-1.0);
    CHECK(quantile(1.7, unit_level) == Approx(1.7).epsilon(1e-15));
    CHECK(quantile(2.0, 0.5) == Approx(1.3862943611198906).epsilon(1e-15));
    CHECK_THROWS_AS(quantile(2.0, 0.0), DomainError);
    CHECK(expected_shortfall(1.3, unit_level) == Approx(2.6).epsilon(1e-15));
    CHECK(expected_shortfall(1.0, 0.95) == Approx(3.995732273553991).epsilon(1e-14));
    CHECK_THROWS_AS(expected_shortfall(1.0, 1.0), DomainError);
}

TEST_CASE("moment") {
    CHECK(moment(1.4, 7, 1.0) == Approx(1.4).epsilon(1e-14));
    CHECK(moment(1.0, 2, 2.0) == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(moment(3.3, 4, 0.0) == Approx(1.0));
}

TEST_CASE("survival family") {
    CHECK(survival(0.5, 1, 0.7) == 0.0);
    CHECK(survival(0.7, 1, 0.7) == 1.0);
    CHECK(survival(1.0, 10, 1.0) == Approx(0.387420489).epsilon(1e-14));
    CHECK(survival(0.05, 10, 1.0) == 0.0);

    CHECK(max_cdf_power(1.3, 6, 0.8, 1) == Approx(1.0 - survival(1.3, 6, 0.8)).epsilon(1e-14));
    CHECK(max_cdf_power(0.05, 10, 1.0, 3) == 1.0);
    CHECK(max_cdf_power(1.0, 10, 1.0, 2) ==
          Approx(1.0 - 2.0 * std::pow(0.9, 9) + std::pow(0.8, 9)).epsilon(1e-13));

    CHECK(min_survival(1.3, 6, 0.8, 1) == Approx(survival(1.3, 6, 0.8)).epsilon(1e-15));
    CHECK(min_survival(1.0, 10, 1.0, 2) == Approx(0.134217728).epsilon(1e-13));
    CHECK(min_survival(0.15, 10, 1.0, 2) == 0.0);
}

TEST_CASE("pdf_at") {
    CHECK(pdf_at(1.5, 2, 1.0) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(pdf_at(0.05, 10, 1.0) == 0.0);
    CHECK(pdf_at(1.0, 10, 1.0) == Approx(0.387420489).epsilon(1e-14));
    CHECK_THROWS_AS(pdf_at(1.0, 1, 1.0), DomainError);
}

TEST_CASE("mean_past_lifetime") {
    CHECK(mean_past_lifetime(0.05, 10, 1.0) == Approx(0.95).epsilon(1e-15));
    CHECK(mean_past_lifetime(2.5, 1, 1.0) == Approx(0.5).epsilon(1e-15));
    // the early exit drops only terms below double resolution
    for (double x : {0.3, 1.0, 4.0, 20.0}) {
        const auto last = static_cast<std::int64_t>(std::floor(30 * x / 0.5));
        CHECK(mean_past_lifetime(x, 30, 0.5) == Approx(mean_past_lifetime_sum(x, 30, 0.5, last)).epsilon(1e-13));
    }
}

TEST_CASE("mgf") {
    CHECK(mgf(1.7, 5, 0.0) == 1.0);
    for (double t : {-0.5, 0.3, 1.2}) {
        CHECK(mgf(1.4, 1, t) == Approx(std::exp(t * 1.4)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(mgf(10.0, 100, 1.0), RangeError);
}

TEST_CASE("mgf kernel against quadrature of its integral form") {
    // e^u gamma(n, u) / u^{n-1} = u * int_0^1 (1-v)^{n-1} e^{u v} dv
    for (int n : {2, 3, 6}) {
        for (double x : {0.5, 2.0}) {
            const double t = 0.4;
            const double u = n * t * x;
            const auto r = integrate_finite(
                [&](double v) { return std::pow(1.0 - v, n - 1) * std::exp(u * v); }, 0.0, 1.0, 1e-13, 12);
            CHECK(mgf(x, n, t) == Approx(1.0 + u * r.value).epsilon(1e-11));
        }
    }
}

TEST_CASE("estimate dispatch") {
    const Sample s({1.0, 3.0, 2.0});
    CHECK(estimate(FunctionalSpec::quantile(0.5), s).value == Approx(2.0 * std::numbers::ln2).epsilon(1e-15));
    CHECK(estimate(FunctionalSpec::moment(1.0), s).value == Approx(2.0).epsilon(1e-15));
    CHECK(estimate(FunctionalSpec::moment(1.0), s).family == EstimatorFamily::ClosedFormUnbiased);
    CHECK_THROWS_AS(estimate(FunctionalSpec::rate_power(3.0), Sample({1.0, 2.0})), DomainError);
    CHECK_THROWS_AS(Sample({1.0, -2.0}), InputError);
    CHECK_THROWS_AS(Sample({}), InputError);
}

TEST_CASE("mle_estimate") {
    CHECK(mle_estimate(FunctionalSpec::rate_power(1.0), Sample({2.0, 2.0})).value == Approx(0.5));
    CHECK(mle_estimate(FunctionalSpec::moment(2.0), Sample({1.0, 3.0})).value == Approx(5.0));
    CHECK(mle_estimate(FunctionalSpec::survival(1.0), Sample({1.0})).value == Approx(std::exp(-1.0)));
    CHECK(mle_estimate(FunctionalSpec::moment(2.0), Sample({1.0, 3.0})).family == EstimatorFamily::MlePlugin);
}

TEST_CASE("closed-form variances") {
    for (int n : {2, 5, 30}) {
        for (double lambda : {0.5, 2.0}) {
            const double v = 1.0 / (n * lambda * lambda);
            CHECK(closed_form_variance_unbiased(1.0, n, lambda) == Approx(v).epsilon(1e-12));
            CHECK(closed_form_variance_mle(1.0, n, lambda) == Approx(v).epsilon(1e-12));
        }
    }
    CHECK(closed_form_variance_unbiased(2.0, 5, 1.0) == Approx(4.0 * (24.0 * 40320.0 / 518400.0 - 1.0)).epsilon(1e-13));
    CHECK(closed_form_variance_mle(2.0, 5, 1.0) == Approx(4.0).epsilon(1e-13));
    const double g15 = std::tgamma(1.5);
    CHECK(closed_form_variance_mle(0.5, 10, 2.0) == Approx((1.0 - g15 * g15) / (10.0 * 2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(closed_form_variance_mle(-0.5, 10, 1.0), DomainError);
}

TEST_CASE("scale equivariance") {
    for (double c : {0.01, 3.0, 1e4}) {
        for (double x : {0.2, 1.7}) {
            CHECK(quantile(c * x, 0.3) == Approx(c * quantile(x, 0.3)).epsilon(1e-14));
            CHECK(expected_shortfall(c * x, 0.8) == Approx(c * expected_shortfall(x, 0.8)).epsilon(1e-14));
            CHECK(moment(c * x, 6, 1.0) == Approx(c * moment(x, 6, 1.0)).epsilon(1e-14));
        }
    }
}

TEST_CASE("bounds and continuity at the indicator boundary") {
    for (int n : {2, 3, 8, 40}) {
        for (double x = 0.01; x < 4.0; x += 0.013) {
            const double s = survival(x, n, 1.0);
            const double ms = min_survival(x, n, 0.5, 3);
            const double mx = max_cdf_power(x, n, 0.7, 3);
            CHECK((s >= 0.0 && s <= 1.0));
            CHECK((ms >= 0.0 && ms <= 1.0));
            CHECK(mx <= 1.0 + 1e-12);
            // unbiasedness forces negative values for m > n - 1 at n = 2
            if (n >= 3) CHECK(mx >= -1e-12);
        }
        const double edge = 1.0 / n;
        const double eps = 1e-9;
        CHECK(std::abs(survival(edge + eps, n, 1.0) - survival(edge - eps, n, 1.0)) < 1e-6);
        CHECK(std::abs(min_survival(2.0 * edge + eps, n, 1.0, 2) - min_survival(2.0 * edge - eps, n, 1.0, 2)) < 1e-6);
        CHECK(std::abs(max_cdf_power(edge + eps, n, 1.0, 2) - max_cdf_power(edge - eps, n, 1.0, 2)) < 1e-6);
        if (n >= 3) {
            CHECK(std::abs(pdf_at(edge + eps, n, 1.0) - pdf_at(edge - eps, n, 1.0)) < 1e-4);
        }
    }
}

TEST_CASE("max_cdf_power leaves [0, 1] only at n = 2") {
    double lowest = 1.0;
    for (double x = 0.01; x < 4.0; x += 0.013) lowest = std::min(lowest, max_cdf_power(x, 2, 0.7, 3));
    CHECK(lowest == Approx(-0.5).epsilon(0.01));
}

TEST_CASE("mean_past_lifetime terms past the cap are zero") {
    for (int n : {1, 2, 9}) {
        for (double x : {0.3, 2.2}) {
            const auto cap = static_cast<std::int64_t>(std::floor(n * x / 0.4));
            CHECK(mean_past_lifetime_sum(x, n, 0.4, cap + 25) == mean_past_lifetime_sum(x, n, 0.4, cap));
        }
    }
}
