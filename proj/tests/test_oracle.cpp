#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/oracle.hpp"
#include "uexp/quadrature.hpp"

using namespace uexp;
using doctest::Approx;

TEST_CASE("gamma_mean_density") {
    CHECK(gamma_mean_density(1.0, 1, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(gamma_mean_density(1.0, 2, 1.0) == Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
    for (int n : {1, 3, 30}) {
        const auto r = integrate_to_infinity([n](double x) { return gamma_mean_density(x, n, 1.7); }, 0.0, 1e-13, 12);
        CHECK(r.value == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("expectation of simple estimators") {
    CHECK(expectation([](double) { return 2.5; }, 4, 0.7, 1e-10).value == Approx(2.5).epsilon(1e-10));
    for (int n : {1, 5, 40}) {
        CHECK(expectation([](double x) { return x; }, n, 2.0, 1e-10).value == Approx(0.5).epsilon(1e-10));
    }
    ExpectationOptions opt;
    opt.kinks = {0.2};
    const auto e = expectation([](double x) { return survival(x, 5, 1.0); }, 5, 1.0, 1e-10, opt);
    CHECK(e.value == Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("expectation reports an unreachable tolerance") {
    CHECK_THROWS_AS(expectation([](double x) { return x; }, 3, 1.0, 1e-30), QuadratureError);
}

TEST_CASE("verify_unbiasedness") {
    CHECK(verify_unbiasedness(FunctionalSpec::quantile(0.5), 3, 2.0, 1e-10).rel_bias < 1e-9);
    for (int n : {1, 4, 25}) {
        CHECK(verify_unbiasedness(FunctionalSpec::moment(1.0), n, 1.3, 1e-13).rel_bias < 1e-12);
    }
    const auto r = verify_unbiasedness(FunctionalSpec::mgf(0.5), 4, 1.0, 1e-10);
    CHECK(r.target == Approx(2.0));
    CHECK(r.rel_bias < 1e-8);
    CHECK(verify_unbiasedness(FunctionalSpec::mean_past_lifetime(1.0), 10, 1.0, 1e-10).oracle_expectation ==
          Approx(0.5819767068693265).epsilon(1e-9));
    CHECK(verify_unbiasedness(FunctionalSpec::mgf(0.1), 2, 1.0, 1e-10).oracle_expectation ==
          Approx(1.0 / 0.9).epsilon(1e-9));
}

TEST_CASE("distributional kinds across the sample-size range") {
    const FunctionalSpec specs[] = {FunctionalSpec::survival(2.0), FunctionalSpec::max_cdf_power(0.5, 3),
                                    FunctionalSpec::min_survival(1.0, 2), FunctionalSpec::pdf(1.0),
                                    FunctionalSpec::mean_past_lifetime(0.5)};
    for (const auto& spec : specs) {
        for (int n : {2, 7, 30}) {
            CHECK(verify_unbiasedness(spec, n, 0.5, 1e-10).rel_bias < 1e-7);
        }
    }
}

TEST_CASE("biased reference estimators") {
    CHECK_THROWS_AS(tate_estimate(FunctionalSpec::rate_power(1.0), 1.0, 2), DomainError);
    CHECK(tate_estimate(FunctionalSpec::rate_power(1.0), 1.0, 5).value == Approx(0.6).epsilon(1e-14));
    CHECK(tate_estimate(FunctionalSpec::quantile(0.5), 1.0, 2).value == Approx(2.0 * std::numbers::ln2).epsilon(1e-14));
    CHECK(tate_estimate(FunctionalSpec::quantile(0.5), 1.0, 2).family == EstimatorFamily::TateBiased);

    CHECK(tate_expected_value(FunctionalSpec::rate_power(1.0), 3, 2.0) == Approx(1.0).epsilon(1e-14));
    CHECK(tate_expected_value(FunctionalSpec::quantile(0.3), 2, 1.5) == Approx(-2.0 * std::log(0.7) / 1.5).epsilon(1e-14));
    const double lt = 1.5 * 0.8;
    CHECK(tate_expected_value(FunctionalSpec::max_cdf_power(0.8, 1), 4, 1.5) ==
          Approx((lt / (3.0 * (1.0 - std::exp(lt))) + 1.0) * (1.0 - std::exp(-lt))).epsilon(1e-13));
}

TEST_CASE("biased reference expectations match quadrature") {
    for (int n : {3, 6}) {
        for (double lambda : {0.5, 2.0}) {
            CHECK(verify_tate(FunctionalSpec::rate_power(0.5), n, lambda, 1e-10).rel_bias < 1e-8);
            CHECK(verify_tate(FunctionalSpec::quantile(0.9), n, lambda, 1e-10).rel_bias < 1e-8);
            CHECK(verify_tate(FunctionalSpec::max_cdf_power(1.0, 2), n, lambda, 1e-10).rel_bias < 1e-8);
        }
    }
}

TEST_CASE("verify_sweep is independent of the thread count") {
    std::vector<GridCell> cells;
    for (int n : {1, 5}) {
        cells.push_back({FunctionalSpec::quantile(0.25), n, 1.0});
        cells.push_back({FunctionalSpec::survival(0.5), n, 2.0});
    }
    cells.push_back({FunctionalSpec::quantile(0.25), 5, 1.0});
    const auto serial = verify_sweep(cells, 1e-10, false, Execution::serial());
    const auto parallel = verify_sweep(cells, 1e-10, false, Execution::with_threads(3));
    REQUIRE(serial.size() == cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        REQUIRE(serial[i].report);
        REQUIRE(parallel[i].report);
        CHECK(serial[i].report->oracle_expectation == parallel[i].report->oracle_expectation);
    }
}

TEST_CASE("verify_sweep records numerical failures per cell") {
    const std::vector<GridCell> cells{{FunctionalSpec::quantile(0.5), 3, 1.0}};
    const auto rows = verify_sweep(cells, 1e-30, false, Execution::serial());
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].report);
    CHECK(rows[0].numerical_failure);
}
