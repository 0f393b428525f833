#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/montecarlo.hpp"
#include "uexp/rng.hpp"

using namespace uexp;
using doctest::Approx;

namespace {

McConfig config(std::int64_t reps, std::int64_t n, double lambda, std::uint64_t seed, std::int64_t chunks = 1) {
    McConfig c;
    c.replications = reps;
    c.n = n;
    c.lambda = lambda;
    c.seed = seed;
    c.parallel_chunks = chunks;
    return c;
}

bool within(const McSummary& s, double target, double k = 4.0) {
    return std::abs(s.mean - target) < k * s.std_error;
}

}  // namespace

TEST_CASE("substream golden values") {
    Substream s(20240601, 0);
    CHECK(s.next_u64() == 0xe6f914d3284de12bULL);
    CHECK(s.next_u64() == 0xe576d61f058ef503ULL);
    CHECK(s.next_u64() == 0xd71142e64399fbe5ULL);
    CHECK(s.next_u64() == 0x4bca040457cd1521ULL);

    Substream e(42, 3);
    CHECK(e.exponential(1.0) == 1.0838293993264223);
    CHECK(e.exponential(1.0) == 0.11902958545752605);
    CHECK(e.exponential(1.0) == 0.15376816660958476);
}

TEST_CASE("substreams differ by index") {
    Substream a(7, 0);
    Substream b(7, 1);
    CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("exponential draws") {
    Substream s(11, 0);
    const Sample x = sample_exponential(2.0, 1000000, s);
    const double se = 0.5 / std::sqrt(1e6);
    CHECK(std::abs(x.mean() - 0.5) < 4.0 * se);

    std::int64_t above = 0;
    Substream u(12, 0);
    const Sample y = sample_exponential(1.0, 1000000, u);
    for (double v : y.observations()) above += v > 1.0 ? 1 : 0;
    const double p = std::exp(-1.0);
    CHECK(std::abs(static_cast<double>(above) / 1e6 - p) < 4.0 * std::sqrt(p * (1 - p) / 1e6));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    const ReplicationStatistic stat = [](std::span<const double> x, std::span<double> out) {
        double s = 0.0;
        for (double v : x) s += v;
        out[0] = s;
        out[1] = x[0];
    };
    const auto serial = replicate_serial(config(10007, 6, 1.3, 99), 2, stat);
    for (std::int64_t chunks : {2, 3, 8}) {
        const auto parallel = replicate_parallel(config(10007, 6, 1.3, 99, chunks), 2, stat);
        CHECK(parallel.values == serial.values);
    }
}

TEST_CASE("parallel kernel rethrows the first failing replication") {
    const ReplicationStatistic stat = [](std::span<const double> x, std::span<double> out) {
        if (x[0] > 3.0) throw DomainError("large draw");
        out[0] = x[0];
    };
    CHECK_THROWS_AS(replicate_parallel(config(5000, 1, 1.0, 5, 4), 1, stat), DomainError);
}

TEST_CASE("summarize") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const McSummary s = summarize(v);
    CHECK(s.mean == Approx(2.5));
    CHECK(s.variance == Approx(5.0 / 3.0));
    CHECK(s.std_error == Approx(std::sqrt(5.0 / 12.0)));
    CHECK_FALSE(s.ks_statistic);
}

TEST_CASE("empirical_bias") {
    CHECK(within(empirical_bias(FunctionalSpec::moment(1.0), config(200000, 3, 2.0, 1)), 0.5));
    CHECK(within(empirical_bias(FunctionalSpec::survival(1.0), config(1000000, 5, 1.0, 2, 4)), std::exp(-1.0)));
    const McSummary tate =
        empirical_bias(FunctionalSpec::quantile(0.5), config(1000000, 2, 1.0, 3, 4), EstimatorFamily::TateBiased);
    CHECK(within(tate, 2.0 * std::numbers::ln2));
    CHECK_FALSE(within(tate, std::numbers::ln2));
}

TEST_CASE("variance_comparison") {
    const auto one = variance_comparison(1.0, config(200000, 4, 1.0, 4, 2));
    CHECK(one.closed_unbiased == Approx(0.25));
    CHECK(one.closed_mle == Approx(0.25));
    CHECK(std::abs(one.empirical_unbiased.variance - 0.25) < 4.0 * one.empirical_unbiased.variance_std_error);

    const auto two = variance_comparison(2.0, config(1000, 5, 1.0, 4));
    CHECK(two.closed_unbiased == Approx(3.4666666666666).epsilon(1e-12));
    CHECK(two.closed_mle == Approx(4.0));

    const auto neg = variance_comparison(-0.4, config(200000, 10, 1.0, 5, 2));
    CHECK(neg.closed_unbiased < neg.closed_mle);
    // X^{-0.4} has no fourth moment, so only the unbiased side gets a standard-error band
    CHECK(std::abs(neg.empirical_unbiased.variance - neg.closed_unbiased) <
          4.0 * neg.empirical_unbiased.variance_std_error);

    CHECK_THROWS_AS(variance_comparison(-0.6, config(10, 5, 1.0, 1)), DomainError);
    CHECK_THROWS_AS(variance_comparison(0.0, config(10, 5, 1.0, 1)), DomainError);
}

TEST_CASE("asymptotic variance and derivatives") {
    CHECK(asymptotic_variance(FunctionalSpec::moment(1.0), 9, 2.0) == Approx(0.25));
    const double l = std::log(1.0 - 0.3);
    CHECK(asymptotic_variance(FunctionalSpec::quantile(0.3), 9, 2.0) == Approx(l * l / 4.0));

    const FunctionalSpec specs[] = {FunctionalSpec::survival(1.0), FunctionalSpec::mgf(0.4),
                                    FunctionalSpec::rate_power(1.5), FunctionalSpec::mean_past_lifetime(0.7),
                                    FunctionalSpec::max_cdf_power(0.6, 2)};
    for (const auto& spec : specs) {
        const double x = 0.93;
        const double h = 1e-5;
        const double fd = (closed_form_at(spec, 12, x + h) - closed_form_at(spec, 12, x - h)) / (2.0 * h);
        CHECK(estimator_derivative(spec, 12, x) == Approx(fd).epsilon(1e-6));
    }
    CHECK_THROWS_AS(asymptotic_variance(FunctionalSpec::survival(10.0), 5, 1.0), NondifferentiableError);
    CHECK_THROWS_AS(asymptotic_variance(FunctionalSpec::survival(5.0), 5, 1.0), NondifferentiableError);
}

TEST_CASE("clt_check") {
    const McSummary m = clt_check(FunctionalSpec::moment(1.0), config(100000, 200, 1.0, 6, 4));
    REQUIRE(m.ks_statistic);
    // Z is a standardized Gamma(200): its own distance from the normal plus a 99% KS band
    double gap = 0.0;
    for (double z = -6.0; z <= 6.0; z += 1e-3) {
        const double x = 200.0 + z * std::sqrt(200.0);
        gap = std::max(gap, std::abs(boost::math::gamma_p(200.0, x) - 0.5 * std::erfc(-z / std::sqrt(2.0))));
    }
    CHECK(gap > 0.009);
    CHECK(*m.ks_statistic < gap + 1.63 / std::sqrt(100000.0));
    const McSummary q = clt_check(FunctionalSpec::quantile(0.5), config(100000, 200, 1.0, 7, 4));
    REQUIRE(q.standardized_moments);
    CHECK(std::abs(q.standardized_moments->first - 2.0 / std::sqrt(200.0)) < 0.2);
}

TEST_CASE("histogram") {
    const std::vector<double> v{-2.0, -0.5, 0.1, 0.2, 0.9, 5.0};
    const Histogram h = histogram(v, 4, -1.0, 1.0);
    CHECK(h.edges.size() == 5);
    CHECK(h.counts == std::vector<std::int64_t>{0, 1, 2, 1});
}
