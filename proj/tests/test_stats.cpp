#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "contpol/rng.hpp"
#include "contpol/stats.hpp"

using namespace contpol;

TEST_CASE("mean and stderr on a hand-computed sample") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto ms = mean_stderr(xs);
    CHECK(ms.mean == Catch::Approx(2.5).epsilon(1e-15));
    // variance 5/3, se = sqrt(5/3/4)
    CHECK(ms.stderr_ == Catch::Approx(0.6454972243679028).epsilon(1e-14));
    CHECK(ms.n == 4);
    CHECK(mean_stderr({7.5}).stderr_ == 0.0);
    CHECK_THROWS_AS(mean_stderr({}), std::invalid_argument);
}

TEST_CASE("sample variance") {
    CHECK(sample_variance({1.0, 2.0, 3.0, 4.0}) ==
          Catch::Approx(5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("equality check combines standard errors") {
    const MeanStderr a{1.0, 0.3, 100};
    const MeanStderr b{1.5, 0.4, 100};
    const auto c = check_equal(a, b, 3.0);
    CHECK(c.diff == Catch::Approx(-0.5));
    CHECK(c.combined_se == Catch::Approx(0.5));
    CHECK(c.pass);
    const auto tight = check_equal(a, b, 0.5);
    CHECK_FALSE(tight.pass);
}

TEST_CASE("variance stderr rule") {
    CHECK(variance_stderr(2.0, 101) ==
          Catch::Approx(2.0 * std::sqrt(0.02)).epsilon(1e-14));
}

TEST_CASE("normal cdf basics") {
    CHECK(normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == Catch::Approx(0.975).epsilon(1e-9));
    for (double z : {-2.3, -0.7, 0.4, 1.9})
        CHECK(normal_cdf(-z) == Catch::Approx(1.0 - normal_cdf(z)).epsilon(1e-13));
}

TEST_CASE("one-sample ks accepts matching and rejects shifted samples") {
    RandomStream rng(77, 0);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = rng.next_normal();
    const auto ok = ks_one_sample(xs, [](double v) { return normal_cdf(v); });
    CHECK_FALSE(ok.reject);
    const auto bad =
        ks_one_sample(xs, [](double v) { return normal_cdf(v - 0.2); });
    CHECK(bad.reject);
}

TEST_CASE("one-sample ks statistic on a tiny hand case") {
    // Sample {0.5} against U(0,1): D = max(0.5, 0.5) = 0.5.
    const auto r = ks_one_sample({0.5}, [](double v) { return v; });
    CHECK(r.statistic == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(r.threshold == Catch::Approx(kKsCritical01).epsilon(1e-15));
}

TEST_CASE("two-sample ks accepts same law and rejects different laws") {
    RandomStream r1(5, 1), r2(5, 2), r3(5, 3);
    std::vector<double> a(1500), b(1500), c(1500);
    for (auto& x : a) x = r1.next_normal();
    for (auto& x : b) x = r2.next_normal();
    for (auto& x : c) x = 0.8 * r3.next_normal() + 0.3;
    CHECK_FALSE(ks_two_sample(a, b).reject);
    CHECK(ks_two_sample(a, c).reject);
}

TEST_CASE("ks critical value solves Q(c) = 0.01") {
    // Q_KS(c) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 c^2)
    double q = 0.0;
    for (int k = 40; k >= 1; --k) {
        const double term = std::exp(-2.0 * k * k * kKsCritical01 * kKsCritical01);
        q += (k % 2 == 1 ? term : -term);
    }
    q *= 2.0;
    CHECK(q == Catch::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ull);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8Cull);
    CHECK(fnv1a64("foobar") == 0x85944171F73967E8ull);
}
