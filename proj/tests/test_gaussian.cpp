#include <Eigen/Core>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "contpol/gaussian.hpp"
#include "contpol/stats.hpp"

using namespace contpol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("scalar log density matches hand-computed values") {
    const VectorXd x = VectorXd::Constant(1, 1.3);
    const VectorXd mu = VectorXd::Constant(1, 0.5);
    const MatrixXd cov = MatrixXd::Constant(1, 1, 2.25);
    CHECK(gaussian_logpdf(x, mu, cov) ==
          Catch::Approx(-1.4666258635350593).epsilon(1e-14));
    // standard-normal mode
    CHECK(gaussian_logpdf(VectorXd::Zero(1), VectorXd::Zero(1),
                          MatrixXd::Identity(1, 1)) ==
          Catch::Approx(-0.9189385332046727).epsilon(1e-14));
}

TEST_CASE("bivariate log density matches hand-computed value") {
    MatrixXd cov(2, 2);
    cov << 2.0, 0.6, 0.6, 1.0;
    VectorXd x(2);
    x << 0.3, -1.2;
    CHECK(gaussian_logpdf(x, VectorXd::Zero(2), cov) ==
          Catch::Approx(-3.1224203092786182).epsilon(1e-13));
}

TEST_CASE("entropy closed form") {
    CHECK(gaussian_entropy(MatrixXd::Identity(1, 1)) ==
          Catch::Approx(1.4189385332046727).epsilon(1e-14));
    CHECK(gaussian_entropy(MatrixXd::Constant(1, 1, 4.0)) ==
          Catch::Approx(2.112085713764618).epsilon(1e-14));
}

TEST_CASE("psd square root reproduces the matrix") {
    MatrixXd cov(2, 2);
    cov << 2.0, 0.6, 0.6, 1.0;
    const MatrixXd l = psd_sqrt(cov);
    CHECK((l * l.transpose() - cov).norm() < 1e-12);

    MatrixXd singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;  // rank one, LLT fails, eigen path
    const MatrixXd ls = psd_sqrt(singular);
    CHECK((ls * ls.transpose() - singular).norm() < 1e-10);

    MatrixXd negdef = -MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(psd_sqrt(negdef), std::invalid_argument);
}

TEST_CASE("zero covariance draws consume no randomness") {
    RandomStream a(31, 4), b(31, 4);
    const VectorXd mu = VectorXd::Constant(1, 2.5);
    const VectorXd s = sample_gaussian(mu, MatrixXd::Zero(1, 1), a);
    CHECK(s(0) == 2.5);
    CHECK(a.next_u32() == b.next_u32());  // stream position unchanged
}

TEST_CASE("sampling determinism") {
    RandomStream a(8, 2), b(8, 2);
    const VectorXd mu = VectorXd::Zero(2);
    MatrixXd cov(2, 2);
    cov << 1.5, -0.4, -0.4, 0.7;
    const VectorXd s1 = sample_gaussian(mu, cov, a);
    const VectorXd s2 = sample_gaussian(mu, cov, b);
    CHECK(s1 == s2);
}

TEST_CASE("scalar sampling matches the target law") {
    StreamFamily fam(555);
    const VectorXd mu = VectorXd::Constant(1, -0.7);
    const MatrixXd cov = MatrixXd::Constant(1, 1, 2.25);
    const int n = 20000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        RandomStream rng = fam.stream(i);
        xs[i] = sample_gaussian(mu, cov, rng)(0);
    }
    const auto ms = mean_stderr(xs);
    CHECK(std::abs(ms.mean - (-0.7)) < 4.0 * ms.stderr_);
    const double var = sample_variance(xs);
    CHECK(std::abs(var - 2.25) < 4.0 * variance_stderr(2.25, n));
    const auto ks = ks_one_sample(
        xs, [](double v) { return normal_cdf((v + 0.7) / 1.5); });
    CHECK_FALSE(ks.reject);
}

TEST_CASE("bivariate sampling matches mean and covariance") {
    StreamFamily fam(556);
    VectorXd mu(2);
    mu << 0.4, -1.0;
    MatrixXd cov(2, 2);
    cov << 2.0, 0.6, 0.6, 1.0;
    const int n = 20000;
    Eigen::MatrixXd acc = MatrixXd::Zero(2, 2);
    VectorXd mean = VectorXd::Zero(2);
    std::vector<VectorXd> draws(n);
    for (int i = 0; i < n; ++i) {
        RandomStream rng = fam.stream(i);
        draws[i] = sample_gaussian(mu, cov, rng);
        mean += draws[i];
    }
    mean /= n;
    for (int i = 0; i < n; ++i) {
        const VectorXd d = draws[i] - mean;
        acc += d * d.transpose();
    }
    acc /= (n - 1);
    CHECK(std::abs(mean(0) - 0.4) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(mean(1) + 1.0) < 4.0 * std::sqrt(1.0 / n));
    CHECK(std::abs(acc(0, 0) - 2.0) < 4.0 * variance_stderr(2.0, n));
    CHECK(std::abs(acc(1, 1) - 1.0) < 4.0 * variance_stderr(1.0, n));
    // off-diagonal: se ~ sqrt((c11 c22 + c12^2)/n)
    CHECK(std::abs(acc(0, 1) - 0.6) <
          4.0 * std::sqrt((2.0 * 1.0 + 0.36) / n));
}
