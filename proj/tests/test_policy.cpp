#include <cmath>

#include <Eigen/Core>
#include <catch2/catch_amalgamated.hpp>

#include "contpol/gaussian.hpp"
#include "contpol/hillcar.hpp"
#include "contpol/policy.hpp"
#include "contpol/rng.hpp"

using namespace contpol;

namespace {

History<CarState> history_at(double x, double v = 0.0) {
    History<CarState> h;
    h.states.push_back(CarState{x, v});
    return h;
}

}  // namespace

TEST_CASE("proportional controller mean is theta times position error") {
    const double xt = 2.0;
    const auto pol = k_controller(-1.5, 0.0, xt);
    CHECK(pol.mean(CarState{-3.0, 0.0})(0) ==
          Catch::Approx(-1.5 * (-3.0 - 2.0)).epsilon(1e-15));
    CHECK(pol.mean(CarState{2.0, 0.0})(0) == 0.0);
    CHECK(pol.mean(CarState{4.0, 1.0})(0) ==
          Catch::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("zero noise scale gives a deterministic policy") {
    const auto pol = k_controller(0.7, 0.0, 0.0);
    REQUIRE(pol.deterministic());
    const auto h = history_at(1.3);

    RandomStream rng(5, 0);
    const auto a = pol.sample(h, rng);
    CHECK(a(0) == Catch::Approx(0.7 * 1.3).epsilon(1e-15));
    // Sampling consumed no randomness.
    RandomStream fresh(5, 0);
    CHECK(rng.next_u32() == fresh.next_u32());

    CHECK_THROWS_AS(pol.log_density(h, a), std::logic_error);
}

TEST_CASE("stochastic samples are mean plus scaled standard normals") {
    const double sp = 0.8;
    const auto pol = k_controller(-2.0, sp, 2.0);
    REQUIRE_FALSE(pol.deterministic());
    const auto h = history_at(-1.0);
    const double mu = -2.0 * (-1.0 - 2.0);

    RandomStream rng(11, 3);
    RandomStream ref(11, 3);
    for (int i = 0; i < 4; ++i) {
        const auto a = pol.sample(h, rng);
        CHECK(a(0) == mu + sp * ref.next_normal());
    }
}

TEST_CASE("log density matches the Gaussian density at the policy moments") {
    const auto pol = k_controller(1.2, 0.5, 0.0);
    const auto h = history_at(2.0);
    const Action a = Eigen::VectorXd::Constant(1, 2.1);
    const auto mu = pol.mean(h.last());
    const auto cov = Eigen::MatrixXd::Constant(1, 1, 0.25);
    CHECK(pol.log_density(h, a) ==
          Catch::Approx(gaussian_logpdf(a, mu, cov)).epsilon(1e-15));
    // Hand value: log N(2.1 | 2.4, 0.25).
    const double hand =
        -0.5 * std::log(2.0 * M_PI * 0.25) - 0.5 * 0.09 / 0.25;
    CHECK(pol.log_density(h, a) == Catch::Approx(hand).epsilon(1e-13));
}

TEST_CASE("with_theta changes parameters and nothing else") {
    const auto pol = k_controller(1.0, 0.3, 2.0);
    const auto other = pol.with_theta(Eigen::VectorXd::Constant(1, -4.0));
    CHECK(other.theta(0) == -4.0);
    CHECK(pol.theta(0) == 1.0);
    const auto h = history_at(0.0);
    RandomStream r1(2, 0), r2(2, 0);
    // Same noise stream, different mean shift only.
    const double a1 = pol.sample(h, r1)(0);
    const double a2 = other.sample(h, r2)(0);
    CHECK(a2 - a1 == Catch::Approx((-4.0 - 1.0) * (0.0 - 2.0)).epsilon(1e-12));
}

TEST_CASE("sample_with evaluates the mean at substitute parameters") {
    const auto pol = k_controller(1.0, 0.0, 0.0);
    const auto h = history_at(3.0);
    RandomStream rng(0, 0);
    const auto a =
        pol.sample_with(Eigen::VectorXd::Constant(1, -2.5), h, rng);
    CHECK(a(0) == Catch::Approx(-7.5).epsilon(1e-15));
}

TEST_CASE("covariance may depend on the timestep") {
    GaussianPolicy<CarState> pol;
    pol.theta = Eigen::VectorXd::Zero(1);
    pol.features = [](const CarState&) {
        return Eigen::MatrixXd::Constant(1, 1, 1.0);
    };
    pol.cov = [](const History<CarState>& h) {
        return Eigen::MatrixXd::Constant(1, 1, 1.0 / (1.0 + h.t()));
    };
    History<CarState> h0 = history_at(0.0);
    History<CarState> h1 = h0;
    h1.actions.push_back(Eigen::VectorXd::Zero(1));
    h1.states.push_back(CarState{0.0, 0.0});
    REQUIRE(h0.t() == 0);
    REQUIRE(h1.t() == 1);

    RandomStream r0(7, 0), r1(7, 0);
    const double a0 = pol.sample(h0, r0)(0);
    const double a1 = pol.sample(h1, r1)(0);
    // Same underlying normal, standard deviations 1 and 1/sqrt(2).
    CHECK(a1 * std::sqrt(2.0) == Catch::Approx(a0).epsilon(1e-12));
}
