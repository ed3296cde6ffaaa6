#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "contpol/hillcar.hpp"
#include "contpol/mdp.hpp"
#include "contpol/policy.hpp"
#include "contpol/rng.hpp"

using namespace contpol;

TEST_CASE("default profile point values") {
    const auto prof = HillProfile::default_profile();
    CHECK(prof.h(-3.0) == Catch::Approx(0.75).epsilon(1e-14));
    CHECK(prof.dh(-3.0) == Catch::Approx(-0.25).epsilon(1e-13));
    CHECK(prof.ddh(-3.0) == Catch::Approx(2.0).epsilon(1e-13));
    CHECK(prof.h(0.0) == Catch::Approx(1.44).epsilon(1e-14));
}

TEST_CASE("critical points of the default valley") {
    const auto prof = HillProfile::default_profile();
    CHECK(prof.x_left_min() ==
          Catch::Approx(-2.8641231848089785).epsilon(1e-10));
    CHECK(prof.x_peak() == Catch::Approx(-0.752578144702527).epsilon(1e-10));
    CHECK(prof.x_target() == Catch::Approx(2.1167013295115056).epsilon(1e-10));
    CHECK(std::abs(prof.dh(prof.x_target())) < 1e-9);
    CHECK(prof.ddh(prof.x_target()) > 0.0);
    CHECK(prof.h(prof.x_target()) ==
          Catch::Approx(-0.5149129612502277).epsilon(1e-10));
    // The target basin floor sits strictly below the starting well.
    CHECK(prof.h(prof.x_target()) < prof.h(prof.x_left_min()));
}

TEST_CASE("analytic derivatives agree with central differences") {
    const auto prof = HillProfile::default_profile();
    const double h = 1e-5;
    for (double x = -3.9; x <= 4.9; x += 0.37) {
        const double fd1 = (prof.h(x + h) - prof.h(x - h)) / (2 * h);
        const double fd2 = (prof.dh(x + h) - prof.dh(x - h)) / (2 * h);
        CHECK(prof.dh(x) == Catch::Approx(fd1).margin(1e-6));
        CHECK(prof.ddh(x) == Catch::Approx(fd2).margin(1e-6));
    }
}

TEST_CASE("profiles without the required two-well shape are rejected") {
    // Single parabolic well: only one minimum.
    CHECK_THROWS_AS(HillProfile({0.0, 0.0, 1.0}, -4.0, 5.0),
                    std::invalid_argument);
    // Reversed tilt puts the global minimum on the starting side.
    CHECK_THROWS_AS(HillProfile({1.44, -0.23, -0.44, 0.08, 0.04}, -4.0, 5.0),
                    std::invalid_argument);
    // Monotone ramp: no interior critical points at all.
    CHECK_THROWS_AS(HillProfile({0.0, 1.0}, -4.0, 5.0), std::invalid_argument);
}

TEST_CASE("single Euler substep from rest matches the oracle") {
    CarParams p;
    p.noise_std = 0.0;
    p.euler_substeps = 1;
    const auto prof = HillProfile::default_profile();
    CarState s{-3.0, 0.0};
    RandomStream rng(0, 0);
    const auto s1 = step(s, 0.0, p, prof, rng);
    CHECK(s1.x == -3.0);
    CHECK(s1.v == Catch::Approx(0.23082352941176476).epsilon(1e-14));
}

TEST_CASE("default ten-substep transition matches the oracle") {
    CarParams p;
    p.noise_std = 0.0;
    REQUIRE(p.euler_substeps == 10);
    const auto prof = HillProfile::default_profile();
    CarState s{-3.0, 0.0};
    RandomStream rng(0, 0);
    const auto s1 = step(s, 0.0, p, prof, rng);
    CHECK(s1.x == Catch::Approx(-2.9896974450149805).epsilon(1e-13));
    CHECK(s1.v == Catch::Approx(0.226008130063565).epsilon(1e-13));
}

TEST_CASE("forces clamp to the actuator range") {
    CarParams p;
    p.noise_std = 0.0;
    const auto prof = HillProfile::default_profile();
    const CarState s{-3.0, 0.0};
    RandomStream r1(0, 0), r2(0, 0);
    const auto a = step(s, 100.0, p, prof, r1);
    const auto b = step(s, 10.0, p, prof, r2);
    CHECK(a.x == b.x);
    CHECK(a.v == b.v);
}

TEST_CASE("position clamps to the track and stays there under outward push") {
    CarParams p;
    p.noise_std = 0.0;
    const auto prof = HillProfile::default_profile();
    CarState s{5.0, 1.0};
    RandomStream rng(0, 0);
    for (int i = 0; i < 3; ++i) {
        s = step(s, 10.0, p, prof, rng);
        CHECK(s.x == 5.0);
    }
}

TEST_CASE("action noise draws exactly one normal per step") {
    CarParams p;
    REQUIRE(p.noise_std == 1.0);
    const auto prof = HillProfile::default_profile();
    const CarState s{-3.0, 0.0};

    RandomStream noisy(9, 1);
    const auto got = step(s, 2.0, p, prof, noisy);

    RandomStream ref(9, 1);
    const double z = ref.next_normal();
    CarParams quiet = p;
    quiet.noise_std = 0.0;
    const auto want = step(s, 2.0 + z, quiet, prof, ref);

    CHECK(got.x == want.x);
    CHECK(got.v == want.v);
    // Stream positions agree afterwards too.
    CHECK(noisy.next_u32() == ref.next_u32());
}

TEST_CASE("track energy is conserved in the limit of fine substeps") {
    // Frictionless, force-free coasting: the only energy change is numerical.
    CarParams p;
    p.noise_std = 0.0;
    p.damping = 0.0;
    const auto prof = HillProfile::default_profile();

    auto max_drift = [&](int substeps) {
        CarParams q = p;
        q.euler_substeps = substeps;
        CarState s{-3.0, 0.0};
        RandomStream rng(0, 0);
        const double e0 = track_energy(s, q, prof);
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            s = step(s, 0.0, q, prof, rng);
            worst = std::max(worst, std::abs(track_energy(s, q, prof) - e0));
        }
        return worst;
    };

    const double d1 = max_drift(1);
    const double d4 = max_drift(4);
    const double d16 = max_drift(16);
    const double d64 = max_drift(64);
    CHECK(d4 < d1);
    CHECK(d16 < d4);
    CHECK(d64 < d16);
    CHECK(d64 < 0.02);
}

TEST_CASE("deterministic controller returns match the reference integrator") {
    CarParams p;
    p.noise_std = 0.0;
    const auto prof = HillProfile::default_profile();
    const auto mdp = make_hillcar_mdp(p, prof);

    auto det_return = [&](double theta) {
        const auto pol = k_controller(theta, 0.0, prof.x_target());
        return discounted_return(rollout(mdp, pol, RandomStream(0, 0)),
                                 mdp.discount);
    };

    CHECK(det_return(0.0) == Catch::Approx(-46.86018784369776).epsilon(1e-9));
    CHECK(det_return(-3.0) == Catch::Approx(8.676736630920354).epsilon(1e-9));
    CHECK(det_return(-0.4) == Catch::Approx(-52.163243393820835).epsilon(1e-9));
}
