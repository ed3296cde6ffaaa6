#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "contpol/config.hpp"
#include "contpol/continuation.hpp"
#include "contpol/grad.hpp"
#include "contpol/hillcar.hpp"
#include "contpol/landscape.hpp"
#include "contpol/policy.hpp"
#include "contpol/stats.hpp"

namespace contpol {

// One distributional identity, reduced to |observed| <= bound (both recorded
// so a failing report shows the margin).
struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    json to_json() const {
        json out = json::array();
        for (const auto& c : checks)
            out.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"observed", c.observed},
                           {"bound", c.bound},
                           {"detail", c.detail}});
        return out;
    }
};

namespace vdetail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

inline CheckResult from_equality(std::string name, const EqualityCheck& e) {
    CheckResult c;
    c.name = std::move(name);
    c.observed = std::abs(e.diff);
    c.bound = e.k * e.combined_se;
    c.pass = e.pass;
    c.detail = "diff=" + fmt(e.diff) + " se=" + fmt(e.combined_se);
    return c;
}

inline CheckResult from_ks(std::string name, const KsResult& k) {
    CheckResult c;
    c.name = std::move(name);
    c.observed = k.statistic;
    c.bound = k.threshold;
    c.pass = !k.reject;
    c.detail = "ks";
    return c;
}

inline Mdp<CarState> env_mdp(const ExperimentConfig& cfg) {
    CarParams p;
    p.mass = cfg.env.mass;
    p.gravity = cfg.env.gravity;
    p.damping = cfg.env.damping;
    p.dt = cfg.env.dt;
    p.a_min = cfg.env.a_min;
    p.a_max = cfg.env.a_max;
    p.x_min = cfg.env.x_min;
    p.x_max = cfg.env.x_max;
    p.noise_std = cfg.env.noise_std;
    p.euler_substeps = cfg.env.euler_substeps;
    p.x_initial = cfg.env.x_initial;
    return make_hillcar_mdp(p, HillProfile(cfg.env.profile_coefficients,
                                           cfg.env.x_min, cfg.env.x_max),
                            cfg.env.discount, cfg.env.horizon);
}

inline HillProfile env_profile(const ExperimentConfig& cfg) {
    return HillProfile(cfg.env.profile_coefficients, cfg.env.x_min,
                       cfg.env.x_max);
}

struct NamedCov {
    std::string name;
    CovarianceFn<CarState> lam;
};

inline std::vector<NamedCov> cov_variants(const ExperimentConfig& cfg,
                                          double x_target) {
    return {{"constant", scalar_constant_cov(cfg.verify.constant_lambda)},
            {"state_radial",
             state_radial_cov(cfg.verify.radial_sigma_ref, x_target)},
            {"time_decay", time_decay_cov(cfg.verify.time_decay_lambda0,
                                          cfg.verify.time_decay_beta)}};
}

}  // namespace vdetail

// Per-step parameter perturbation vs its closed-form mirror, at the return
// level: both estimate the same continuation value.
inline std::vector<CheckResult> verify_return_equalities(
    const ExperimentConfig& cfg, const StreamFamily& streams, int threads = 1) {
    const auto mdp = vdetail::env_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    std::vector<CheckResult> out;
    std::uint64_t salt = 0;
    for (const auto& variant : vdetail::cov_variants(cfg, xt)) {
        for (double theta : cfg.verify.theta_grid) {
            const auto pol = k_controller(theta, 0.0, xt);
            const auto a =
                estimate_continuation(mdp, pol, variant.lam,
                                      cfg.verify.n_rollouts,
                                      streams.derive(salt++), threads);
            const auto b = estimate_return(mdp, mirror_policy(pol, variant.lam),
                                           cfg.verify.n_rollouts,
                                           streams.derive(salt++), threads);
            out.push_back(vdetail::from_equality(
                "return_equality/" + variant.name +
                    "/theta=" + vdetail::fmt(theta),
                check_equal(a, b, cfg.verify.equality_k)));
        }
    }
    return out;
}

// Action-distribution checks at fixed histories: the parameter mixture matches
// the closed-form mirror in mean, variance and whole distribution, and the
// mirror covariance itself is assembled to machine precision.
inline std::vector<CheckResult> verify_mixture_moments(
    const ExperimentConfig& cfg, const StreamFamily& streams, int threads = 1) {
    const double xt = vdetail::env_profile(cfg).x_target();
    const double base_sigma = 0.5;
    const auto pol = k_controller(-1.0, base_sigma, xt);
    const auto lam = scalar_constant_cov(cfg.verify.constant_lambda);
    const auto mirror = mirror_policy(pol, lam);
    const std::vector<double> states{-3.5, -3.0, -1.0, 0.5, 4.0};
    std::vector<CheckResult> out;
    std::uint64_t salt = 1000;

    double worst_cov = 0.0;
    for (double x : states) {
        History<CarState> h;
        h.states.push_back(CarState{x, 0.0});
        const double d = x - xt;
        const double want =
            cfg.verify.constant_lambda * d * d + base_sigma * base_sigma;
        worst_cov = std::max(worst_cov,
                             std::abs(mirror.cov(h)(0, 0) - want));

        std::vector<double> mix, cf;
        mix.reserve(cfg.verify.m_actions);
        cf.reserve(cfg.verify.m_actions);
        {
            const auto fam_a = streams.derive(salt++);
            const auto fam_b = streams.derive(salt++);
            const auto as = action_samples(mixture_mirror(pol, lam), h,
                                           cfg.verify.m_actions, fam_a, threads);
            const auto bs = action_samples(mirror, h, cfg.verify.m_actions,
                                           fam_b, threads);
            for (const auto& a : as) mix.push_back(a(0));
            for (const auto& b : bs) cf.push_back(b(0));
        }
        const std::string tag = "/x=" + vdetail::fmt(x);
        out.push_back(vdetail::from_equality(
            "mixture_mean" + tag,
            check_equal(mean_stderr(mix), mean_stderr(cf), cfg.verify.moment_k)));

        const double v1 = sample_variance(mix);
        const double v2 = sample_variance(cf);
        CheckResult var;
        var.name = "mixture_variance" + tag;
        var.observed = std::abs(v1 - v2);
        var.bound = cfg.verify.moment_k *
                    std::hypot(variance_stderr(v1, mix.size()),
                               variance_stderr(v2, cf.size()));
        var.pass = var.observed <= var.bound;
        var.detail = "var=" + vdetail::fmt(v1) + " vs " + vdetail::fmt(v2);
        out.push_back(var);

        out.push_back(
            vdetail::from_ks("mixture_ks" + tag, ks_two_sample(mix, cf)));
    }

    CheckResult cov;
    cov.name = "mirror_covariance_machine_precision";
    cov.observed = worst_cov;
    cov.bound = 1e-12;
    cov.pass = cov.observed <= cov.bound;
    cov.detail = "max abs deviation over " + std::to_string(states.size()) +
                 " states";
    out.push_back(cov);

    // Deterministic original: the mixture is exactly Gaussian, testable
    // against the closed-form CDF rather than a second sample.
    {
        const auto det = k_controller(-1.0, 0.0, xt);
        History<CarState> h;
        h.states.push_back(CarState{-3.0, 0.0});
        const double d = -3.0 - xt;
        const double mu = -1.0 * d;
        const double sd = std::sqrt(cfg.verify.constant_lambda * d * d);
        const auto as = action_samples(mixture_mirror(det, lam), h,
                                       cfg.verify.m_actions,
                                       streams.derive(salt++), threads);
        std::vector<double> xs;
        xs.reserve(as.size());
        for (const auto& a : as) xs.push_back(a(0));
        out.push_back(vdetail::from_ks(
            "mixture_exact_gaussian/x=-3",
            ks_one_sample(xs,
                          [&](double v) { return normal_cdf((v - mu) / sd); })));
    }
    return out;
}

// Converse construction: random full-rank feature matrices and PSD targets
// round-trip through recovery within the stated tolerance.
inline std::vector<CheckResult> verify_recovery(std::size_t reps,
                                                const StreamFamily& streams,
                                                int max_dim = 8,
                                                double tol = 1e-10) {
    RandomStream rng = streams.stream(0);
    double worst = 0.0;
    double worst_eig = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const int d_theta =
            1 + static_cast<int>(rng.next_u32() %
                                 static_cast<std::uint32_t>(max_dim));
        const int d_a = 1 + static_cast<int>(
                                rng.next_u32() %
                                static_cast<std::uint32_t>(d_theta));
        Eigen::MatrixXd phi(d_theta, d_a);
        for (int i = 0; i < d_theta; ++i)
            for (int j = 0; j < d_a; ++j) phi(i, j) = rng.next_normal();
        Eigen::MatrixXd a(d_a, d_a);
        for (int i = 0; i < d_a; ++i)
            for (int j = 0; j < d_a; ++j) a(i, j) = rng.next_normal();
        const Eigen::MatrixXd target = a.transpose() * a;
        const Eigen::MatrixXd lam = recover_continuation_cov(phi, target);
        const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
        worst = std::max(worst, (phi.transpose() * lam * phi - target)
                                        .cwiseAbs()
                                        .maxCoeff() /
                                    scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lam);
        worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff() / scale);
    }
    CheckResult c;
    c.name = "recovery_roundtrip";
    c.observed = worst;
    c.bound = tol;
    c.pass = worst <= tol;
    c.detail = std::to_string(reps) + " random shapes, min scaled eigenvalue " +
               vdetail::fmt(worst_eig);
    CheckResult p;
    p.name = "recovery_psd";
    p.observed = -worst_eig;
    p.bound = tol;
    p.pass = -worst_eig <= tol;
    p.detail = "recovered covariances stay PSD";
    return {c, p};
}

// Perturbing an already-mirrored policy with the same covariance equals the
// mirror under the doubled covariance, at the return level.
inline std::vector<CheckResult> verify_composition(
    const ExperimentConfig& cfg, const StreamFamily& streams, int threads = 1) {
    const auto mdp = vdetail::env_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    const auto lam = scalar_constant_cov(cfg.verify.constant_lambda);
    const std::vector<double> thetas{-4.0, -3.0, -2.0, -1.0, -0.5};
    std::vector<CheckResult> out;
    std::uint64_t salt = 5000;
    for (double theta : thetas) {
        const auto once = mirror_policy(k_controller(theta, 0.0, xt), lam);
        const auto doubled =
            mirror_policy(k_controller(theta, 0.0, xt), scaled(lam, 2.0));
        const auto a = estimate_continuation(mdp, once, lam,
                                             cfg.verify.n_rollouts,
                                             streams.derive(salt++), threads);
        const auto b = estimate_return(mdp, doubled, cfg.verify.n_rollouts,
                                       streams.derive(salt++), threads);
        out.push_back(vdetail::from_equality(
            "composition_doubling/theta=" + vdetail::fmt(theta),
            check_equal(a, b, cfg.verify.equality_k)));
    }
    return out;
}

// The two views of the continuation slope: score gradient of the mirror vs
// central differences of the perturbation estimate, plus a one-step problem
// whose gradient is known exactly.
inline std::vector<CheckResult> verify_gradient_equivalence(
    const ExperimentConfig& cfg, const StreamFamily& streams, int threads = 1) {
    const auto mdp = vdetail::env_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    const auto lam = scalar_constant_cov(cfg.verify.constant_lambda);
    const std::vector<double> thetas{-4.0, -3.0, -2.0, -1.0, -0.5};
    std::vector<CheckResult> out;
    std::uint64_t salt = 7000;
    for (double theta : thetas) {
        const auto mirror = mirror_policy(k_controller(theta, 0.0, xt), lam);
        const auto score = score_function_gradient(
            mdp, mirror, cfg.verify.n_rollouts, streams.derive(salt++),
            threads);
        const StochasticObjective obj = [&](const Eigen::VectorXd& th,
                                            const StreamFamily& fam) {
            return continuation_samples(mdp, k_controller(th(0), 0.0, xt), lam,
                                        cfg.verify.n_rollouts, fam, threads);
        };
        const auto fd = finite_difference_gradient(
            obj, Eigen::VectorXd::Constant(1, theta), streams.derive(salt++));
        CheckResult c;
        c.name = "gradient_views/theta=" + vdetail::fmt(theta);
        c.observed = std::abs(score.grad(0) - fd.grad(0));
        c.bound = cfg.verify.equality_k *
                  std::hypot(score.stderr_(0), fd.stderr_(0));
        c.pass = c.observed <= c.bound;
        c.detail = "score=" + vdetail::fmt(score.grad(0)) +
                   " fd=" + vdetail::fmt(fd.grad(0));
        out.push_back(c);
    }

    // One-step problem with J(theta) = theta: the score estimate must bracket
    // the exact slope 1.
    {
        Mdp<double> bandit;
        bandit.horizon = 1;
        bandit.sample_initial = [](RandomStream&) { return 1.0; };
        bandit.sample_next = [](const double& s, const Action&, RandomStream&) {
            return s;
        };
        bandit.reward = [](const double&, const Action& a) { return a(0); };
        GaussianPolicy<double> pol;
        pol.theta = Eigen::VectorXd::Constant(1, 2.0);
        pol.features = [](const double& s) {
            return Eigen::MatrixXd::Constant(1, 1, s);
        };
        pol.cov = [](const History<double>&) {
            return Eigen::MatrixXd::Identity(1, 1);
        };
        const auto g = score_function_gradient(bandit, pol,
                                               cfg.verify.n_rollouts,
                                               streams.derive(salt++), threads);
        CheckResult c;
        c.name = "gradient_exact_bandit";
        c.observed = std::abs(g.grad(0) - 1.0);
        c.bound = cfg.verify.equality_k * g.stderr_(0);
        c.pass = c.observed <= c.bound;
        c.detail = "estimate=" + vdetail::fmt(g.grad(0));
        out.push_back(c);
    }
    return out;
}

inline VerifyReport run_verification(const ExperimentConfig& cfg,
                                     int threads = 1) {
    const StreamFamily root(cfg.seed);
    VerifyReport rep;
    auto add = [&rep](std::vector<CheckResult> cs) {
        for (auto& c : cs) rep.checks.push_back(std::move(c));
    };
    add(verify_return_equalities(cfg, root.derive(fnv1a64("returns")), threads));
    add(verify_mixture_moments(cfg, root.derive(fnv1a64("mixture")), threads));
    add(verify_recovery(100, root.derive(fnv1a64("recovery"))));
    add(verify_composition(cfg, root.derive(fnv1a64("composition")), threads));
    add(verify_gradient_equivalence(cfg, root.derive(fnv1a64("gradients")),
                                    threads));
    return rep;
}

}  // namespace contpol
