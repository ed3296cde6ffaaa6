#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "contpol/continuation.hpp"
#include "contpol/grad.hpp"
#include "contpol/mdp.hpp"
#include "contpol/policy.hpp"

namespace contpol {

// Decreasing sequence of covariance scales; stage i optimizes the mirror under
// scale_i * base_lam.  Strictly decreasing keeps the stage distributions
// ordered (each later smoothing is tighter than every earlier one).
struct Schedule {
    std::vector<double> scales;

    static Schedule geometric(double scale0, double rho, int stages) {
        if (!(scale0 > 0.0) || !(rho > 0.0 && rho < 1.0) || stages < 1)
            throw std::invalid_argument("Schedule::geometric: bad parameters");
        Schedule s;
        s.scales.reserve(static_cast<std::size_t>(stages));
        double v = scale0;
        for (int i = 0; i < stages; ++i) {
            s.scales.push_back(v);
            v *= rho;
        }
        return s;
    }

    static Schedule from_scales(std::vector<double> scales) {
        if (scales.empty())
            throw std::invalid_argument("Schedule::from_scales: empty");
        for (std::size_t i = 0; i < scales.size(); ++i) {
            if (scales[i] < 0.0)
                throw std::invalid_argument("Schedule::from_scales: negative");
            if (i > 0 && !(scales[i] < scales[i - 1]))
                throw std::invalid_argument(
                    "Schedule::from_scales: scales must strictly decrease");
        }
        Schedule s;
        s.scales = std::move(scales);
        return s;
    }
};

struct OptimizerConfig {
    int steps_per_stage = 1;
    double stepsize = 0.05;
    std::size_t n_rollouts = 200;
    double grad_clip = 20.0;   // per-coordinate clamp on the gradient estimate
    int iterations = 200;      // baseline optimizers (no stage structure)
    double entropy_coef0 = 0.0;
    double entropy_decay = 1.0;  // coef_k = coef0 * decay^k
    bool optimize_sigma = true;
    int threads = 1;
    // A stage scale of exactly zero would make the mirror deterministic and
    // the score undefined; scales are floored to this value inside the
    // continuation optimizer (near-deterministic final stages).
    double scale_floor = 1e-6;
};

struct StepRecord {
    int stage = 0;
    int step = 0;
    double scale = 0.0;
    Eigen::VectorXd theta;       // after the update
    double grad_norm = 0.0;
    MeanStderr value;            // mirror-return estimate from the same batch
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double entropy_coef = std::numeric_limits<double>::quiet_NaN();
};

struct RunRecord {
    std::vector<StepRecord> steps;
    Eigen::VectorXd theta_final;
    double sigma_final = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline Eigen::VectorXd clip_coords(Eigen::VectorXd g, double bound) {
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g(i) = std::clamp(g(i), -bound, bound);
    return g;
}

inline void require_finite(const Eigen::VectorXd& theta, const char* who) {
    if (!theta.allFinite())
        throw std::runtime_error(std::string(who) +
                                 ": parameters became non-finite");
}

}  // namespace detail

// Graduated-optimization driver: for each stage, build the closed-form mirror of the
// deterministic original under the stage covariance and run a few steps of
// stochastic gradient ascent on the mirror's return, warm-starting each stage
// at the previous parameters.
template <class State>
RunRecord optimize_by_continuation(const Mdp<State>& mdp,
                                   const GaussianPolicy<State>& original,
                                   const CovarianceFn<State>& base_lam,
                                   const Schedule& schedule,
                                   const OptimizerConfig& cfg,
                                   const StreamFamily& streams) {
    if (!original.deterministic())
        throw std::invalid_argument(
            "optimize_by_continuation: original policy must be deterministic");
    if (cfg.steps_per_stage < 1 || !(cfg.stepsize >= 0.0))
        throw std::invalid_argument("optimize_by_continuation: bad config");
    RunRecord rec;
    Eigen::VectorXd theta = original.theta;
    std::uint64_t salt = 0;
    for (std::size_t i = 0; i < schedule.scales.size(); ++i) {
        const double scale = std::max(schedule.scales[i], cfg.scale_floor);
        const CovarianceFn<State> lam_i = scaled(base_lam, scale);
        for (int k = 0; k < cfg.steps_per_stage; ++k) {
            const GaussianPolicy<State> mirror =
                mirror_policy(original.with_theta(theta), lam_i);
            GradientEstimate g = score_function_gradient(
                mdp, mirror, cfg.n_rollouts, streams.derive(salt++),
                cfg.threads);
            const Eigen::VectorXd step =
                detail::clip_coords(g.grad, cfg.grad_clip);
            theta += cfg.stepsize * step;
            detail::require_finite(theta, "optimize_by_continuation");
            StepRecord r;
            r.stage = static_cast<int>(i);
            r.step = k;
            r.scale = schedule.scales[i];
            r.theta = theta;
            r.grad_norm = g.grad.norm();
            r.value = g.value;
            rec.steps.push_back(std::move(r));
        }
    }
    rec.theta_final = theta;
    return rec;
}

// Direct ascent on the deterministic policy's return via central finite
// differences with common random numbers; the local baseline that gets stuck.
template <class State>
RunRecord deterministic_ascent_baseline(const Mdp<State>& mdp,
                                        const GaussianPolicy<State>& policy,
                                        const OptimizerConfig& cfg,
                                        const StreamFamily& streams) {
    if (!policy.deterministic())
        throw std::invalid_argument(
            "deterministic_ascent_baseline: policy must be deterministic");
    RunRecord rec;
    Eigen::VectorXd theta = policy.theta;
    std::uint64_t salt = 0;
    for (int k = 0; k < cfg.iterations; ++k) {
        const StreamFamily fam = streams.derive(salt++);
        StochasticObjective obj = [&](const Eigen::VectorXd& th,
                                      const StreamFamily& f) {
            return return_samples(mdp, policy.with_theta(th), cfg.n_rollouts, f,
                                  cfg.threads);
        };
        GradientEstimate g = finite_difference_gradient(obj, theta, fam);
        theta += cfg.stepsize * detail::clip_coords(g.grad, cfg.grad_clip);
        detail::require_finite(theta, "deterministic_ascent_baseline");
        StepRecord r;
        r.stage = k;
        r.step = 0;
        r.scale = 0.0;
        r.theta = theta;
        r.grad_norm = g.grad.norm();
        r.value = estimate_return(mdp, policy.with_theta(theta),
                                  cfg.n_rollouts, streams.derive(salt++),
                                  cfg.threads);
        rec.steps.push_back(std::move(r));
    }
    rec.theta_final = theta;
    return rec;
}

namespace detail {

// Joint score rollout for the scalar-action Gaussian policy with constant
// sigma: returns (score wrt theta, score wrt log sigma, discounted return).
// Draw order matches score_and_return so coef = 0 runs reproduce plain
// score-function ascent bit for bit under the same streams.
struct JointScoreSample {
    Eigen::VectorXd score_theta;
    double score_logsigma = 0.0;
    double g = 0.0;
};

template <class State, class FeaturesFn>
JointScoreSample joint_score_and_return(const Mdp<State>& mdp,
                                        const FeaturesFn& features,
                                        const Eigen::VectorXd& theta,
                                        double sigma, RandomStream rng) {
    JointScoreSample out;
    out.score_theta = Eigen::VectorXd::Zero(theta.size());
    double w = 1.0;
    State s = mdp.sample_initial(rng);
    for (int t = 0; t < mdp.horizon; ++t) {
        const Eigen::MatrixXd phi = features(s);
        const Eigen::VectorXd mu = phi.transpose() * theta;
        const double z = rng.next_normal();
        const Action a = mu + Eigen::VectorXd::Constant(1, sigma * z);
        out.score_theta += phi.col(0) * (z / sigma);
        out.score_logsigma += z * z - 1.0;
        out.g += w * mdp.reward(s, a);
        w *= mdp.discount;
        s = mdp.sample_next(s, a, rng);
    }
    return out;
}

}  // namespace detail

// Stochastic ascent on return + coef * policy entropy over the joint
// parameters (theta, log sigma) of a scalar-action Gaussian policy with
// constant sigma.  The entropy term contributes its exact gradient: the
// differential entropy log(sigma sqrt(2 pi e)) has derivative 1 in log sigma
// and 0 in theta.
template <class State, class FeaturesFn>
RunRecord entropy_regularized_ascent(const Mdp<State>& mdp,
                                     const FeaturesFn& features,
                                     Eigen::VectorXd theta0, double sigma0,
                                     const OptimizerConfig& cfg,
                                     const StreamFamily& streams) {
    if (!(sigma0 > 0.0))
        throw std::invalid_argument("entropy_regularized_ascent: sigma0 <= 0");
    if (!(cfg.entropy_decay > 0.0 && cfg.entropy_decay <= 1.0))
        throw std::invalid_argument(
            "entropy_regularized_ascent: decay must be in (0, 1]");
    RunRecord rec;
    Eigen::VectorXd theta = std::move(theta0);
    double log_sigma = std::log(sigma0);
    double coef = cfg.entropy_coef0;
    const std::size_t n = cfg.n_rollouts;
    if (n < 2)
        throw std::invalid_argument("entropy_regularized_ascent: n_rollouts < 2");
    for (int k = 0; k < cfg.iterations; ++k) {
        const StreamFamily fam = streams.derive(static_cast<std::uint64_t>(k));
        const double sigma = std::exp(log_sigma);
        std::vector<Eigen::VectorXd> sth(n);
        std::vector<double> sls(n), gs(n);
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            auto smp = detail::joint_score_and_return(
                mdp, features, theta, sigma, fam.stream(i));
            sth[i] = std::move(smp.score_theta);
            sls[i] = smp.score_logsigma;
            gs[i] = smp.g;
        });
        double b = 0.0;
        for (double g : gs) b += g;
        b /= static_cast<double>(n);
        Eigen::VectorXd gt = Eigen::VectorXd::Zero(theta.size());
        double gls = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            gt += sth[i] * (gs[i] - b);
            gls += sls[i] * (gs[i] - b);
        }
        gt /= static_cast<double>(n);
        gls = gls / static_cast<double>(n) + coef;  // exact entropy gradient
        theta += cfg.stepsize * detail::clip_coords(gt, cfg.grad_clip);
        if (cfg.optimize_sigma)
            log_sigma +=
                cfg.stepsize * std::clamp(gls, -cfg.grad_clip, cfg.grad_clip);
        detail::require_finite(theta, "entropy_regularized_ascent");
        if (!std::isfinite(log_sigma))
            throw std::runtime_error(
                "entropy_regularized_ascent: sigma became non-finite");
        StepRecord r;
        r.stage = k;
        r.step = 0;
        r.scale = 0.0;
        r.theta = theta;
        r.grad_norm = gt.norm();
        r.value = mean_stderr(gs);
        r.sigma = std::exp(log_sigma);
        r.entropy_coef = coef;
        rec.steps.push_back(std::move(r));
        coef *= cfg.entropy_decay;
    }
    rec.theta_final = theta;
    rec.sigma_final = std::exp(log_sigma);
    return rec;
}

}  // namespace contpol
