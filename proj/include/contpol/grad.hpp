#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "contpol/mdp.hpp"
#include "contpol/policy.hpp"

namespace contpol {

struct GradientEstimate {
    Eigen::VectorXd grad;
    Eigen::VectorXd stderr_;
    std::size_t n = 0;
    MeanStderr value;  // return estimate of the same batch (score estimator)
};

namespace detail {

// Accumulated score sum_t d/dtheta log pi(a_t|h_t) for one rollout, plus the
// rollout's discounted return.  For the affine Gaussian policy the per-step
// score is phi(s) Sigma^-1 (a - mu).  A step whose covariance is singular
// contributes zero: in the vanishing-noise limit the action carries no
// information about theta beyond the mean it equals.
template <class State>
std::pair<Eigen::VectorXd, double> score_and_return(
    const Mdp<State>& mdp, const GaussianPolicy<State>& pol, RandomStream rng) {
    if (pol.deterministic())
        throw std::logic_error(
            "score_function_gradient: deterministic policy has no score");
    Eigen::VectorXd score = Eigen::VectorXd::Zero(pol.theta.size());
    double g = 0.0;
    double w = 1.0;
    History<State> h;
    State s = mdp.sample_initial(rng);
    h.states.push_back(s);
    for (int t = 0; t < mdp.horizon; ++t) {
        const Eigen::MatrixXd phi = pol.features(s);
        const Eigen::VectorXd mu = phi.transpose() * pol.theta;
        const Eigen::MatrixXd cov = pol.cov(h);
        Action a;
        if (cov.isZero(0.0)) {
            a = mu;
        } else if (cov.rows() == 1) {
            const double sd = std::sqrt(cov(0, 0));
            const double z = rng.next_normal();
            a = mu + Eigen::VectorXd::Constant(1, sd * z);
            score += phi.col(0) * (z / sd);
        } else {
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument(
                    "score_function_gradient: covariance not positive definite");
            Eigen::VectorXd z(cov.rows());
            for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.next_normal();
            a = mu + llt.matrixL() * z;
            score += phi * llt.solve(a - mu);
        }
        g += w * mdp.reward(s, a);
        w *= mdp.discount;
        s = mdp.sample_next(s, a, rng);
        h.actions.push_back(a);
        h.states.push_back(s);
    }
    return {score, g};
}

}  // namespace detail

// REINFORCE estimate of d/dtheta of the policy's return.  baseline: empty ->
// empirical mean return of the batch (default variance reduction); a value ->
// that constant.  Per-coordinate standard errors come from the spread of the
// per-rollout gradient samples.
template <class State>
GradientEstimate score_function_gradient(
    const Mdp<State>& mdp, const GaussianPolicy<State>& pol, std::size_t n,
    const StreamFamily& streams, int threads = 1,
    std::optional<double> baseline = std::nullopt) {
    if (n < 2) throw std::invalid_argument("score_function_gradient: n < 2");
    const Eigen::Index d = pol.theta.size();
    std::vector<Eigen::VectorXd> scores(n);
    std::vector<double> returns(n);
    parallel_for(n, threads, [&](std::size_t i) {
        auto [sc, g] = detail::score_and_return(mdp, pol, streams.stream(i));
        scores[i] = std::move(sc);
        returns[i] = g;
    });
    GradientEstimate est;
    est.value = mean_stderr(returns);
    const double b = baseline ? *baseline : est.value.mean;
    est.n = n;
    est.grad = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < n; ++i)
        est.grad += scores[i] * (returns[i] - b);
    est.grad /= static_cast<double>(n);
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd dev = scores[i] * (returns[i] - b) - est.grad;
        ss += dev.cwiseProduct(dev);
    }
    est.stderr_ =
        (ss / static_cast<double>((n - 1) * n)).cwiseSqrt();
    return est;
}

// A stochastic objective: per-sample values at parameters theta, drawn with
// the given stream family.  Calling it twice with the same family yields the
// same sample-to-sample pairing, the common-random-numbers property the
// finite-difference estimator relies on.
using StochasticObjective =
    std::function<std::vector<double>(const Eigen::VectorXd&, const StreamFamily&)>;

// Central finite differences with common random numbers.  Per coordinate j the
// paired differences d_i = (f_i(theta + eps_j e_j) - f_i(theta - eps_j e_j)) /
// (2 eps_j) give the estimate and its (paired) standard error.
inline GradientEstimate finite_difference_gradient(
    const StochasticObjective& objective, const Eigen::VectorXd& theta,
    const Eigen::VectorXd& eps, const StreamFamily& streams) {
    const Eigen::Index d = theta.size();
    if (eps.size() != d)
        throw std::invalid_argument("finite_difference_gradient: eps size");
    if ((eps.array() <= 0.0).any())
        throw std::invalid_argument("finite_difference_gradient: eps <= 0");
    GradientEstimate est;
    est.grad = Eigen::VectorXd::Zero(d);
    est.stderr_ = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(j) += eps(j);
        tm(j) -= eps(j);
        const std::vector<double> up = objective(tp, streams);
        const std::vector<double> dn = objective(tm, streams);
        if (up.size() != dn.size() || up.empty())
            throw std::invalid_argument(
                "finite_difference_gradient: objective sample sizes differ");
        std::vector<double> diff(up.size());
        for (std::size_t i = 0; i < up.size(); ++i)
            diff[i] = (up[i] - dn[i]) / (2.0 * eps(j));
        const MeanStderr ms = mean_stderr(diff);
        est.grad(j) = ms.mean;
        est.stderr_(j) = ms.stderr_;
        est.n = ms.n;
    }
    return est;
}

// Default step rule: eps_j = 1e-3 (|theta_j| + 1).
inline Eigen::VectorXd fd_default_eps(const Eigen::VectorXd& theta) {
    return 1e-3 * (theta.cwiseAbs().array() + 1.0).matrix();
}

inline GradientEstimate finite_difference_gradient(
    const StochasticObjective& objective, const Eigen::VectorXd& theta,
    const StreamFamily& streams) {
    return finite_difference_gradient(objective, theta, fd_default_eps(theta),
                                      streams);
}

}  // namespace contpol
