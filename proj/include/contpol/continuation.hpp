#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "contpol/gaussian.hpp"
#include "contpol/hillcar.hpp"
#include "contpol/mdp.hpp"
#include "contpol/policy.hpp"

namespace contpol {

// Continuation covariance Lambda(h): a PSD dTheta x dTheta matrix per history.
// state_only records that the value depends on the history only through its
// last state, the hypothesis under which Markov mirrors exist.
template <class State>
struct CovarianceFn {
    std::function<Eigen::MatrixXd(const History<State>&)> lam;
    bool state_only = false;

    Eigen::MatrixXd operator()(const History<State>& h) const { return lam(h); }
};

template <class State>
CovarianceFn<State> scaled(const CovarianceFn<State>& base, double factor) {
    if (factor < 0.0) throw std::invalid_argument("scaled: negative factor");
    CovarianceFn<State> out;
    out.state_only = base.state_only;
    auto inner = base.lam;
    out.lam = [inner, factor](const History<State>& h) {
        return (factor * inner(h)).eval();
    };
    return out;
}

template <class State>
CovarianceFn<State> constant_cov(const Eigen::MatrixXd& lam0) {
    CovarianceFn<State> out;
    out.state_only = true;
    out.lam = [lam0](const History<State>&) { return lam0; };
    return out;
}

// Scalar-parameter variants for the position controller (dTheta = 1):
//
// constant:      lambda(h) = lambda0
// state_radial:  lambda(x) = sigma_ref^2 / ((x - x_target)^2 + eps); since the
//                controller features are phi(x) = x - x_target this makes the
//                induced action noise phi^2 lambda ~= sigma_ref^2, i.e. a
//                near-constant sigma' as in the return-landscape figures
// time_decay:    lambda(t) = lambda0 exp(-beta t), a genuinely
//                history-dependent covariance (depends on the step index)
inline CovarianceFn<CarState> scalar_constant_cov(double lambda0) {
    return constant_cov<CarState>(Eigen::MatrixXd::Constant(1, 1, lambda0));
}

inline CovarianceFn<CarState> state_radial_cov(double sigma_ref, double x_target,
                                               double eps = 1e-6) {
    CovarianceFn<CarState> out;
    out.state_only = true;
    const double s2 = sigma_ref * sigma_ref;
    out.lam = [s2, x_target, eps](const History<CarState>& h) {
        const double d = h.last().x - x_target;
        return Eigen::MatrixXd::Constant(1, 1, s2 / (d * d + eps));
    };
    return out;
}

inline CovarianceFn<CarState> time_decay_cov(double lambda0, double beta) {
    CovarianceFn<CarState> out;
    out.state_only = false;
    out.lam = [lambda0, beta](const History<CarState>& h) {
        return Eigen::MatrixXd::Constant(1, 1,
                                         lambda0 * std::exp(-beta * h.t()));
    };
    return out;
}

// Per-timestep parameter perturbation: at every step draw theta_t ~
// N(theta, Lambda(h_t)) and act with the original policy at theta_t.  The
// expectation of the resulting return over all draws is the continuation of
// the return.  A Lambda that is exactly zero draws nothing, so the rollout is
// bit-identical to the unperturbed policy's under the same stream.
template <class State>
struct PerturbedPolicy {
    GaussianPolicy<State> original;
    CovarianceFn<State> lam;

    Action sample(const History<State>& h, RandomStream& rng) const {
        const Eigen::VectorXd theta_t =
            sample_gaussian(original.theta, lam(h), rng);
        return original.sample_with(theta_t, h, rng);
    }
};

template <class State>
std::vector<double> continuation_samples(const Mdp<State>& mdp,
                                         const GaussianPolicy<State>& original,
                                         const CovarianceFn<State>& lam,
                                         std::size_t n,
                                         const StreamFamily& streams,
                                         int threads = 1) {
    PerturbedPolicy<State> p{original, lam};
    return return_samples(mdp, p, n, streams, threads);
}

template <class State>
MeanStderr estimate_continuation(const Mdp<State>& mdp,
                                 const GaussianPolicy<State>& original,
                                 const CovarianceFn<State>& lam, std::size_t n,
                                 const StreamFamily& streams, int threads = 1) {
    return mean_stderr(
        continuation_samples(mdp, original, lam, n, streams, threads));
}

// Closed-form Gaussian mirror: the continuation of the return of an affine
// policy with theta-independent noise Sigma equals the plain return of
//   a ~ N(phi(s)^T theta, Sigma(h) + phi(s)^T Lambda(h) phi(s)).
// With Sigma = 0 this is the deterministic-original case; applying it twice
// with the same Lambda doubles the added term (Gaussian composition).
template <class State>
GaussianPolicy<State> mirror_policy(const GaussianPolicy<State>& original,
                                    const CovarianceFn<State>& lam) {
    GaussianPolicy<State> m;
    m.theta = original.theta;
    m.features = original.features;
    auto feats = original.features;
    auto base_cov = original.cov;  // may be empty
    auto lam_fn = lam.lam;
    m.cov = [feats, base_cov, lam_fn](const History<State>& h) {
        const Eigen::MatrixXd phi = feats(h.last());
        Eigen::MatrixXd c = phi.transpose() * lam_fn(h) * phi;
        if (base_cov) c += base_cov(h);
        return c;
    };
    return m;
}

// The generic mixture mirror: eta'(a|h) = E_{theta' ~
// N(theta, Lambda(h))} [eta_{theta'}(a|h)].  Sampling it is exactly the
// per-step perturbation above, exposed as a policy for distribution-level
// tests (it equals the closed-form mirror when the closed form applies).
template <class State>
PerturbedPolicy<State> mixture_mirror(const GaussianPolicy<State>& original,
                                      const CovarianceFn<State>& lam) {
    return PerturbedPolicy<State>{original, lam};
}

// Draw m actions from a policy at one fixed history.
template <class State, class Policy>
std::vector<Action> action_samples(const Policy& policy,
                                   const History<State>& h, std::size_t m,
                                   const StreamFamily& streams,
                                   int threads = 1) {
    std::vector<Action> out(m);
    parallel_for(m, threads, [&](std::size_t i) {
        RandomStream rng = streams.stream(i);
        out[i] = policy.sample(h, rng);
    });
    return out;
}

// Recover a continuation covariance from a target mirror covariance
// (converse direction): given full-column-rank phi (dTheta x dA, rank dA) and
// PSD Sigma', Lambda = phi G^-1 Sigma' G^-1 phi^T with G = phi^T phi satisfies
// phi^T Lambda phi = Sigma' exactly.  Requires dA <= dTheta.  Computed via
// the SVD pseudoinverse phi G^-1 = (phi^+)^T, which conditions like kappa(phi)
// rather than kappa(phi)^2.
inline Eigen::MatrixXd recover_continuation_cov(const Eigen::MatrixXd& phi,
                                                const Eigen::MatrixXd& sigma_prime,
                                                double rank_tol = 1e-10) {
    const Eigen::Index d_theta = phi.rows();
    const Eigen::Index d_a = phi.cols();
    if (d_a > d_theta)
        throw std::invalid_argument(
            "recover_continuation_cov: action dimension exceeds parameter "
            "dimension");
    if (sigma_prime.rows() != d_a || sigma_prime.cols() != d_a)
        throw std::invalid_argument("recover_continuation_cov: shape mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(d_a - 1) <=
        rank_tol * std::max(1.0, svd.singularValues()(0)))
        throw std::invalid_argument(
            "recover_continuation_cov: feature matrix is rank deficient");
    const Eigen::MatrixXd proj =
        svd.matrixU() *
        svd.singularValues().cwiseInverse().asDiagonal() *
        svd.matrixV().transpose();  // phi G^-1
    return proj * sigma_prime * proj.transpose();
}

}  // namespace contpol
