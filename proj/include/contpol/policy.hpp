#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <utility>

#include "contpol/gaussian.hpp"
#include "contpol/hillcar.hpp"
#include "contpol/mdp.hpp"

namespace contpol {

// Affine-mean policy a ~ N(phi(s)^T theta, Sigma(h)).  One type covers the
// whole family used here:
//   - cov == nullptr        : deterministic policy a = phi(s)^T theta
//   - cov depends on last() : Markov Gaussian policy
//   - cov reads h.t()       : history-dependent covariance (time-indexed)
// The noise covariance never depends on theta, which is what makes the
// Gaussian mirror constructions exact rather than first-order.
template <class State>
struct GaussianPolicy {
    using Features = std::function<Eigen::MatrixXd(const State&)>;  // dTheta x dA
    using CovFn = std::function<Eigen::MatrixXd(const History<State>&)>;  // dA x dA

    Eigen::VectorXd theta;
    Features features;
    CovFn cov;  // empty -> deterministic

    bool deterministic() const { return !cov; }

    Eigen::VectorXd mean(const State& s) const {
        return features(s).transpose() * theta;
    }

    Action sample(const History<State>& h, RandomStream& rng) const {
        return sample_with(theta, h, rng);
    }

    // Same policy evaluated at substitute parameters; used by per-timestep
    // parameter perturbation, which re-draws the parameter vector each step.
    Action sample_with(const Eigen::VectorXd& th, const History<State>& h,
                       RandomStream& rng) const {
        const Eigen::VectorXd mu = features(h.last()).transpose() * th;
        if (!cov) return mu;
        return sample_gaussian(mu, cov(h), rng);
    }

    double log_density(const History<State>& h, const Action& a) const {
        if (!cov)
            throw std::logic_error(
                "log_density: deterministic policy has no density");
        return gaussian_logpdf(a, mean(h.last()), cov(h));
    }

    GaussianPolicy with_theta(Eigen::VectorXd th) const {
        GaussianPolicy p = *this;
        p.theta = std::move(th);
        return p;
    }
};

// Proportional controller of the car position error: mu_theta(x) =
// theta (x - x_target).  sigma_prime = 0 gives the deterministic controller,
// sigma_prime > 0 the Gaussian controller N(mu_theta(x), sigma_prime^2).
inline GaussianPolicy<CarState> k_controller(double theta, double sigma_prime,
                                             double x_target) {
    GaussianPolicy<CarState> p;
    p.theta = Eigen::VectorXd::Constant(1, theta);
    p.features = [x_target](const CarState& s) {
        return Eigen::MatrixXd::Constant(1, 1, s.x - x_target);
    };
    if (sigma_prime > 0.0) {
        const double var = sigma_prime * sigma_prime;
        p.cov = [var](const History<CarState>&) {
            return Eigen::MatrixXd::Constant(1, 1, var);
        };
    }
    return p;
}

}  // namespace contpol
