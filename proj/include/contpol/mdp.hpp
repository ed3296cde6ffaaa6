#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "contpol/parallel.hpp"
#include "contpol/rng.hpp"
#include "contpol/stats.hpp"

namespace contpol {

using Action = Eigen::VectorXd;

// Prefix of an episode as seen by a policy when choosing action t: states
// s_0..s_t and actions a_0..a_{t-1}.
template <class State>
struct History {
    std::vector<State> states;
    std::vector<Action> actions;

    int t() const { return static_cast<int>(actions.size()); }
    const State& last() const { return states.back(); }
};

template <class State>
struct Trajectory {
    std::vector<State> states;   // length horizon + 1
    std::vector<Action> actions; // length horizon
    std::vector<double> rewards; // length horizon
};

// Finite-horizon MDP with sampling access to the initial distribution and the
// transition kernel.
template <class State>
struct Mdp {
    std::function<State(RandomStream&)> sample_initial;
    std::function<State(const State&, const Action&, RandomStream&)> sample_next;
    std::function<double(const State&, const Action&)> reward;
    double discount = 0.99;
    int horizon = 100;
};

// A Policy is anything with sample(const History<State>&, RandomStream&).
template <class State, class Policy>
Trajectory<State> rollout(const Mdp<State>& mdp, const Policy& policy,
                          RandomStream rng) {
    if (mdp.horizon <= 0) throw std::invalid_argument("rollout: horizon <= 0");
    Trajectory<State> traj;
    traj.states.reserve(static_cast<std::size_t>(mdp.horizon) + 1);
    traj.actions.reserve(static_cast<std::size_t>(mdp.horizon));
    traj.rewards.reserve(static_cast<std::size_t>(mdp.horizon));
    History<State> h;
    h.states.reserve(traj.states.capacity());
    h.actions.reserve(traj.actions.capacity());
    State s = mdp.sample_initial(rng);
    traj.states.push_back(s);
    h.states.push_back(s);
    for (int t = 0; t < mdp.horizon; ++t) {
        const Action a = policy.sample(h, rng);
        traj.actions.push_back(a);
        traj.rewards.push_back(mdp.reward(s, a));
        s = mdp.sample_next(s, a, rng);
        traj.states.push_back(s);
        h.actions.push_back(a);
        h.states.push_back(s);
    }
    return traj;
}

template <class State>
double discounted_return(const Trajectory<State>& traj, double discount) {
    if (discount < 0.0 || discount >= 1.0)
        throw std::invalid_argument("discounted_return: need 0 <= discount < 1");
    double g = 0.0;
    double w = 1.0;
    for (double r : traj.rewards) {
        g += w * r;
        w *= discount;
    }
    return g;
}

// Monte-Carlo return samples; sample i uses streams.stream(i), so the vector
// is a pure function of (mdp, policy, streams) regardless of thread count.
template <class State, class Policy>
std::vector<double> return_samples(const Mdp<State>& mdp, const Policy& policy,
                                   std::size_t n, const StreamFamily& streams,
                                   int threads = 1) {
    std::vector<double> gs(n);
    parallel_for(n, threads, [&](std::size_t i) {
        gs[i] = discounted_return(rollout(mdp, policy, streams.stream(i)),
                                  mdp.discount);
    });
    return gs;
}

template <class State, class Policy>
MeanStderr estimate_return(const Mdp<State>& mdp, const Policy& policy,
                           std::size_t n, const StreamFamily& streams,
                           int threads = 1) {
    return mean_stderr(return_samples(mdp, policy, n, streams, threads));
}

}  // namespace contpol
