#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "contpol/mdp.hpp"
#include "contpol/rng.hpp"

namespace contpol {

struct CarState {
    double x = 0.0;
    double v = 0.0;
};

// Valley shape: a polynomial h with analytic first and second derivatives.
// Construction validates the required topology on [x_min, x_max]: exactly two
// strict local minima separated by exactly one strict local maximum, with the
// global minimum (x_target) on the right of the peak.
class HillProfile {
  public:
    // coeffs are ascending: h(x) = sum_i coeffs[i] x^i.
    HillProfile(std::vector<double> coeffs, double x_min, double x_max)
        : c_(std::move(coeffs)), x_min_(x_min), x_max_(x_max) {
        if (c_.size() < 3)
            throw std::invalid_argument("HillProfile: polynomial degree too low");
        cp_ = differentiate(c_);
        cpp_ = differentiate(cp_);
        validate_topology();
    }

    // h(x) = 0.04 (x+3)^2 (x-2)^2 - 0.25 x: two floors at x ~ -2.864 and
    // x ~ 2.117 (global), one peak at x ~ -0.753.  Steep enough that the
    // unit-variance action noise cannot push the car across the barrier on
    // its own, asymmetric enough that crossing beats staying.
    static HillProfile default_profile() {
        return HillProfile({1.44, -0.73, -0.44, 0.08, 0.04}, -4.0, 5.0);
    }

    double h(double x) const { return horner(c_, x); }
    double dh(double x) const { return horner(cp_, x); }
    double ddh(double x) const { return horner(cpp_, x); }

    double x_target() const { return x_target_; }
    double x_left_min() const { return x_left_min_; }
    double x_peak() const { return x_peak_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    const std::vector<double>& coefficients() const { return c_; }

  private:
    static std::vector<double> differentiate(const std::vector<double>& c) {
        std::vector<double> d;
        d.reserve(c.size() > 1 ? c.size() - 1 : 1);
        for (std::size_t i = 1; i < c.size(); ++i)
            d.push_back(static_cast<double>(i) * c[i]);
        if (d.empty()) d.push_back(0.0);
        return d;
    }

    static double horner(const std::vector<double>& c, double x) {
        double y = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) y = y * x + c[i];
        return y;
    }

    double refine_root(double lo, double hi) const {
        // Bisection on dh; lo and hi bracket a sign change.
        double flo = dh(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = dh(mid);
            if (fm == 0.0) return mid;
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-13 * std::max(1.0, std::abs(lo))) break;
        }
        return 0.5 * (lo + hi);
    }

    void validate_topology() {
        constexpr int kGrid = 4096;
        std::vector<double> roots;
        double prev_x = x_min_;
        double prev_f = dh(prev_x);
        for (int i = 1; i <= kGrid; ++i) {
            const double x =
                x_min_ + (x_max_ - x_min_) * static_cast<double>(i) / kGrid;
            const double f = dh(x);
            if ((prev_f < 0.0) != (f < 0.0)) roots.push_back(refine_root(prev_x, x));
            prev_x = x;
            prev_f = f;
        }
        std::vector<double> minima, maxima;
        for (double r : roots) {
            if (ddh(r) > 0.0)
                minima.push_back(r);
            else if (ddh(r) < 0.0)
                maxima.push_back(r);
        }
        if (minima.size() != 2 || maxima.size() != 1)
            throw std::invalid_argument(
                "HillProfile: valley must have exactly two strict minima and one "
                "strict maximum on the position range");
        if (!(minima[0] < maxima[0] && maxima[0] < minima[1]))
            throw std::invalid_argument("HillProfile: peak must separate the floors");
        if (!(h(minima[1]) < h(minima[0])) || !(minima[1] > 0.0))
            throw std::invalid_argument(
                "HillProfile: global minimum must be the right floor at x > 0");
        x_left_min_ = minima[0];
        x_peak_ = maxima[0];
        x_target_ = minima[1];
    }

    std::vector<double> c_, cp_, cpp_;
    double x_min_, x_max_;
    double x_left_min_ = 0.0, x_peak_ = 0.0, x_target_ = 0.0;
};

struct CarParams {
    double mass = 0.5;
    double gravity = 9.81;
    double damping = 0.65;
    double dt = 0.1;
    double a_min = -10.0;
    double a_max = 10.0;
    double x_min = -4.0;
    double x_max = 5.0;
    double noise_std = 1.0;
    int euler_substeps = 10;
    double x_initial = -3.0;
};

// Mechanical energy per unit mass for the horizontal-velocity state:
// E = v^2 (1 + h'^2) / 2 + g h.  Without force and damping the continuous
// dynamics conserve E, which pins down the Euler convergence test.
inline double track_energy(const CarState& s, const CarParams& p,
                           const HillProfile& profile) {
    const double d1 = profile.dh(s.x);
    return 0.5 * s.v * s.v * (1.0 + d1 * d1) + p.gravity * profile.h(s.x);
}

// One environment step: additive N(0, noise_std^2) on the action, clamp to the
// force range, then euler_substeps explicit-Euler updates with the clamped
// force held constant.  Position is clamped each substep; velocity is left
// unchanged by the clamp.
inline CarState step(const CarState& s, double action, const CarParams& p,
                     const HillProfile& profile, RandomStream& rng) {
    if (p.euler_substeps < 1)
        throw std::invalid_argument("step: euler_substeps must be >= 1");
    double f = action;
    if (p.noise_std > 0.0) f += p.noise_std * rng.next_normal();
    f = std::clamp(f, p.a_min, p.a_max);
    double x = s.x;
    double v = s.v;
    const double dt = p.dt / static_cast<double>(p.euler_substeps);
    for (int k = 0; k < p.euler_substeps; ++k) {
        const double d1 = profile.dh(x);
        const double d2 = profile.ddh(x);
        const double s2 = 1.0 + d1 * d1;
        const double vdot = f / (p.mass * s2) - p.gravity * d1 / s2 -
                            v * v * d1 * d2 / s2 -
                            p.damping * v * std::abs(v);
        x = std::clamp(x + dt * v, p.x_min, p.x_max);
        v += dt * vdot;
    }
    return {x, v};
}

// MDP wrapper: start at (x_initial, 0), reward -h(x_t), scalar action.
inline Mdp<CarState> make_hillcar_mdp(const CarParams& params,
                                      const HillProfile& profile,
                                      double discount = 0.99,
                                      int horizon = 100) {
    Mdp<CarState> mdp;
    mdp.discount = discount;
    mdp.horizon = horizon;
    mdp.sample_initial = [params](RandomStream&) {
        return CarState{params.x_initial, 0.0};
    };
    mdp.sample_next = [params, profile](const CarState& s, const Action& a,
                                        RandomStream& rng) {
        return step(s, a(0), params, profile, rng);
    };
    mdp.reward = [profile](const CarState& s, const Action&) {
        return -profile.h(s.x);
    };
    return mdp;
}

}  // namespace contpol
