#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "contpol/hillcar.hpp"
#include "contpol/mdp.hpp"
#include "contpol/policy.hpp"

namespace contpol {

// Evenly spaced grid lo, lo+pitch, ..., hi (inclusive up to rounding).
inline std::vector<double> theta_grid(double lo, double hi, double pitch) {
    if (!(pitch > 0.0) || !(hi > lo))
        throw std::invalid_argument("theta_grid: bad range");
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(
        std::floor((hi - lo) / pitch + 0.5) + 1);
    g.reserve(count);
    for (std::size_t i = 0; i < count; ++i) g.push_back(lo + pitch * static_cast<double>(i));
    return g;
}

struct CurvePoint {
    double theta = 0.0;
    double sigma_prime = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Return of the Gaussian position controller N(theta (x - x_target),
// sigma_prime^2) over a theta grid.  Every point reuses the same stream
// family, so the noise realizations are common across theta and sigma_prime
// and curve shapes (and extrema counts) are stable.
inline std::vector<CurvePoint> return_curve(const Mdp<CarState>& mdp,
                                            double x_target,
                                            const std::vector<double>& thetas,
                                            double sigma_prime, std::size_t n,
                                            const StreamFamily& streams,
                                            int threads = 1) {
    std::vector<CurvePoint> out;
    out.reserve(thetas.size());
    for (double th : thetas) {
        const auto pol = k_controller(th, sigma_prime, x_target);
        const MeanStderr ms = estimate_return(mdp, pol, n, streams, threads);
        out.push_back({th, sigma_prime, ms.mean, ms.stderr_, ms.n});
    }
    return out;
}

// Strict local maxima with a +-window comparison: index i qualifies iff its
// value strictly exceeds every other value within `window` grid points on each
// side.  Boundary points use their one-sided window.  The window absorbs
// Monte-Carlo wiggle that a bare three-point test would count as extra maxima.
inline std::vector<std::size_t> windowed_maxima(const std::vector<double>& values,
                                                std::size_t window) {
    if (window < 1) throw std::invalid_argument("windowed_maxima: window < 1");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t lo = i >= window ? i - window : 0;
        const std::size_t hi = std::min(values.size() - 1, i + window);
        bool best = true;
        for (std::size_t j = lo; j <= hi && best; ++j)
            if (j != i && !(values[i] > values[j])) best = false;
        if (best) idx.push_back(i);
    }
    return idx;
}

// Window that spans +-0.6 in theta at any grid pitch.
inline std::size_t maxima_window(double pitch) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(0.6 / pitch)));
}

// Dense sigma' = 0 landscape used as the ground truth for basin membership.
// The basin of a parameter value is the nearest strict local maximum of the
// deterministic-return curve; "global" means that maximum is the curve's
// argmax.
class BasinOracle {
  public:
    static BasinOracle build(const Mdp<CarState>& mdp, double x_target,
                             double lo, double hi, double pitch, std::size_t n,
                             const StreamFamily& streams, int threads = 1) {
        BasinOracle o;
        o.thetas_ = theta_grid(lo, hi, pitch);
        o.values_.reserve(o.thetas_.size());
        for (const CurvePoint& p :
             return_curve(mdp, x_target, o.thetas_, 0.0, n, streams, threads))
            o.values_.push_back(p.mean);
        o.maxima_ = windowed_maxima(o.values_, maxima_window(pitch));
        if (o.maxima_.empty())
            throw std::runtime_error("BasinOracle: no local maxima found");
        o.argmax_ = static_cast<std::size_t>(
            std::max_element(o.values_.begin(), o.values_.end()) -
            o.values_.begin());
        return o;
    }

    const std::vector<double>& thetas() const { return thetas_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::size_t>& maxima() const { return maxima_; }

    // Index into maxima() of the nearest maximum; ties resolve to the lower
    // theta so labels are deterministic.
    std::size_t basin_of(double theta) const {
        std::size_t best = 0;
        double best_d = std::abs(theta - thetas_[maxima_[0]]);
        for (std::size_t k = 1; k < maxima_.size(); ++k) {
            const double d = std::abs(theta - thetas_[maxima_[k]]);
            if (d < best_d) {
                best = k;
                best_d = d;
            }
        }
        return best;
    }

    bool is_global(double theta) const {
        return basin_of(theta) == basin_of(thetas_[argmax_]);
    }

    std::string label(double theta) const {
        return is_global(theta) ? "global" : "local";
    }

    double maximum_theta(std::size_t k) const { return thetas_[maxima_[k]]; }

  private:
    std::vector<double> thetas_;
    std::vector<double> values_;
    std::vector<std::size_t> maxima_;
    std::size_t argmax_ = 0;
};

}  // namespace contpol
