#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace contpol {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Sample mean and standard error with the n-1 variance denominator.
// Accumulation order is the vector order, so results do not depend on how the
// samples were produced (threads fill disjoint slots, reduction happens here).
inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean_stderr: empty sample");
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    if (xs.size() == 1) return {m, 0.0, 1};
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(xs.size())), xs.size()};
}

inline double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: n < 2");
    const auto ms = mean_stderr(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - ms.mean) * (x - ms.mean);
    return ss / static_cast<double>(xs.size() - 1);
}

// Two independent estimates agree when their difference is within
// k * sqrt(se1^2 + se2^2); k = 3 is the default everywhere in this project.
struct EqualityCheck {
    double diff = 0.0;
    double combined_se = 0.0;
    double k = 0.0;
    bool pass = false;
};

inline EqualityCheck check_equal(const MeanStderr& a, const MeanStderr& b,
                                 double k = 3.0) {
    EqualityCheck c;
    c.diff = a.mean - b.mean;
    c.combined_se = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
    c.k = k;
    c.pass = std::abs(c.diff) <= k * c.combined_se;
    return c;
}

// Standard error of a sample variance estimate of a (near-)normal sample:
// se(s^2) = s^2 * sqrt(2 / (n - 1)).
inline double variance_stderr(double sample_var, std::size_t n) {
    if (n < 2) throw std::invalid_argument("variance_stderr: n < 2");
    return sample_var * std::sqrt(2.0 / static_cast<double>(n - 1));
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

// Asymptotic Kolmogorov critical value at alpha = 0.01, i.e. the c with
// Q_KS(c) = alpha where Q_KS(c) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 c^2).
inline constexpr double kKsCritical01 = 1.6276236115189504;

struct KsResult {
    double statistic = 0.0;   // sup-norm distance
    double threshold = 0.0;   // critical distance at the configured alpha
    bool reject = false;
};

// One-sample KS against a continuous CDF.  cdf must be nondecreasing on the
// sample range.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> xs, Cdf&& cdf,
                       double critical = kKsCritical01) {
    if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    KsResult r;
    r.statistic = d;
    r.threshold = critical / std::sqrt(n);
    r.reject = d > r.threshold;
    return r;
}

// Two-sample KS; threshold c(alpha) * sqrt((m+n)/(m n)).
inline KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys,
                              double critical = kKsCritical01) {
    if (xs.empty() || ys.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx -
                                 static_cast<double>(j) / ny));
    }
    KsResult r;
    r.statistic = d;
    r.threshold = critical * std::sqrt((nx + ny) / (nx * ny));
    r.reject = d > r.threshold;
    return r;
}

// FNV-1a 64-bit, used to fingerprint configurations in output headers.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace contpol
