#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "contpol/rng.hpp"

namespace contpol {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Lower-triangular factor L with L L^T = cov for a symmetric PSD matrix.
// LLT handles the positive-definite case; singular PSD matrices fall back to
// an eigendecomposition with negative eigenvalues (numerical noise) clipped.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov, double tol = 1e-12) {
    if (cov.rows() != cov.cols())
        throw std::invalid_argument("psd_sqrt: matrix not square");
    if (cov.size() == 0) return cov;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double floor = -tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if ((es.eigenvalues().array() < floor).any())
        throw std::invalid_argument("psd_sqrt: matrix not positive semidefinite");
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Draw from N(mean, cov).  An exactly-zero covariance returns the mean without
// consuming any randomness, so degenerate policies stay stream-compatible with
// their deterministic counterparts under a shared seed.
inline Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov,
                                       RandomStream& rng) {
    if (cov.isZero(0.0)) return mean;
    if (mean.size() == 1)
        return mean + Eigen::VectorXd::Constant(1, std::sqrt(cov(0, 0)) *
                                                       rng.next_normal());
    const Eigen::MatrixXd L = psd_sqrt(cov);
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.next_normal();
    return mean + L * z;
}

// Log density of N(mean, cov) at x; requires nonsingular cov.
inline double gaussian_logpdf(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& cov) {
    const Eigen::Index d = x.size();
    if (mean.size() != d || cov.rows() != d || cov.cols() != d)
        throw std::invalid_argument("gaussian_logpdf: dimension mismatch");
    if (d == 1) {
        const double v = cov(0, 0);
        if (!(v > 0.0))
            throw std::invalid_argument("gaussian_logpdf: singular covariance");
        const double r = x(0) - mean(0);
        return -0.5 * (kLog2Pi + std::log(v) + r * r / v);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gaussian_logpdf: singular covariance");
    const Eigen::VectorXd w = llt.matrixL().solve(x - mean);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * (static_cast<double>(d) * kLog2Pi + w.squaredNorm()) - logdet;
}

// Differential entropy of N(., cov) in nats: d/2 (1 + log 2 pi) + log det / 2.
inline double gaussian_entropy(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gaussian_entropy: singular covariance");
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i)
        logdet += std::log(llt.matrixL()(i, i));
    return 0.5 * static_cast<double>(cov.rows()) * (1.0 + kLog2Pi) + logdet;
}

}  // namespace contpol
