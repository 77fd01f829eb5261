#pragma once

// Exact Gaussian likelihood of a zero-mean ARMA(p, q) process through its
// state-space form and the Kalman filter.
//
// State dimension r = max(p, q + 1). Transition T has the AR coefficients in
// its first column and ones on the superdiagonal; the disturbance loading is
// R = (1, theta_1, ..., theta_{r-1}). The observation picks the first state.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "eiskit/error.hpp"

namespace eiskit::ss {

/// Smallest modulus among the roots of 1 + sign * sum_k c_k z^k; +inf for an
/// empty coefficient list. sign = -1 gives the AR polynomial, +1 the MA one.
inline double min_root_modulus(std::span<const double> coeffs, double sign) {
    std::size_t m = coeffs.size();
    while (m > 0 && coeffs[m - 1] == 0.0) --m;
    if (m == 0) return std::numeric_limits<double>::infinity();
    // Reciprocal roots are the eigenvalues of the companion matrix.
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) c(0, static_cast<Eigen::Index>(k)) = -sign * coeffs[k];
    for (std::size_t k = 1; k < m; ++k) c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        max_abs = std::max(max_abs, std::abs(es.eigenvalues()[i]));
    }
    return max_abs > 0.0 ? 1.0 / max_abs : std::numeric_limits<double>::infinity();
}

inline double ar_root_radius(std::span<const double> ar) { return min_root_modulus(ar, -1.0); }
inline double ma_root_radius(std::span<const double> ma) { return min_root_modulus(ma, +1.0); }

/// Stationary and invertible with every root modulus above 1 + margin.
inline bool admissible(std::span<const double> ar, std::span<const double> ma, double margin = 1e-6) {
    for (double v : ar) {
        if (!std::isfinite(v)) return false;
    }
    for (double v : ma) {
        if (!std::isfinite(v)) return false;
    }
    return ar_root_radius(ar) > 1.0 + margin && ma_root_radius(ma) > 1.0 + margin;
}

/// Kalman gains and innovation variances (in units of sigma^2) for an ARMA
/// model over n observations. The covariance recursion does not depend on the
/// data, so one instance filters any number of series.
class ArmaFilter {
public:
    ArmaFilter(std::span<const double> ar, std::span<const double> ma, std::size_t n)
        : ar_(ar.begin(), ar.end()), ma_(ma.begin(), ma.end()) {
        r_ = std::max(ar_.size(), ma_.size() + 1);
        const auto r = static_cast<Eigen::Index>(r_);
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, r);
        for (std::size_t i = 0; i < ar_.size(); ++i) T(static_cast<Eigen::Index>(i), 0) = ar_[i];
        for (Eigen::Index i = 0; i + 1 < r; ++i) T(i, i + 1) = 1.0;
        Eigen::VectorXd R = Eigen::VectorXd::Zero(r);
        R(0) = 1.0;
        for (std::size_t j = 0; j < ma_.size(); ++j) R(static_cast<Eigen::Index>(j + 1)) = ma_[j];
        const Eigen::MatrixXd RR = R * R.transpose();

        // Stationary covariance: vec(P) = (I - T (x) T)^{-1} vec(R R').
        const Eigen::Index r2 = r * r;
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(r2, r2);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < r; ++j)
                for (Eigen::Index k = 0; k < r; ++k)
                    for (Eigen::Index l = 0; l < r; ++l) A(i + j * r, k + l * r) -= T(i, k) * T(j, l);
        Eigen::VectorXd rhs(r2);
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index i = 0; i < r; ++i) rhs(i + j * r) = RR(i, j);
        const Eigen::VectorXd vecp = A.partialPivLu().solve(rhs);
        Eigen::MatrixXd P(r, r);
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index i = 0; i < r; ++i) P(i, j) = vecp(i + j * r);
        P = 0.5 * (P + P.transpose());
        if (!P.allFinite()) throw NumericalError("ARMA filter: stationary covariance is not finite");

        f_.resize(n);
        gains_.resize(r, static_cast<Eigen::Index>(n));
        bool steady = false;
        for (std::size_t t = 0; t < n; ++t) {
            const auto tc = static_cast<Eigen::Index>(t);
            if (steady) {
                f_[t] = f_[t - 1];
                gains_.col(tc) = gains_.col(tc - 1);
                continue;
            }
            const double F = P(0, 0);
            if (!(F > 0.0) || !std::isfinite(F)) throw NumericalError("ARMA filter: innovation variance <= 0");
            f_[t] = F;
            const Eigen::VectorXd K = T * P.col(0) / F;
            gains_.col(tc) = K;
            Eigen::MatrixXd Pn = T * P * T.transpose() + RR - K * K.transpose() * F;
            Pn = 0.5 * (Pn + Pn.transpose());
            if ((Pn - P).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + P.cwiseAbs().maxCoeff())) steady = true;
            P = std::move(Pn);
        }
        for (double F : f_) sum_log_f_ += std::log(F);
    }

    std::size_t state_dim() const { return r_; }
    std::size_t size() const { return f_.size(); }
    const std::vector<double>& innovation_variances() const { return f_; }
    double sum_log_f() const { return sum_log_f_; }

    /// One-step-ahead prediction errors of `u` (length n) written to `v`.
    void innovations(std::span<const double> u, std::span<double> v) const {
        std::vector<double> a(r_, 0.0);
        std::vector<double> next(r_, 0.0);
        const std::size_t p = ar_.size();
        for (std::size_t t = 0; t < f_.size(); ++t) {
            const double e = u[t] - a[0];
            v[t] = e;
            // a <- T a + K e
            for (std::size_t i = 0; i < r_; ++i) {
                double s = (i < p ? ar_[i] * a[0] : 0.0) + (i + 1 < r_ ? a[i + 1] : 0.0);
                next[i] = s + gains_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) * e;
            }
            std::swap(a, next);
        }
    }

    std::vector<double> innovations(std::span<const double> u) const {
        std::vector<double> v(u.size());
        innovations(u, v);
        return v;
    }

private:
    std::vector<double> ar_;
    std::vector<double> ma_;
    std::size_t r_ = 1;
    std::vector<double> f_;
    Eigen::MatrixXd gains_;
    double sum_log_f_ = 0.0;
};

/// Exact log-likelihood of zero-mean ARMA data u with innovation variance sigma2.
inline double arma_loglik(std::span<const double> ar, std::span<const double> ma, double sigma2,
                          std::span<const double> u) {
    ArmaFilter f(ar, ma, u.size());
    const auto v = f.innovations(u);
    double ss = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) ss += v[t] * v[t] / f.innovation_variances()[t];
    const double n = static_cast<double>(u.size());
    return -0.5 * (n * std::log(2.0 * 3.14159265358979323846 * sigma2) + f.sum_log_f() + ss / sigma2);
}

}  // namespace eiskit::ss
