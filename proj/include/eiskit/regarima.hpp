#pragma once

// Regression with ARIMA errors:
//
//   y_t = c + sum_j beta_j x_{j,t} + u_t,
//   phi(L) (1 - L)^d u_t = theta(L) eps_t,   eps_t ~ N(0, sigma^2).
//
// Estimation maximizes the exact Gaussian likelihood. For fixed ARMA
// coefficients the regression coefficients and sigma^2 have closed-form GLS
// solutions, so the quasi-Newton search runs over (phi, theta) only; standard
// errors come from a numerical observed-information matrix over the full
// parameter vector.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/optimize.hpp"
#include "eiskit/state_space.hpp"
#include "eiskit/subject.hpp"
#include "eiskit/timeseries.hpp"

namespace eiskit::regarima {

struct ArimaOrders {
    int p = 0;
    int d = 0;
    int q = 0;
};

enum class OutputScale { identity, log };

struct FitOptions {
    int max_iter = 500;
    double rel_tol = 1e-8;
    OutputScale scale = OutputScale::identity;
    bool include_intercept = true;
    ts::InterpolationMode interpolation = ts::InterpolationMode::monotone_cubic;
};

struct CoefficientRow {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 0.0;
};

struct RegArimaModel {
    ArimaOrders orders;
    bool has_intercept = true;
    double intercept = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<std::string> predictors;
    std::vector<double> betas;
    double variance = 1.0;
    OutputScale scale = OutputScale::identity;
    /// Intercept, AR{1..p}, MA{1..q}, Beta(name)..., Variance.
    std::vector<CoefficientRow> table;
    double loglik = 0.0;
    double aic = 0.0;
    std::size_t n_obs = 0;

    std::size_t num_parameters() const {
        return (has_intercept ? 1 : 0) + ar.size() + ma.size() + betas.size() + 1;
    }

    double beta(const std::string& name) const {
        for (std::size_t i = 0; i < predictors.size(); ++i) {
            if (predictors[i] == name) return betas[i];
        }
        throw DataError("model has no predictor '" + name + "'");
    }

    const CoefficientRow& row(const std::string& name) const {
        for (const auto& r : table) {
            if (r.name == name) return r;
        }
        throw DataError("model has no coefficient '" + name + "'");
    }
};

struct FitResult {
    RegArimaModel model;
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> objective_trace;  // negative mean log-likelihood per accepted iteration
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Two-sided p-value of a t statistic under the normal approximation.
inline double normal_p_value(double t) { return std::erfc(std::abs(t) / std::numbers::sqrt2); }

inline std::string ar_name(std::size_t i) { return "AR{" + std::to_string(i) + "}"; }
inline std::string ma_name(std::size_t i) { return "MA{" + std::to_string(i) + "}"; }
inline std::string beta_name(const std::string& p) { return "Beta(" + p + ")"; }

namespace detail {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline std::vector<double> apply_scale(std::span<const double> y, OutputScale s) {
    std::vector<double> out(y.begin(), y.end());
    if (s == OutputScale::log) {
        for (double& v : out) {
            if (!(v > 0.0)) throw DataError("log output scale needs positive targets");
            v = std::log(v);
        }
    }
    return out;
}

inline double unscale(double v, OutputScale s) { return s == OutputScale::log ? std::exp(v) : v; }

/// Differenced target and design (intercept column, if any, kept as ones).
struct Prepared {
    std::vector<double> y;
    MatrixXd design;  // n x m
};

inline Prepared prepare(std::span<const double> y_scaled, const std::vector<std::vector<double>>& xs,
                        int d, bool intercept) {
    Prepared out;
    out.y = ts::difference(y_scaled, d);
    const auto n = static_cast<Index>(out.y.size());
    const Index m = (intercept ? 1 : 0) + static_cast<Index>(xs.size());
    out.design.resize(n, m);
    Index col = 0;
    if (intercept) out.design.col(col++).setOnes();
    for (const auto& x : xs) {
        const auto dx = ts::difference(x, d);
        for (Index t = 0; t < n; ++t) out.design(t, col) = dx[static_cast<std::size_t>(t)];
        ++col;
    }
    return out;
}

/// Innovations of y and every design column, scaled by 1/sqrt(F_t).
struct Whitened {
    VectorXd y;
    MatrixXd x;
    double sum_log_f = 0.0;
};

inline Whitened whiten(const ss::ArmaFilter& f, std::span<const double> y, const MatrixXd& design) {
    const auto n = static_cast<Index>(y.size());
    Whitened w;
    w.y.resize(n);
    w.x.resize(n, design.cols());
    w.sum_log_f = f.sum_log_f();
    std::vector<double> buf(static_cast<std::size_t>(n));
    std::vector<double> col(static_cast<std::size_t>(n));
    const auto& F = f.innovation_variances();
    f.innovations(y, buf);
    for (Index t = 0; t < n; ++t) w.y(t) = buf[static_cast<std::size_t>(t)] / std::sqrt(F[static_cast<std::size_t>(t)]);
    for (Index j = 0; j < design.cols(); ++j) {
        for (Index t = 0; t < n; ++t) col[static_cast<std::size_t>(t)] = design(t, j);
        f.innovations(col, buf);
        for (Index t = 0; t < n; ++t) w.x(t, j) = buf[static_cast<std::size_t>(t)] / std::sqrt(F[static_cast<std::size_t>(t)]);
    }
    return w;
}

struct Profile {
    double loglik = -std::numeric_limits<double>::infinity();
    VectorXd b;
    double sigma2 = 0.0;
    MatrixXd wtw;
};

/// Log-likelihood with the regression coefficients and sigma^2 concentrated out.
inline Profile profile(std::span<const double> ar, std::span<const double> ma, std::span<const double> y,
                       const MatrixXd& design) {
    Profile pr;
    if (!ss::admissible(ar, ma)) return pr;
    std::optional<ss::ArmaFilter> filter;
    try {
        filter.emplace(ar, ma, y.size());
    } catch (const NumericalError&) {
        return pr;
    }
    const Whitened w = whiten(*filter, y, design);
    const double n = static_cast<double>(y.size());
    VectorXd resid = w.y;
    if (design.cols() > 0) {
        pr.wtw = w.x.transpose() * w.x;
        pr.b = pr.wtw.ldlt().solve(w.x.transpose() * w.y);
        resid -= w.x * pr.b;
    } else {
        pr.b.resize(0);
        pr.wtw.resize(0, 0);
    }
    pr.sigma2 = resid.squaredNorm() / n;
    if (!(pr.sigma2 > 0.0)) return pr;
    pr.loglik = -0.5 * (n * (std::log(2.0 * std::numbers::pi * pr.sigma2) + 1.0) + w.sum_log_f);
    return pr;
}

/// Full log-likelihood at explicit regression coefficients and sigma^2.
inline double full_loglik(std::span<const double> ar, std::span<const double> ma, const VectorXd& b,
                          double sigma2, std::span<const double> y, const MatrixXd& design) {
    if (!(sigma2 > 0.0) || !ss::admissible(ar, ma, 0.0)) return -std::numeric_limits<double>::infinity();
    std::optional<ss::ArmaFilter> filter;
    try {
        filter.emplace(ar, ma, y.size());
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
    const ss::ArmaFilter& f = *filter;
    std::vector<double> u(y.begin(), y.end());
    if (design.cols() > 0) {
        const VectorXd reg = design * b;
        for (std::size_t t = 0; t < u.size(); ++t) u[t] -= reg(static_cast<Index>(t));
    }
    const auto v = f.innovations(u);
    double ss = 0.0;
    const auto& F = f.innovation_variances();
    for (std::size_t t = 0; t < v.size(); ++t) ss += v[t] * v[t] / F[t];
    const double n = static_cast<double>(y.size());
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + f.sum_log_f() + ss / sigma2);
}

inline VectorXd ols(const MatrixXd& a, const VectorXd& b) { return a.colPivHouseholderQr().solve(b); }

/// Hannan-Rissanen starting values for the ARMA part of the OLS residuals.
inline std::pair<std::vector<double>, std::vector<double>> initial_arma(std::span<const double> y,
                                                                        const MatrixXd& design, int p,
                                                                        int q) {
    const auto n = static_cast<Index>(y.size());
    VectorXd yv = Eigen::Map<const VectorXd>(y.data(), n);
    VectorXd u = yv;
    if (design.cols() > 0) u -= design * ols(design, yv);

    std::vector<double> ar(static_cast<std::size_t>(p), 0.0), ma(static_cast<std::size_t>(q), 0.0);
    if (p == 0 && q == 0) return {ar, ma};

    VectorXd eps = VectorXd::Zero(n);
    Index start = p;
    if (q > 0) {
        const Index m = std::min<Index>(std::max(p, q) + 10, n / 4);
        MatrixXd a(n - m, m);
        for (Index t = m; t < n; ++t)
            for (Index k = 0; k < m; ++k) a(t - m, k) = u(t - k - 1);
        const VectorXd coef = ols(a, u.tail(n - m));
        eps.tail(n - m) = u.tail(n - m) - a * coef;
        start = std::max<Index>(p, m + q);
    }
    const Index rows = n - start;
    if (rows <= p + q + 1) return {ar, ma};
    MatrixXd a(rows, p + q);
    for (Index t = start; t < n; ++t) {
        for (Index k = 0; k < p; ++k) a(t - start, k) = u(t - k - 1);
        for (Index k = 0; k < q; ++k) a(t - start, p + k) = eps(t - k - 1);
    }
    const VectorXd coef = ols(a, u.tail(rows));
    for (int k = 0; k < p; ++k) ar[static_cast<std::size_t>(k)] = coef(k);
    for (int k = 0; k < q; ++k) ma[static_cast<std::size_t>(k)] = coef(p + k);
    for (int shrink = 0; shrink < 200 && !ss::admissible(ar, ma, 1e-3); ++shrink) {
        for (double& v : ar) v *= 0.9;
        for (double& v : ma) v *= 0.9;
    }
    if (!ss::admissible(ar, ma, 1e-3)) {
        std::fill(ar.begin(), ar.end(), 0.0);
        std::fill(ma.begin(), ma.end(), 0.0);
    }
    return {ar, ma};
}

}  // namespace detail

struct InSample {
    std::vector<double> fitted;     // output units
    std::vector<double> residuals;  // output units, target - fitted
};

/// One-step-ahead in-sample predictions of `target` given the predictor
/// columns (same order as model.predictors). The first d samples are returned
/// as-is with zero residual.
inline InSample predict_series(const RegArimaModel& m, std::span<const double> target,
                               const std::vector<std::vector<double>>& xs) {
    if (xs.size() != m.predictors.size()) throw DataError("predict: predictor count mismatch");
    for (const auto& x : xs) {
        if (x.size() != target.size()) throw DataError("predict: predictor length mismatch");
    }
    const auto ys = detail::apply_scale(target, m.scale);
    const auto prep = detail::prepare(ys, xs, m.orders.d, m.has_intercept);
    Eigen::VectorXd b(prep.design.cols());
    Eigen::Index k = 0;
    if (m.has_intercept) b(k++) = m.intercept;
    for (double v : m.betas) b(k++) = v;
    std::vector<double> u(prep.y);
    if (prep.design.cols() > 0) {
        const Eigen::VectorXd reg = prep.design * b;
        for (std::size_t t = 0; t < u.size(); ++t) u[t] -= reg(static_cast<Eigen::Index>(t));
    }
    const ss::ArmaFilter f(m.ar, m.ma, u.size());
    const auto v = f.innovations(u);

    const auto d = static_cast<std::size_t>(m.orders.d);
    InSample out;
    out.fitted.resize(target.size());
    out.residuals.assign(target.size(), 0.0);
    for (std::size_t t = 0; t < target.size(); ++t) {
        const double scaled_fit = t < d ? ys[t] : ys[t] - v[t - d];
        out.fitted[t] = detail::unscale(scaled_fit, m.scale);
        out.residuals[t] = target[t] - out.fitted[t];
    }
    return out;
}

/// Maximum-likelihood fit of a regression with ARIMA(p, d, q) errors.
inline FitResult fit_series(std::span<const double> target, const std::vector<std::vector<double>>& xs,
                            const std::vector<std::string>& names, ArimaOrders orders,
                            const FitOptions& opt = {}) {
    using detail::Index;
    using detail::MatrixXd;
    using detail::VectorXd;
    if (orders.p < 0 || orders.d < 0 || orders.q < 0) throw ConfigError("ARIMA orders must be >= 0");
    if (names.size() != xs.size()) throw ConfigError("predictor names and columns differ in count");
    const std::size_t N = target.size();
    for (const auto& x : xs) {
        if (x.size() != N) throw DataError("predictor length differs from target length");
        for (double v : x) {
            if (!std::isfinite(v)) throw DataError("non-finite predictor value");
        }
    }
    for (double v : target) {
        if (!std::isfinite(v)) throw DataError("non-finite target value");
    }
    const std::size_t n_free = static_cast<std::size_t>(orders.p + orders.q) + xs.size();
    if (N < 10 * std::max<std::size_t>(n_free, 1) || N <= static_cast<std::size_t>(orders.d) + 2) {
        throw DataError("series too short: need at least 10 samples per estimated coefficient");
    }

    const auto ys = detail::apply_scale(target, opt.scale);
    const auto prep = detail::prepare(ys, xs, orders.d, opt.include_intercept);
    const std::size_t p = static_cast<std::size_t>(orders.p);
    const std::size_t q = static_cast<std::size_t>(orders.q);

    auto [ar0, ma0] = detail::initial_arma(prep.y, prep.design, orders.p, orders.q);
    VectorXd x0(static_cast<Index>(p + q));
    for (std::size_t i = 0; i < p; ++i) x0(static_cast<Index>(i)) = ar0[i];
    for (std::size_t i = 0; i < q; ++i) x0(static_cast<Index>(p + i)) = ma0[i];

    const double n = static_cast<double>(prep.y.size());
    auto split = [p, q](const VectorXd& x) {
        std::vector<double> ar(p), ma(q);
        for (std::size_t i = 0; i < p; ++i) ar[i] = x(static_cast<Index>(i));
        for (std::size_t i = 0; i < q; ++i) ma[i] = x(static_cast<Index>(p + i));
        return std::pair{ar, ma};
    };
    const opt::Objective objective = [&](const VectorXd& x) {
        const auto [ar, ma] = split(x);
        const auto pr = detail::profile(ar, ma, prep.y, prep.design);
        return std::isfinite(pr.loglik) ? -pr.loglik / n : std::numeric_limits<double>::infinity();
    };

    opt::BfgsOptions bopt;
    bopt.max_iter = opt.max_iter;
    bopt.rel_tol = opt.rel_tol;
    const auto res = opt::minimize_bfgs(objective, x0, bopt);
    if (!std::isfinite(res.f)) throw NumericalError("regARIMA fit: objective not finite at start");
    if (!res.converged) {
        throw NumericalError("regARIMA fit did not converge after " + std::to_string(res.iterations) +
                             " iterations (objective " + std::to_string(res.f) + ")");
    }

    const auto [ar, ma] = split(res.x);
    if (!ss::admissible(ar, ma)) throw NumericalError("regARIMA fit: optimum is not stationary/invertible");
    const auto pr = detail::profile(ar, ma, prep.y, prep.design);

    RegArimaModel m;
    m.orders = orders;
    m.has_intercept = opt.include_intercept;
    m.ar = ar;
    m.ma = ma;
    m.predictors = names;
    m.scale = opt.scale;
    m.n_obs = prep.y.size();
    Index k = 0;
    if (m.has_intercept) m.intercept = pr.b(k++);
    for (std::size_t j = 0; j < xs.size(); ++j) m.betas.push_back(pr.b(k++));
    m.variance = pr.sigma2;
    m.loglik = pr.loglik;

    // Full parameter vector in table order: [c] ar ma beta sigma2.
    const Index nb = prep.design.cols();
    const Index np = static_cast<Index>(m.num_parameters());
    const Index off_arma = m.has_intercept ? 1 : 0;
    const Index off_beta = off_arma + static_cast<Index>(p + q);
    VectorXd theta(np);
    if (m.has_intercept) theta(0) = m.intercept;
    for (std::size_t i = 0; i < p + q; ++i) theta(off_arma + static_cast<Index>(i)) = res.x(static_cast<Index>(i));
    for (std::size_t j = 0; j < m.betas.size(); ++j) theta(off_beta + static_cast<Index>(j)) = m.betas[j];
    theta(np - 1) = m.variance;

    auto unpack_b = [&](const VectorXd& th) {
        VectorXd b(nb);
        Index kk = 0;
        if (m.has_intercept) b(kk++) = th(0);
        for (std::size_t j = 0; j < m.betas.size(); ++j) b(kk++) = th(off_beta + static_cast<Index>(j));
        return b;
    };
    const opt::Objective neg_ll = [&](const VectorXd& th) {
        VectorXd arma(static_cast<Index>(p + q));
        for (std::size_t i = 0; i < p + q; ++i) arma(static_cast<Index>(i)) = th(off_arma + static_cast<Index>(i));
        const auto [a, mm] = split(arma);
        const double ll = detail::full_loglik(a, mm, unpack_b(th), th(np - 1), prep.y, prep.design);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    // Natural scale of each coordinate so the finite-difference steps are balanced.
    VectorXd scale(np);
    VectorXd b_se = VectorXd::Constant(nb, 1.0);
    if (nb > 0) {
        const MatrixXd inv = pr.wtw.ldlt().solve(MatrixXd::Identity(nb, nb));
        for (Index i = 0; i < nb; ++i) b_se(i) = std::sqrt(std::max(pr.sigma2 * inv(i, i), 1e-300));
    }
    {
        Index kk = 0;
        if (m.has_intercept) scale(0) = b_se(kk++);
        for (std::size_t i = 0; i < p + q; ++i) scale(off_arma + static_cast<Index>(i)) = 1.0 / std::sqrt(n);
        for (std::size_t j = 0; j < m.betas.size(); ++j) scale(off_beta + static_cast<Index>(j)) = b_se(kk++);
        scale(np - 1) = m.variance * std::sqrt(2.0 / n);
    }
    // Near the admissibility boundary the stencil can leave the feasible set;
    // shrink the step until every evaluation is finite.
    MatrixXd hz;
    for (double h = 5e-3; h > 1e-7; h *= 0.25) {
        hz = opt::numeric_hessian([&](const VectorXd& z) { return neg_ll(theta + scale.cwiseProduct(z)); },
                                  VectorXd::Zero(np), VectorXd::Constant(np, h));
        if (hz.allFinite()) break;
    }
    VectorXd se = VectorXd::Constant(np, std::numeric_limits<double>::quiet_NaN());
    {
        const Eigen::FullPivLU<MatrixXd> lu(hz);
        if (lu.isInvertible()) {
            const MatrixXd cov_z = lu.inverse();
            for (Index i = 0; i < np; ++i) {
                if (cov_z(i, i) > 0.0) se(i) = std::sqrt(cov_z(i, i)) * scale(i);
            }
        }
    }

    auto add_row = [&](const std::string& name, Index i) {
        CoefficientRow r;
        r.name = name;
        r.value = theta(i);
        r.std_error = se(i);
        r.t_stat = r.value / r.std_error;
        r.p_value = std::isfinite(r.t_stat) ? normal_p_value(r.t_stat) : std::numeric_limits<double>::quiet_NaN();
        m.table.push_back(r);
    };
    if (m.has_intercept) add_row("Intercept", 0);
    for (std::size_t i = 0; i < p; ++i) add_row(ar_name(i + 1), off_arma + static_cast<Index>(i));
    for (std::size_t i = 0; i < q; ++i) add_row(ma_name(i + 1), off_arma + static_cast<Index>(p + i));
    for (std::size_t j = 0; j < names.size(); ++j) add_row(beta_name(names[j]), off_beta + static_cast<Index>(j));
    add_row("Variance", np - 1);
    m.aic = 2.0 * static_cast<double>(np) - 2.0 * m.loglik;

    FitResult out;
    const auto ins = predict_series(m, target, xs);
    out.model = std::move(m);
    out.fitted = ins.fitted;
    out.residuals = ins.residuals;
    out.objective_trace = res.trace;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.message = res.message;
    return out;
}

/// Predictor columns of `s` in the order of `names`.
inline std::vector<std::vector<double>> predictor_columns(const SubjectSeries& s,
                                                         const std::vector<std::string>& names) {
    std::vector<std::vector<double>> xs;
    xs.reserve(names.size());
    for (const auto& nme : names) xs.push_back(s.column(nme));
    return xs;
}

/// Interpolated reference glucose on the subject's timestamps.
inline std::vector<double> reference_target(const SubjectSeries& s,
                                            ts::InterpolationMode mode = ts::InterpolationMode::monotone_cubic) {
    return ts::interpolate_reference(s.ref_points, s.timestamps, mode);
}

/// Fits glucose (interpolated from the subject's reference samples) on the
/// named predictors.
inline FitResult fit(const SubjectSeries& s, ArimaOrders orders, const std::vector<std::string>& predictors,
                     const FitOptions& opt = {}) {
    s.validate();
    const auto y = reference_target(s, opt.interpolation);
    return fit_series(y, predictor_columns(s, predictors), predictors, orders, opt);
}

struct Prediction {
    std::vector<double> timestamps;
    std::vector<double> target;  // interpolated reference glucose
    std::vector<double> fitted;
    std::vector<double> residuals;
};

inline Prediction predict(const RegArimaModel& m, const SubjectSeries& s,
                          ts::InterpolationMode mode = ts::InterpolationMode::monotone_cubic) {
    for (const auto& nme : m.predictors) {
        if (!SubjectSeries::is_predictor(nme)) throw DataError("unknown predictor column '" + nme + "'");
    }
    s.validate();
    Prediction out;
    out.timestamps = s.timestamps;
    out.target = reference_target(s, mode);
    auto ins = predict_series(m, out.target, predictor_columns(s, m.predictors));
    out.fitted = std::move(ins.fitted);
    out.residuals = std::move(ins.residuals);
    return out;
}

struct SignificanceReport {
    std::vector<std::string> retained;
    std::vector<std::string> removable;
};

/// Splits the model's terms (every row except Variance) by p-value < alpha.
inline SignificanceReport significance_filter(const RegArimaModel& m, double alpha = 0.05) {
    SignificanceReport r;
    for (const auto& row : m.table) {
        if (row.name == "Variance") continue;
        (row.p_value < alpha ? r.retained : r.removable).push_back(row.name);
    }
    return r;
}

struct OrderSelection {
    struct Entry {
        std::size_t subject = 0;
        std::string predictor;
        std::size_t significant_lags = 0;
    };
    int p = 1;
    std::vector<Entry> entries;
};

/// AR order from the longest run of initial ACF lags outside the 3-sigma band,
/// across subjects and predictors, clamped to [1, max_p].
inline OrderSelection select_order(std::span<const SubjectSeries> subjects,
                                   const std::vector<std::string>& predictors, int max_p) {
    if (max_p < 1) throw ConfigError("select_order: max_p must be >= 1");
    OrderSelection sel;
    std::size_t best = 0;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        for (const auto& nme : predictors) {
            const auto& col = subjects[i].column(nme);
            const std::size_t lag = std::min<std::size_t>(static_cast<std::size_t>(max_p), col.size() - 1);
            const std::size_t k = ts::significant_initial_lags(ts::acf(col, lag));
            sel.entries.push_back({i, nme, k});
            best = std::max(best, k);
        }
    }
    sel.p = static_cast<int>(std::clamp<std::size_t>(best, 1, static_cast<std::size_t>(max_p)));
    return sel;
}

}  // namespace eiskit::regarima
