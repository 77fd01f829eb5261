#pragma once

// Quasi-Newton (BFGS) minimization with central-difference gradients and an
// Armijo backtracking line search. Objectives may return +inf to mark an
// inadmissible point; the line search then shortens the step.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace eiskit::opt {

struct BfgsOptions {
    int max_iter = 500;
    double rel_tol = 1e-8;   // relative objective change that counts as converged
    double grad_tol = 1e-7;  // infinity norm of the gradient
};

struct BfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> trace;  // objective after each accepted iteration, starting value first
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fx) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fp = f(xp);
        const double fm = f(xm);
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g(i) = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            g(i) = (fp - fx) / h;
        } else if (std::isfinite(fm)) {
            g(i) = (fx - fm) / h;
        } else {
            g(i) = 0.0;
        }
    }
    return g;
}

inline BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opt = {}) {
    BfgsResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.trace.push_back(res.f);
    if (!std::isfinite(res.f)) {
        res.message = "objective is not finite at the starting point";
        return res;
    }
    const Eigen::Index n = res.x.size();
    if (n == 0) {
        res.converged = true;
        res.message = "no free parameters";
        return res;
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = numeric_gradient(f, res.x, res.f);
    bool fresh_h = true;

    while (res.iterations < opt.max_iter) {
        if (g.cwiseAbs().maxCoeff() < opt.grad_tol) {
            res.converged = true;
            res.message = "gradient below tolerance";
            return res;
        }
        Eigen::VectorXd d = -H * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            H.setIdentity();
            fresh_h = true;
            d = -g;
            slope = g.dot(d);
        }
        double step = 1.0;
        // Keep the first trial step modest when the direction is large.
        const double dn = d.cwiseAbs().maxCoeff();
        if (dn > 1.0) step = 1.0 / dn;
        Eigen::VectorXd xn;
        double fn = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            xn = res.x + step * d;
            fn = f(xn);
            if (std::isfinite(fn) && fn <= res.f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!fresh_h) {
                H.setIdentity();
                fresh_h = true;
                continue;
            }
            res.converged = true;
            res.message = "line search cannot improve further";
            return res;
        }
        ++res.iterations;
        const Eigen::VectorXd gn = numeric_gradient(f, xn, fn);
        const Eigen::VectorXd s = xn - res.x;
        const Eigen::VectorXd y = gn - g;
        const double sy = s.dot(y);
        const double f_old = res.f;
        res.x = xn;
        res.f = fn;
        g = gn;
        res.trace.push_back(fn);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
            fresh_h = false;
        }
        if (std::abs(f_old - fn) <= opt.rel_tol * (std::abs(f_old) + 1e-12)) {
            res.converged = true;
            res.message = "relative objective change below tolerance";
            return res;
        }
    }
    res.message = "iteration cap reached";
    return res;
}

/// Central-difference Hessian with per-coordinate steps h[i].
inline Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& h) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h(i);
        xm(i) -= h(i);
        H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h(i) * h(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            Eigen::VectorXd a = x, b = x, c = x, d = x;
            a(i) += h(i); a(j) += h(j);
            b(i) += h(i); b(j) -= h(j);
            c(i) -= h(i); c(j) += h(j);
            d(i) -= h(i); d(j) -= h(j);
            H(i, j) = H(j, i) = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h(i) * h(j));
        }
    }
    return H;
}

}  // namespace eiskit::opt
