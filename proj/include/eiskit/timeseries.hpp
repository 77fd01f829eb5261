#pragma once

// Time-series utilities: sample autocorrelation with 3-sigma bands, counting of
// significant initial lags, differencing, reference-curve interpolation and
// residual histograms.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "eiskit/error.hpp"

namespace eiskit::ts {

struct AcfResult {
    std::vector<double> r;  // r[0] == 1
    double band = 0.0;      // +-3/sqrt(N)
    std::size_t n = 0;
};

/// Sample autocorrelation for lags 0..max_lag.
inline AcfResult acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 1 || n <= max_lag) throw DataError("acf: need series length > max_lag >= 1");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (!(denom > 0.0)) throw DataError("acf: undefined for a constant series");

    AcfResult out;
    out.n = n;
    out.band = 3.0 / std::sqrt(static_cast<double>(n));
    out.r.resize(max_lag + 1);
    out.r[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
        out.r[k] = s / denom;
    }
    return out;
}

/// Number of consecutive lags, starting at lag 1, whose |r| exceeds the band.
inline std::size_t significant_initial_lags(const AcfResult& a) {
    std::size_t k = 1;
    while (k < a.r.size() && std::abs(a.r[k]) > a.band) ++k;
    return k - 1;
}

/// d-th order differencing; output has x.size() - d samples.
inline std::vector<double> difference(std::span<const double> x, int d) {
    if (d < 0) throw DomainError("difference: order must be >= 0");
    std::vector<double> v(x.begin(), x.end());
    for (int i = 0; i < d; ++i) {
        if (v.size() < 2) throw DataError("difference: series too short");
        for (std::size_t t = 0; t + 1 < v.size(); ++t) v[t] = v[t + 1] - v[t];
        v.pop_back();
    }
    return v;
}

/// Inverse of difference(): rebuilds a series from its d-th differences and
/// the first d samples of the original.
inline std::vector<double> integrate(std::span<const double> diffs, std::span<const double> initial) {
    const int d = static_cast<int>(initial.size());
    if (d == 0) return {diffs.begin(), diffs.end()};
    // Leading values of each differencing level: level k starts at Delta^k x[0].
    std::vector<std::vector<double>> heads(d);
    std::vector<double> level(initial.begin(), initial.end());
    for (int k = 0; k < d; ++k) {
        heads[k] = level;
        std::vector<double> next;
        for (std::size_t t = 0; t + 1 < level.size(); ++t) next.push_back(level[t + 1] - level[t]);
        level = std::move(next);
    }
    std::vector<double> cur(diffs.begin(), diffs.end());
    for (int k = d - 1; k >= 0; --k) {
        std::vector<double> up;
        up.reserve(cur.size() + 1);
        up.push_back(heads[k][0]);
        for (double dv : cur) up.push_back(up.back() + dv);
        cur = std::move(up);
    }
    return cur;
}

/// First difference with the first element set to zero (same length as x).
inline std::vector<double> first_difference_padded(std::span<const double> x) {
    std::vector<double> d(x.size(), 0.0);
    for (std::size_t t = 1; t < x.size(); ++t) d[t] = x[t] - x[t - 1];
    return d;
}

struct RefPoint {
    double time = 0.0;     // s
    double glucose = 0.0;  // mg/dL
};

enum class InterpolationMode { monotone_cubic, linear };

namespace detail {

// Fritsch-Carlson derivative estimates with shape-preserving end conditions.
inline std::vector<double> pchip_slopes(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        delta[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
        return d;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    auto end_slope = [](double h0, double h1, double del0, double del1) {
        double s = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (s * del0 <= 0.0) {
            s = 0.0;
        } else if (del0 * del1 <= 0.0 && std::abs(s) > std::abs(3.0 * del0)) {
            s = 3.0 * del0;
        }
        return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

}  // namespace detail

/// Interpolates sparse reference samples onto `targets`; targets outside the
/// reference span take the nearest endpoint value.
inline std::vector<double> interpolate_reference(std::span<const RefPoint> ref,
                                                 std::span<const double> targets,
                                                 InterpolationMode mode = InterpolationMode::monotone_cubic) {
    if (ref.size() < 2) throw DataError("interpolate_reference: need at least two reference points");
    std::vector<double> x(ref.size()), y(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        x[i] = ref[i].time;
        y[i] = ref[i].glucose;
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw DataError("interpolate_reference: non-finite reference point");
        }
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw DataError("interpolate_reference: reference times must be strictly increasing");
        }
    }
    const std::vector<double> d = mode == InterpolationMode::monotone_cubic
                                      ? detail::pchip_slopes(x, y)
                                      : std::vector<double>{};
    std::vector<double> out;
    out.reserve(targets.size());
    for (double t : targets) {
        if (t <= x.front()) {
            out.push_back(y.front());
            continue;
        }
        if (t >= x.back()) {
            out.push_back(y.back());
            continue;
        }
        const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
        const double h = x[k + 1] - x[k];
        const double s = (t - x[k]) / h;
        if (mode == InterpolationMode::linear) {
            out.push_back(y[k] + s * (y[k + 1] - y[k]));
            continue;
        }
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        out.push_back(h00 * y[k] + h10 * h * d[k] + h01 * y[k + 1] + h11 * h * d[k + 1]);
    }
    return out;
}

struct Histogram {
    std::vector<double> edges;          // n_bins + 1
    std::vector<std::size_t> counts;    // n_bins
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
inline Histogram residual_histogram(std::span<const double> residuals, std::size_t n_bins) {
    if (residuals.empty()) throw DataError("residual_histogram: empty residuals");
    if (n_bins < 2) throw DomainError("residual_histogram: n_bins must be >= 2");
    const auto [mn_it, mx_it] = std::minmax_element(residuals.begin(), residuals.end());
    const double lo = *mn_it;
    const double hi = *mx_it;
    Histogram h;
    h.edges.resize(n_bins + 1);
    h.counts.assign(n_bins, 0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    for (double r : residuals) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>((r - lo) / width);
            if (b >= n_bins) b = n_bins - 1;
        }
        ++h.counts[b];
    }
    return h;
}

}  // namespace eiskit::ts
