#pragma once

// Dose-response calibration analytics: percent impedance change, per-pH linear
// fits with signal threshold and linear dynamic range, box-whisker statistics
// and standard error by dose.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eiskit/error.hpp"

namespace eiskit::dose {

struct DoseResponsePoint {
    double concentration = 0.0;  // mg/dL
    double ph = 0.0;
    double delta_z_pct = 0.0;
    int replicate = 0;
};

/// 100 (z - z_baseline) / z_baseline.
inline double percent_delta_z(double z, double z_baseline) {
    if (!(z_baseline > 0.0)) throw DomainError("percent_delta_z: baseline must be > 0");
    return 100.0 * (z - z_baseline) / z_baseline;
}

enum class ConcentrationAxis { log10, linear };

struct DoseFitOptions {
    ConcentrationAxis axis = ConcentrationAxis::log10;
    /// A concentration is "linear" while every residual there is within
    /// band_factor * RMSE of the fit.
    double band_factor = 2.0;
    /// LDR is the linear span over (max tested concentration - span_origin).
    double span_origin = 0.0;
};

struct DoseFit {
    double ph = 0.0;
    double slope = 0.0;      // percent per axis unit
    double intercept = 0.0;  // percent; the specific signal threshold
    double r_squared = 0.0;
    double rmse = 0.0;
    double ldr_pct = 0.0;
    double linear_lo = 0.0;  // mg/dL
    double linear_hi = 0.0;  // mg/dL
    std::size_t n = 0;

    double sst_pct() const { return intercept; }
};

namespace detail {

inline bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

inline double axis_value(double c, ConcentrationAxis axis) {
    if (axis == ConcentrationAxis::log10) {
        if (!(c > 0.0)) throw DataError("dose fit: log axis needs concentrations > 0");
        return std::log10(c);
    }
    return c;
}

}  // namespace detail

/// Ordinary least squares of delta_z_pct against the concentration axis for
/// the points at `ph`.
inline DoseFit fit_dose_response(std::span<const DoseResponsePoint> points, double ph,
                                 const DoseFitOptions& opt = {}) {
    std::vector<double> xs, ys, cs;
    for (const auto& p : points) {
        if (!detail::same(p.ph, ph)) continue;
        if (!std::isfinite(p.delta_z_pct)) throw DataError("dose fit: non-finite response");
        cs.push_back(p.concentration);
        xs.push_back(detail::axis_value(p.concentration, opt.axis));
        ys.push_back(p.delta_z_pct);
    }
    std::vector<double> distinct(cs);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](double a, double b) { return detail::same(a, b); }),
                   distinct.end());
    if (distinct.size() < 2) throw DataError("dose fit: need at least two distinct concentrations");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    DoseFit fit;
    fit.ph = ph;
    fit.n = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    std::vector<double> resid(xs.size());
    double ssr = 0.0;
    double ymax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        resid[i] = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += resid[i] * resid[i];
        ymax = std::max(ymax, std::abs(ys[i]));
    }
    fit.rmse = std::sqrt(ssr / n);
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : (ssr == 0.0 ? 1.0 : 0.0);

    const double band = std::max(opt.band_factor * fit.rmse, 1e-9 * std::max(1.0, ymax));
    std::vector<bool> inside(distinct.size(), true);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (std::abs(resid[i]) <= band) continue;
        for (std::size_t k = 0; k < distinct.size(); ++k) {
            if (detail::same(distinct[k], cs[i])) inside[k] = false;
        }
    }
    double best = -1.0;
    for (std::size_t a = 0; a < distinct.size(); ++a) {
        if (!inside[a]) continue;
        std::size_t b = a;
        while (b + 1 < distinct.size() && inside[b + 1]) ++b;
        const double span = distinct[b] - distinct[a];
        if (span > best) {
            best = span;
            fit.linear_lo = distinct[a];
            fit.linear_hi = distinct[b];
        }
        a = b;
    }
    const double full = distinct.back() - opt.span_origin;
    if (!(full > 0.0)) throw DataError("dose fit: tested span must be positive");
    fit.ldr_pct = best > 0.0 ? 100.0 * best / full : 0.0;
    return fit;
}

struct BoxStats {
    std::size_t n = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
};

/// Quantile by linear interpolation of order statistics; `sorted` ascending.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Quartiles with whiskers at the most extreme data within 1.5 IQR of the box.
inline BoxStats box_stats_values(std::vector<double> values) {
    if (values.size() < 4) throw DataError("box_stats: need at least 4 points");
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.n = values.size();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    s.iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * s.iqr;
    const double hi_fence = s.q3 + 1.5 * s.iqr;
    s.whisker_lo = *std::lower_bound(values.begin(), values.end(), lo_fence);
    s.whisker_hi = *(std::upper_bound(values.begin(), values.end(), hi_fence) - 1);
    return s;
}

/// Box statistics of the response at `concentration`, pooled across pH.
inline BoxStats box_stats(std::span<const DoseResponsePoint> points, double concentration) {
    std::vector<double> v;
    for (const auto& p : points) {
        if (detail::same(p.concentration, concentration)) v.push_back(p.delta_z_pct);
    }
    return box_stats_values(std::move(v));
}

/// Distinct concentrations in ascending order.
inline std::vector<double> concentrations(std::span<const DoseResponsePoint> points) {
    std::vector<double> c;
    for (const auto& p : points) c.push_back(p.concentration);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(), [](double a, double b) { return detail::same(a, b); }),
            c.end());
    return c;
}

/// Distinct pH values in ascending order.
inline std::vector<double> ph_values(std::span<const DoseResponsePoint> points) {
    std::vector<double> c;
    for (const auto& p : points) c.push_back(p.ph);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(), [](double a, double b) { return detail::same(a, b); }),
            c.end());
    return c;
}

/// Standard error of the mean (population standard deviation / sqrt n).
/// Absent when only one replicate exists.
inline std::optional<double> sem(std::span<const double> v) {
    if (v.size() < 2) return std::nullopt;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(v.size()));
    return sd / std::sqrt(static_cast<double>(v.size()));
}

/// SEM of the response per concentration, pooled across pH.
inline std::map<double, std::optional<double>> sem_by_dose(std::span<const DoseResponsePoint> points) {
    std::map<double, std::optional<double>> out;
    for (double c : concentrations(points)) {
        std::vector<double> v;
        for (const auto& p : points) {
            if (detail::same(p.concentration, c)) v.push_back(p.delta_z_pct);
        }
        out[c] = sem(v);
    }
    return out;
}

struct DoseSummary {
    double ph = 0.0;
    double concentration = 0.0;
    double mean = 0.0;
    std::optional<double> sem;
    std::size_t n = 0;
};

/// Mean and SEM per (pH, concentration); the data behind a dose-response plot.
inline std::vector<DoseSummary> summarize(std::span<const DoseResponsePoint> points) {
    std::vector<DoseSummary> out;
    for (double ph : ph_values(points)) {
        for (double c : concentrations(points)) {
            std::vector<double> v;
            for (const auto& p : points) {
                if (detail::same(p.ph, ph) && detail::same(p.concentration, c)) v.push_back(p.delta_z_pct);
            }
            if (v.empty()) continue;
            double m = 0.0;
            for (double x : v) m += x;
            out.push_back({ph, c, m / static_cast<double>(v.size()), sem(v), v.size()});
        }
    }
    return out;
}

/// Noiseless points on delta_z = intercept + slope * log10(c) for every
/// (pH, concentration, replicate).
inline std::vector<DoseResponsePoint> linear_scenario(double intercept_pct, double slope_pct_per_decade,
                                                      std::span<const double> concs,
                                                      std::span<const double> phs, int replicates) {
    std::vector<DoseResponsePoint> pts;
    for (double ph : phs) {
        for (double c : concs) {
            for (int r = 0; r < replicates; ++r) {
                pts.push_back({c, ph, intercept_pct + slope_pct_per_decade * std::log10(c), r});
            }
        }
    }
    return pts;
}

/// Sensing range 10..200 mg/dL, 11 % intercept at pH 4, 6 and 8. Against a
/// 0..200 mg/dL tested span this is a 95 % linear dynamic range.
inline std::vector<DoseResponsePoint> sst11_scenario() {
    static constexpr double concs[] = {10.0, 25.0, 50.0, 100.0, 150.0, 200.0};
    static constexpr double phs[] = {4.0, 6.0, 8.0};
    return linear_scenario(11.0, 8.0, concs, phs, 4);
}

}  // namespace eiskit::dose
