#pragma once

// Seeded synthetic cohorts. Glucose is generated from a regression with
// ARMA(2,1) errors on zmod, dzmod and rh, so fitting that model family to a
// subject's hidden glucose track must recover the generator's coefficients.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/subject.hpp"
#include "eiskit/timeseries.hpp"

namespace eiskit::synth {

/// Zero-mean ARMA sample path with `burn_in` discarded start-up samples.
inline std::vector<double> simulate_arma(std::span<const double> ar, std::span<const double> ma, double sigma,
                                         std::size_t n, std::mt19937_64& rng, std::size_t burn_in = 500) {
    std::normal_distribution<double> gauss(0.0, sigma);
    const std::size_t total = n + burn_in;
    std::vector<double> e(total), u(total, 0.0);
    for (double& v : e) v = gauss(rng);
    for (std::size_t t = 0; t < total; ++t) {
        double s = e[t];
        for (std::size_t i = 0; i < ar.size() && i < t; ++i) s += ar[i] * u[t - i - 1];
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) s += ma[j] * e[t - j - 1];
        u[t] = s;
    }
    return {u.begin() + static_cast<std::ptrdiff_t>(burn_in), u.end()};
}

enum class Scenario { meals, fasting };

inline Scenario parse_scenario(const std::string& name) {
    if (name == "meals") return Scenario::meals;
    if (name == "fasting") return Scenario::fasting;
    throw ConfigError("unknown synth scenario '" + name + "' (expected meals or fasting)");
}

struct CohortSpec {
    std::size_t n_subjects = 20;
    double duration_h = 8.0;
    double cadence_s = 60.0;
    Scenario scenario = Scenario::meals;
    std::uint64_t seed = 0;
};

/// Generator coefficients of one subject's hidden glucose model.
struct SubjectTruth {
    double intercept = 0.0;
    std::vector<std::string> predictors{"zmod", "dzmod", "rh"};
    std::vector<double> betas;
    std::vector<double> ar{0.5, 0.2};
    std::vector<double> ma{0.4};
    double sigma = 0.8;
};

struct SyntheticSubject {
    SubjectSeries series;
    std::vector<double> glucose;  // hidden track the reference points sample
    SubjectTruth truth;
};

namespace detail {

/// Gamma-like meal response peaking `t_peak` seconds after the meal.
inline double meal_bump(double dt, double t_peak) {
    if (dt <= 0.0) return 0.0;
    const double x = dt / t_peak;
    return x * std::exp(1.0 - x);
}

}  // namespace detail

/// Subjects with 4 reference samples at hours 0, 1, 4 and 8 (the last clamped
/// to the final sample) and meal bumps at hours 0.5 and 3 for Scenario::meals.
inline std::vector<SyntheticSubject> synth_cohort(const CohortSpec& spec) {
    if (spec.n_subjects < 1) throw ConfigError("synth: n_subjects must be >= 1");
    if (!(spec.duration_h > 0.0) || !(spec.cadence_s > 0.0)) throw ConfigError("synth: duration and cadence must be > 0");
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_h * 3600.0 / spec.cadence_s));
    if (n < 16) throw ConfigError("synth: fewer than 16 samples per subject");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<SyntheticSubject> cohort;
    for (std::size_t s = 0; s < spec.n_subjects; ++s) {
        SyntheticSubject out;
        SubjectSeries& ser = out.series;
        const double base_glucose = 90.0 + 10.0 * gauss(rng);
        const double z0 = 4000.0 + 100.0 * gauss(rng);
        const double phase0 = -30.0 + 1.0 * gauss(rng);
        const double temp0 = 33.0 + 0.5 * gauss(rng);
        const double rh0 = 40.0 + 5.0 * gauss(rng);

        double rh_dev = 0.0;
        double temp_dev = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ts = static_cast<double>(t) * spec.cadence_s;
            double g = base_glucose;
            if (spec.scenario == Scenario::meals) {
                g += 40.0 * detail::meal_bump(ts - 0.5 * 3600.0, 2700.0);
                g += 50.0 * detail::meal_bump(ts - 3.0 * 3600.0, 2700.0);
            }
            const double zmod = z0 * (1.0 - 0.002 * (g - base_glucose)) + 5.0 * gauss(rng);
            const double phase = phase0 + 0.02 * (g - base_glucose) + 0.2 * gauss(rng);
            const double rad = phase * std::numbers::pi / 180.0;
            rh_dev = 0.98 * rh_dev + 0.5 * gauss(rng);
            temp_dev = 0.99 * temp_dev + 0.02 * gauss(rng);
            ser.timestamps.push_back(ts);
            ser.zmod.push_back(zmod);
            ser.zphase.push_back(phase);
            ser.zreal.push_back(zmod * std::cos(rad));
            ser.zimag.push_back(zmod * std::sin(rad));
            ser.rh.push_back(rh0 + rh_dev);
            ser.skin_temp.push_back(temp0 + 0.3 * std::sin(2.0 * std::numbers::pi * ts / (8.0 * 3600.0)) + temp_dev);
        }
        ser.compute_derivatives();

        SubjectTruth& tr = out.truth;
        tr.betas = {-0.125 + 0.01 * gauss(rng), -0.05 + 0.005 * gauss(rng), -0.1 + 0.01 * gauss(rng)};
        tr.intercept = base_glucose - tr.betas[0] * z0 - tr.betas[2] * rh0;
        const auto u = simulate_arma(tr.ar, tr.ma, tr.sigma, n, rng);
        out.glucose.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            out.glucose[t] = tr.intercept + tr.betas[0] * ser.zmod[t] + tr.betas[1] * ser.dzmod[t] +
                             tr.betas[2] * ser.rh[t] + u[t];
        }
        for (double hour : {0.0, 1.0, 4.0, 8.0}) {
            auto idx = static_cast<std::size_t>(std::llround(hour * 3600.0 / spec.cadence_s));
            if (idx >= n) idx = n - 1;
            if (!ser.ref_points.empty() && ser.timestamps[idx] <= ser.ref_points.back().time) continue;
            ser.ref_points.push_back({ser.timestamps[idx], out.glucose[idx]});
        }
        cohort.push_back(std::move(out));
    }
    return cohort;
}

/// Two subjects for AR-order selection: subject 0's zmod is MA(5) around a
/// level, subject 1's dzmod is MA(10) (its zmod is the running sum). All MA
/// coefficients equal `theta`.
inline std::vector<SubjectSeries> order_selection_cohort(std::size_t n, std::uint64_t seed, double theta = 0.08) {
    std::mt19937_64 rng(seed);
    auto make = [&](std::size_t q, bool integrate) {
        const std::vector<double> ma(q, theta);
        const auto x = simulate_arma({}, ma, 1.0, n, rng);
        SubjectSeries s;
        double level = 4000.0;
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t t = 0; t < n; ++t) {
            s.timestamps.push_back(60.0 * static_cast<double>(t));
            const double z = integrate ? (level += (t == 0 ? 0.0 : 10.0 * x[t])) : level + 10.0 * x[t];
            s.zmod.push_back(z);
            s.zphase.push_back(-30.0 + 0.1 * gauss(rng));
            s.zreal.push_back(z * 0.866);
            s.zimag.push_back(-z * 0.5);
            s.skin_temp.push_back(33.0);
            s.rh.push_back(40.0 + gauss(rng));
        }
        s.compute_derivatives();
        return s;
    };
    std::vector<SubjectSeries> out;
    out.push_back(make(5, false));
    out.push_back(make(10, true));
    return out;
}

}  // namespace eiskit::synth
