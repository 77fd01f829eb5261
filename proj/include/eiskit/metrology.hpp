#pragma once

// Error and performance algebra: noisy-measurement synthesis, MARD, accuracy,
// mismatch, device and sensor figures of merit, average current, battery life.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/kv_config.hpp"

namespace eiskit::metrology {

/// G_hat = G (1 + b/100 + (cv/100) eps), eps ~ N(0,1). Percent inputs.
class MardModel {
public:
    MardModel(double bias_pct, double cv_pct, std::uint64_t seed)
        : bias_pct_(bias_pct), cv_pct_(cv_pct), rng_(seed) {
        detail::require_finite(bias_pct, "bias_pct");
        detail::require_non_negative(cv_pct, "cv_pct");
    }

    double bias_pct() const { return bias_pct_; }
    double cv_pct() const { return cv_pct_; }

    std::vector<double> synthesize_noisy(double g_true, std::size_t n) {
        detail::require_positive(g_true, "g_true");
        if (n < 1) throw DomainError("synthesize_noisy: n must be >= 1");
        std::normal_distribution<double> eps(0.0, 1.0);
        std::vector<double> out(n);
        for (double& g : out) g = g_true * (1.0 + bias_pct_ / 100.0 + (cv_pct_ / 100.0) * eps(rng_));
        return out;
    }

private:
    double bias_pct_;
    double cv_pct_;
    std::mt19937_64 rng_;
};

/// Combined bias of uncorrelated sources, which add in percent.
inline double combine_bias_pct(std::span<const double> sources_pct) {
    double s = 0.0;
    for (double b : sources_pct) s += b;
    return s;
}

/// 100 * mean(|pred - ref| / ref).
inline double mard(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size()) throw DataError("mard: length mismatch");
    if (pred.empty()) throw DataError("mard: empty series");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(ref[i] > 0.0)) throw DataError("mard: reference values must be > 0");
        acc += std::abs(pred[i] - ref[i]) / ref[i];
    }
    return 100.0 * acc / static_cast<double>(pred.size());
}

struct PowerProfile {
    double i_sleep = 0.0;            // A
    double t_sleep = 0.0;            // s
    double i_active = 0.0;           // A
    double t_active = 0.0;           // s
    double v_batt = 3.7;             // V
    double battery_capacity = 0.3;   // Ah
    int n_channels = 4;
    int points_per_cycle = 10;
    int n_bits = 16;
    double f_s = 1.0 / 0.013;        // Hz, one conversion per 13 ms

    double t_total() const { return t_sleep + t_active; }
};

inline double average_current(const PowerProfile& p) {
    detail::require_non_negative(p.i_sleep, "i_sleep");
    detail::require_non_negative(p.i_active, "i_active");
    detail::require_non_negative(p.t_sleep, "t_sleep");
    detail::require_non_negative(p.t_active, "t_active");
    const double t = p.t_total();
    if (!(t > 0.0)) throw DomainError("average_current: t_total must be > 0");
    return p.i_sleep * p.t_sleep / t + p.i_active * p.t_active / t;
}

/// Battery lifetime in hours for a given average current (A).
inline double battery_life_hours(double capacity_ah, double i_avg) {
    detail::require_non_negative(capacity_ah, "battery_capacity");
    if (!(i_avg > 0.0)) throw DomainError("battery_life: average current must be > 0");
    return capacity_ah / i_avg;
}

inline double battery_life(const PowerProfile& p) {
    return battery_life_hours(p.battery_capacity, average_current(p));
}

/// Energy per point: n p V I_avg / (f_s 2^NBITS), in joules.
inline double fom_device(const PowerProfile& p, double i_avg) {
    detail::require_positive(p.f_s, "f_s");
    detail::require_non_negative(i_avg, "i_avg");
    if (p.n_bits < 0) throw DomainError("n_bits must be >= 0");
    return static_cast<double>(p.n_channels) * static_cast<double>(p.points_per_cycle) * p.v_batt *
           i_avg / (p.f_s * std::ldexp(1.0, p.n_bits));
}

/// Average current that yields `fom_joule_per_point`; inverse of fom_device.
inline double current_for_fom(const PowerProfile& p, double fom_joule_per_point) {
    detail::require_positive(p.f_s, "f_s");
    const double denom = static_cast<double>(p.n_channels) * p.points_per_cycle * p.v_batt;
    if (!(denom > 0.0)) throw DomainError("current_for_fom: n p V must be > 0");
    return fom_joule_per_point * p.f_s * std::ldexp(1.0, p.n_bits) / denom;
}

struct SensorFigures {
    double ldr_pct = 0.0;
    double sst_pct = 0.0;
};

inline double fom_sensor(const SensorFigures& s) {
    if (!(s.sst_pct > 0.0)) throw DomainError("fom_sensor: sst_pct must be > 0");
    return s.ldr_pct / s.sst_pct;
}

/// (x - x_true) / x_true.
inline double accuracy(double x, double x_true) {
    if (x_true == 0.0) throw DomainError("accuracy: true value is zero");
    return (x - x_true) / x_true;
}

/// Relative deviation of the measured ratio x2/x1 from the ideal ratio X2/X1.
inline double mismatch(double x1, double x_true1, double x2, double x_true2) {
    if (x1 == 0.0 || x_true1 == 0.0 || x_true2 == 0.0) {
        throw DomainError("mismatch: zero denominator");
    }
    const double ideal = x_true2 / x_true1;
    return (x2 / x1 - ideal) / ideal;
}

/// Reads a power profile (and optional sensor figures) from key=value text.
/// Capacity is given in mAh; f_s either directly or as t_conversion_s.
inline PowerProfile profile_from_config(const KeyValueConfig& cfg) {
    cfg.require_only({"i_sleep_a", "t_sleep_s", "i_active_a", "t_active_s", "v_batt_v",
                      "capacity_mah", "n_channels", "points_per_cycle", "n_bits", "f_s_hz",
                      "t_conversion_s", "ldr_pct", "sst_pct", "i_avg_a"},
                     "power profile");
    PowerProfile p;
    p.i_sleep = cfg.get_double("i_sleep_a", p.i_sleep);
    p.t_sleep = cfg.get_double("t_sleep_s", p.t_sleep);
    p.i_active = cfg.get_double("i_active_a", p.i_active);
    p.t_active = cfg.get_double("t_active_s", p.t_active);
    p.v_batt = cfg.get_double("v_batt_v", p.v_batt);
    p.battery_capacity = cfg.get_double("capacity_mah", p.battery_capacity * 1000.0) / 1000.0;
    p.n_channels = static_cast<int>(cfg.get_int("n_channels", p.n_channels));
    p.points_per_cycle = static_cast<int>(cfg.get_int("points_per_cycle", p.points_per_cycle));
    p.n_bits = static_cast<int>(cfg.get_int("n_bits", p.n_bits));
    if (cfg.has("f_s_hz") && cfg.has("t_conversion_s")) {
        throw ConfigError("power profile: give f_s_hz or t_conversion_s, not both");
    }
    if (cfg.has("f_s_hz")) p.f_s = cfg.get_double("f_s_hz");
    if (cfg.has("t_conversion_s")) {
        const double t = cfg.get_double("t_conversion_s");
        if (!(t > 0.0)) throw ConfigError("t_conversion_s must be > 0");
        p.f_s = 1.0 / t;
    }
    return p;
}

}  // namespace eiskit::metrology
