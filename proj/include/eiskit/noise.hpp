#pragma once

// Biosensor noise model: thermal, kT/C, flicker and interface current noise,
// their composite voltage spectral density, and the post-wetting settling of
// the spectrum over time.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/kv_config.hpp"

namespace eiskit::noise {

inline constexpr double boltzmann = 1.380649e-23;           // J/K
inline constexpr double elementary_charge = 1.602176634e-19;  // C

/// RMS thermal noise voltage of a resistor over a 1 Hz bandwidth.
inline double thermal_noise_rms(double r_ohm, double t_kelvin) {
    if (!(r_ohm >= 0.0)) throw DomainError("thermal noise: resistance must be >= 0");
    detail::require_positive(t_kelvin, "temperature");
    return std::sqrt(4.0 * boltzmann * t_kelvin * r_ohm);
}

/// RMS kT/C noise of a resistor shunted by `c_farad`. An infinite shunt gives 0.
inline double ktc_noise_rms(double c_farad, double t_kelvin) {
    if (!(c_farad > 0.0)) throw DomainError("kT/C noise: capacitance must be > 0");
    detail::require_positive(t_kelvin, "temperature");
    return std::sqrt(boltzmann * t_kelvin / c_farad);
}

/// RMS 1/f noise at frequency `f_hz` for a device with process constant `k`
/// and gate area `w*l` with oxide capacitance per area `c_ox`.
inline double flicker_noise_rms(double k, double w, double l, double c_ox, double f_hz) {
    if (!(f_hz > 0.0)) throw DomainError("flicker noise: frequency must be > 0");
    if (!(w * l * c_ox > 0.0)) throw DomainError("flicker noise: w*l*c_ox must be > 0");
    if (!(k >= 0.0)) throw DomainError("flicker noise: k must be >= 0");
    return std::sqrt((k / (w * l * c_ox)) * (1.0 / f_hz));
}

struct NoiseTermsEnabled {
    bool thermal = true;
    bool interface = true;
    bool ktc = true;
    bool flicker = true;
};

struct NoiseBudget {
    double temperature = 300.0;  // K
    double r_thermal = 0.0;      // ohm, R_s + R_electrode
    double c_asa = std::numeric_limits<double>::infinity();  // F
    double k_flicker = 0.0;
    double w_gate = 1.0;  // m
    double l_gate = 1.0;  // m
    double c_ox = 1.0;    // F/m^2
    int z_valence = 1;
    double q_charge = elementary_charge;
    double i_bias = 0.0;        // A
    double m_omega_tau = 0.0;   // s
    double r_ct = 0.0;          // ohm
    double c_dl = 0.0;          // F
    double bandwidth = 1.0;     // Hz, fixed
    NoiseTermsEnabled enabled{};

    void validate() const {
        detail::require_positive(temperature, "temperature");
        if (bandwidth != 1.0) throw DomainError("noise bandwidth is fixed at 1 Hz");
        detail::require_non_negative(r_thermal, "r_thermal");
        detail::require_positive(c_asa, "c_asa");
        detail::require_non_negative(k_flicker, "k_flicker");
        detail::require_positive(w_gate * l_gate * c_ox, "w_gate*l_gate*c_ox");
        if (z_valence < 0) throw DomainError("z_valence must be >= 0");
        detail::require_non_negative(q_charge, "q_charge");
        detail::require_non_negative(i_bias, "i_bias");
        detail::require_non_negative(m_omega_tau, "m_omega_tau");
        detail::require_non_negative(r_ct, "r_ct");
        detail::require_non_negative(c_dl, "c_dl");
    }
};

/// Budget whose RMS noise at 100 Hz lies between 0.35 % and 2 % of a 10 mV RMS
/// excitation. Resistances and capacitances follow the default sensor circuit.
inline NoiseBudget nominal_budget() {
    NoiseBudget b;
    b.temperature = 300.0;
    b.r_thermal = 100.0 + 5000.0;
    b.c_asa = 0.1e-6;
    b.k_flicker = 1.0e-15;
    b.w_gate = 2.0e-3;
    b.l_gate = 1.0e-3;
    b.c_ox = 1.0e-3;
    b.z_valence = 1;
    b.i_bias = 1.0e-6;
    b.m_omega_tau = 1.0e-3;
    b.r_ct = 10.0e3;
    b.c_dl = 1.0e-6;
    return b;
}

/// Individual voltage PSD contributions in V^2/Hz.
struct NoiseTerms {
    double thermal = 0.0;
    double interface = 0.0;
    double ktc = 0.0;
    double flicker = 0.0;

    double total() const { return thermal + interface + ktc + flicker; }
};

/// |M(w)| of the first-order ion-mobility roll-off.
inline double ion_mobility_gain(double f_hz, double tau) {
    const double wt = 2.0 * std::numbers::pi * f_hz * tau;
    return 1.0 / std::sqrt(1.0 + wt * wt);
}

/// |R_ct || 1/(jwC_dl)|^2, the squared magnitude used to turn the interface
/// current PSD into a voltage PSD.
inline double interface_impedance_sq(double f_hz, double r_ct, double c_dl) {
    const double wrc = 2.0 * std::numbers::pi * f_hz * r_ct * c_dl;
    return r_ct * r_ct / (1.0 + wrc * wrc);
}

inline NoiseTerms composite_noise_terms(const NoiseBudget& b, double f_hz) {
    b.validate();
    if (!(f_hz > 0.0)) throw DomainError("noise PSD: frequency must be > 0");
    const double kt = boltzmann * b.temperature;
    NoiseTerms t;
    if (b.enabled.thermal) t.thermal = 4.0 * kt * b.r_thermal;
    if (b.enabled.interface) {
        t.interface = 2.0 * b.z_valence * b.q_charge * b.i_bias *
                      ion_mobility_gain(f_hz, b.m_omega_tau) *
                      interface_impedance_sq(f_hz, b.r_ct, b.c_dl);
    }
    if (b.enabled.ktc) t.ktc = kt / b.c_asa;
    if (b.enabled.flicker) t.flicker = (b.k_flicker / (b.w_gate * b.l_gate * b.c_ox)) / f_hz;
    return t;
}

/// Total voltage PSD in V^2/Hz.
inline double composite_noise_psd(const NoiseBudget& b, double f_hz) {
    return composite_noise_terms(b, f_hz).total();
}

/// RMS noise voltage over the budget's bandwidth at `f_hz`.
inline double composite_noise_rms(const NoiseBudget& b, double f_hz) {
    return std::sqrt(composite_noise_psd(b, f_hz) * b.bandwidth);
}

/// RMS noise spectra after wetting: row i holds the spectrum over `f_grid`
/// at time `t_points[i]`, scaled by (1 + amplitude * exp(-t / decay_tau)).
inline std::vector<std::vector<double>> noise_settling_series(const NoiseBudget& b,
                                                              std::span<const double> f_grid,
                                                              std::span<const double> t_points,
                                                              double decay_tau,
                                                              double amplitude = 3.0) {
    if (f_grid.empty() || t_points.empty()) throw DomainError("noise settling: empty grid");
    detail::require_positive(decay_tau, "decay_tau");
    detail::require_non_negative(amplitude, "settling amplitude");
    for (std::size_t i = 1; i < t_points.size(); ++i) {
        if (!(t_points[i] > t_points[i - 1])) {
            throw DomainError("noise settling: t_points must be strictly increasing");
        }
    }
    std::vector<double> baseline;
    baseline.reserve(f_grid.size());
    for (double f : f_grid) baseline.push_back(composite_noise_rms(b, f));

    std::vector<std::vector<double>> out;
    out.reserve(t_points.size());
    for (double t : t_points) {
        const double scale = 1.0 + amplitude * std::exp(-t / decay_tau);
        std::vector<double> row(baseline);
        for (double& v : row) v *= scale;
        out.push_back(std::move(row));
    }
    return out;
}

/// Log-spaced frequency grid from fmin to fmax inclusive.
inline std::vector<double> log_grid(double fmin, double fmax, std::size_t points) {
    detail::require_positive(fmin, "fmin");
    if (!(fmax > fmin)) throw DomainError("fmax must exceed fmin");
    if (points < 2) throw DomainError("grid needs at least 2 points");
    std::vector<double> g(points);
    const double a = std::log10(fmin);
    const double b = std::log10(fmax);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    g.front() = fmin;
    g.back() = fmax;
    return g;
}

/// Reads a budget from key=value text. Missing keys keep the NoiseBudget defaults.
inline NoiseBudget budget_from_config(const KeyValueConfig& cfg) {
    cfg.require_only({"temperature_k", "r_thermal_ohm", "c_asa_f", "k_flicker", "w_gate_m",
                      "l_gate_m", "c_ox_f_per_m2", "z_valence", "q_charge_c", "i_bias_a",
                      "m_omega_tau_s", "r_ct_ohm", "c_dl_f", "bandwidth_hz", "enable_thermal",
                      "enable_interface", "enable_ktc", "enable_flicker"},
                     "noise budget");
    NoiseBudget b;
    b.temperature = cfg.get_double("temperature_k", b.temperature);
    b.r_thermal = cfg.get_double("r_thermal_ohm", b.r_thermal);
    b.c_asa = cfg.get_double("c_asa_f", b.c_asa);
    b.k_flicker = cfg.get_double("k_flicker", b.k_flicker);
    b.w_gate = cfg.get_double("w_gate_m", b.w_gate);
    b.l_gate = cfg.get_double("l_gate_m", b.l_gate);
    b.c_ox = cfg.get_double("c_ox_f_per_m2", b.c_ox);
    b.z_valence = static_cast<int>(cfg.get_int("z_valence", b.z_valence));
    b.q_charge = cfg.get_double("q_charge_c", b.q_charge);
    b.i_bias = cfg.get_double("i_bias_a", b.i_bias);
    b.m_omega_tau = cfg.get_double("m_omega_tau_s", b.m_omega_tau);
    b.r_ct = cfg.get_double("r_ct_ohm", b.r_ct);
    b.c_dl = cfg.get_double("c_dl_f", b.c_dl);
    b.bandwidth = cfg.get_double("bandwidth_hz", b.bandwidth);
    b.enabled.thermal = cfg.get_int("enable_thermal", 1) != 0;
    b.enabled.interface = cfg.get_int("enable_interface", 1) != 0;
    b.enabled.ktc = cfg.get_int("enable_ktc", 1) != 0;
    b.enabled.flicker = cfg.get_int("enable_flicker", 1) != 0;
    b.validate();
    return b;
}

}  // namespace eiskit::noise
