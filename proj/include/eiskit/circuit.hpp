#pragma once

// Lumped-element equivalent circuits of the biosensor and the calibration cell,
// plus synthesis of the current waveform each draws under sine excitation.

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/kv_config.hpp"
#include "eiskit/noise.hpp"

namespace eiskit {

using Complex = std::complex<double>;

/// Anything that has a complex impedance at a given frequency.
template <typename T>
concept ImpedanceSource = requires(const T& s, double f) {
    { s.impedance_at(f) } -> std::convertible_to<Complex>;
};

namespace detail {

/// R || C. A zero resistance or infinite capacitance shorts the branch; a
/// zero capacitance leaves the bare resistor.
inline Complex parallel_rc(double r, double c, double omega) {
    if (r == 0.0 || std::isinf(c)) return {0.0, 0.0};
    if (c == 0.0) return {r, 0.0};
    return r / Complex(1.0, omega * r * c);
}

}  // namespace detail

/// Series chain R_s + (R_ct || C_dl) + (R_asa || C_asa).
struct CircuitModel {
    double r_s = 100.0;      // solution resistance, ohm
    double r_ct = 10.0e3;    // charge-transfer resistance, ohm
    double c_dl = 1.0e-6;    // double-layer capacitance, F
    double r_asa = 5.0e3;    // semiconducting film resistance, ohm
    double c_asa = 0.1e-6;   // semiconducting film capacitance, F

    /// Resistances must be finite and non-negative (R_s strictly positive);
    /// capacitances non-negative, with +inf meaning a short.
    void validate() const {
        detail::require_positive(r_s, "r_s");
        detail::require_finite(r_s, "r_s");
        detail::require_non_negative(r_ct, "r_ct");
        detail::require_finite(r_ct, "r_ct");
        detail::require_non_negative(r_asa, "r_asa");
        detail::require_finite(r_asa, "r_asa");
        detail::require_non_negative(c_dl, "c_dl");
        detail::require_non_negative(c_asa, "c_asa");
    }

    Complex impedance_at(double f_hz) const {
        if (!(f_hz > 0.0)) throw DomainError("impedance_at: frequency must be > 0");
        validate();
        const double omega = 2.0 * std::numbers::pi * f_hz;
        const Complex z = Complex(r_s, 0.0) + detail::parallel_rc(r_ct, c_dl, omega) +
                          detail::parallel_rc(r_asa, c_asa, omega);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw DomainError("impedance_at: non-finite impedance");
        }
        return z;
    }

    /// A bare resistor expressed in this topology.
    static CircuitModel resistor(double r_ohm) { return CircuitModel{r_ohm, 0.0, 0.0, 0.0, 0.0}; }

    /// Default sensor parameter set.
    static CircuitModel sensor_default() { return CircuitModel{}; }

    friend bool operator==(const CircuitModel&, const CircuitModel&) = default;
};

/// Precision calibration resistor; purely real at every frequency.
struct CalCell {
    double z_cal = 3990.0;

    Complex impedance_at(double f_hz) const {
        if (!(f_hz > 0.0)) throw DomainError("impedance_at: frequency must be > 0");
        detail::require_positive(z_cal, "z_cal");
        detail::require_finite(z_cal, "z_cal");
        return {z_cal, 0.0};
    }
};

template <ImpedanceSource S>
Complex impedance_at(const S& source, double f_hz) {
    return source.impedance_at(f_hz);
}

/// Reads a circuit from key=value text with exactly the keys
/// r_s_ohm, r_ct_ohm, c_dl_f, r_asa_ohm, c_asa_f.
inline CircuitModel circuit_from_config(const KeyValueConfig& cfg) {
    cfg.require_only({"r_s_ohm", "r_ct_ohm", "c_dl_f", "r_asa_ohm", "c_asa_f"}, "circuit preset");
    CircuitModel m{cfg.get_double("r_s_ohm"), cfg.get_double("r_ct_ohm"), cfg.get_double("c_dl_f"),
                   cfg.get_double("r_asa_ohm"), cfg.get_double("c_asa_f")};
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("circuit preset: ") + e.what());
    }
    return m;
}

/// Built-in presets: "sensor", "dummy-cell" (3990 ohm), "resistor-4k".
inline std::optional<CircuitModel> builtin_circuit(const std::string& name) {
    if (name == "sensor") return CircuitModel::sensor_default();
    if (name == "dummy-cell") return CircuitModel::resistor(3990.0);
    if (name == "resistor-4k") return CircuitModel::resistor(4000.0);
    return std::nullopt;
}

struct WaveformSpec {
    double f_hz = 100.0;
    double v_rms = 0.010;
    double fs_sample = 16000.0;
    std::size_t n_samples = 2048;
    std::uint64_t seed = 0;
    std::optional<noise::NoiseBudget> noise{};
};

/// Current drawn by `source` under a v_rms sine at f_hz, sampled at fs_sample:
/// i[k] = sqrt(2) v_rms / |Z| sin(2 pi f k / fs - arg Z), plus white Gaussian
/// current noise of standard deviation v_noise(f) / |Z| when a budget is given.
template <ImpedanceSource S>
std::vector<double> synthesize_waveform(const S& source, const WaveformSpec& spec) {
    detail::require_positive(spec.f_hz, "f");
    detail::require_positive(spec.v_rms, "v_rms");
    if (!(spec.fs_sample > 2.0 * spec.f_hz)) {
        throw ConfigError("synthesize_waveform: fs_sample must exceed 2 f (aliasing)");
    }
    if (spec.n_samples < 16) throw ConfigError("synthesize_waveform: n_samples must be >= 16");

    const Complex z = source.impedance_at(spec.f_hz);
    const double mag = std::abs(z);
    if (!(mag > 0.0)) throw DomainError("synthesize_waveform: zero impedance");
    const double amplitude = std::numbers::sqrt2 * spec.v_rms / mag;
    const double phase = -std::arg(z);
    const double step = 2.0 * std::numbers::pi * spec.f_hz / spec.fs_sample;

    std::vector<double> out(spec.n_samples);
    for (std::size_t k = 0; k < spec.n_samples; ++k) {
        out[k] = amplitude * std::sin(step * static_cast<double>(k) + phase);
    }
    if (spec.noise) {
        const double sigma = noise::composite_noise_rms(*spec.noise, spec.f_hz) / mag;
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : out) v += sigma * gauss(rng);
    }
    return out;
}

}  // namespace eiskit
