#pragma once

// Ratiometric single-bin DFT impedance analyzer with time-division multiplexing
// over several sensor channels and injectable instrumentation error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eiskit/circuit.hpp"
#include "eiskit/error.hpp"
#include "eiskit/kv_config.hpp"
#include "eiskit/noise.hpp"

namespace eiskit::dft {

/// X[bin] = sum_k x[k] exp(-j 2 pi k bin / N) via the Goertzel recurrence.
inline Complex single_bin_dft(std::span<const double> samples, std::size_t bin) {
    const std::size_t n = samples.size();
    if (2 * bin >= n) throw IndexError("single_bin_dft: bin out of range");
    const double w = 2.0 * std::numbers::pi * static_cast<double>(bin) / static_cast<double>(n);
    const double coeff = 2.0 * std::cos(w);
    double s1 = 0.0;
    double s2 = 0.0;
    for (double x : samples) {
        const double s0 = x + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    // y = s[N-1] - e^{-jw} s[N-2] = sum x[k] e^{jw(N-1-k)}
    const Complex y = Complex(s1, 0.0) - std::polar(1.0, -w) * s2;
    return y * std::polar(1.0, -w * static_cast<double>(n - 1));
}

struct AnalyzerConfig {
    double f_excite = 100.0;        // Hz
    double v_rms = 0.010;           // V
    double fs_sample = 16000.0;     // Hz, requested; the analyzer snaps it to coherence
    std::size_t n_dft = 2048;
    std::size_t n_channels = 4;
    double t_conversion = 0.013;    // s per measurement
    double gain_offset_pct = 0.0;   // systematic multiplicative offset, percent
    double channel_jitter_ohm = 0.0;  // std-dev of the fixed per-channel error
    std::uint64_t rng_seed = 0;
    std::optional<noise::NoiseBudget> noise{};  // per-sample waveform noise

    void validate() const {
        detail::require_positive(f_excite, "f_excite");
        detail::require_positive(v_rms, "v_rms");
        detail::require_positive(fs_sample, "fs_sample");
        if (n_dft < 16) throw ConfigError("n_dft must be >= 16");
        if (n_channels < 1) throw ConfigError("n_channels must be >= 1");
        if (!(t_conversion > 0.0)) throw ConfigError("t_conversion must be > 0");
        detail::require_finite(gain_offset_pct, "gain_offset_pct");
        detail::require_non_negative(channel_jitter_ohm, "channel_jitter_ohm");
    }

    /// -1.25 % loop offset and a per-channel spread whose expected range over
    /// four channels is 150 ohm (150 / d2(4), d2(4) = 2.058751 the mean range
    /// of four standard normals).
    static AnalyzerConfig calibration_preset(std::uint64_t seed) {
        AnalyzerConfig c;
        c.gain_offset_pct = -1.25;
        c.channel_jitter_ohm = 150.0 / 2.058751;
        c.rng_seed = seed;
        return c;
    }
};

/// Reads analyzer settings from key=value text; unspecified keys keep defaults.
inline AnalyzerConfig analyzer_from_config(const KeyValueConfig& cfg) {
    cfg.require_only({"f_excite_hz", "v_rms_v", "fs_sample_hz", "n_dft", "n_channels",
                      "t_conversion_s", "gain_offset_pct", "channel_jitter_ohm", "rng_seed",
                      "z_cal_ohm"},
                     "analyzer config");
    AnalyzerConfig c;
    c.f_excite = cfg.get_double("f_excite_hz", c.f_excite);
    c.v_rms = cfg.get_double("v_rms_v", c.v_rms);
    c.fs_sample = cfg.get_double("fs_sample_hz", c.fs_sample);
    const auto n_dft = cfg.get_int("n_dft", static_cast<long long>(c.n_dft));
    const auto n_ch = cfg.get_int("n_channels", static_cast<long long>(c.n_channels));
    if (n_dft < 0 || n_ch < 0) throw ConfigError("n_dft and n_channels must be non-negative");
    c.n_dft = static_cast<std::size_t>(n_dft);
    c.n_channels = static_cast<std::size_t>(n_ch);
    c.t_conversion = cfg.get_double("t_conversion_s", c.t_conversion);
    c.gain_offset_pct = cfg.get_double("gain_offset_pct", c.gain_offset_pct);
    c.channel_jitter_ohm = cfg.get_double("channel_jitter_ohm", c.channel_jitter_ohm);
    c.rng_seed = static_cast<std::uint64_t>(cfg.get_int("rng_seed", 0));
    c.validate();
    return c;
}

struct Measurement {
    std::size_t channel = 0;
    double timestamp = 0.0;  // s
    double freq_hz = 0.0;
    Complex z{};
    double zmod = 0.0;    // ohm
    double zphase = 0.0;  // degrees in (-180, 180]

    static Measurement from(std::size_t channel, double t, double f, Complex z) {
        double deg = std::arg(z) * 180.0 / std::numbers::pi;
        if (deg <= -180.0) deg += 360.0;
        return Measurement{channel, t, f, z, std::abs(z), deg};
    }
};

/// One analyzer instance. Holds the per-channel error pattern and the RNG used
/// for waveform noise, so it is not shareable across threads.
class Analyzer {
public:
    Analyzer(AnalyzerConfig cfg, CalCell cal) : cfg_(std::move(cfg)), cal_(cal), rng_(cfg_.rng_seed) {
        cfg_.validate();
        const double exact = cfg_.f_excite * static_cast<double>(cfg_.n_dft) / cfg_.fs_sample;
        bin_ = static_cast<std::size_t>(std::llround(exact));
        if (bin_ < 1) bin_ = 1;
        fs_ = cfg_.f_excite * static_cast<double>(cfg_.n_dft) / static_cast<double>(bin_);
        if (2 * bin_ >= cfg_.n_dft) throw ConfigError("excitation frequency at or above Nyquist");
        cfg_.fs_sample = fs_;

        std::normal_distribution<double> gauss(0.0, 1.0);
        channel_error_.resize(cfg_.n_channels);
        for (double& e : channel_error_) e = cfg_.channel_jitter_ohm * gauss(rng_);
    }

    const AnalyzerConfig& config() const { return cfg_; }
    double fs_sample() const { return fs_; }
    /// DFT bin index of the excitation frequency.
    std::size_t excitation_bin() const { return bin_; }
    double bin_width() const { return fs_ / static_cast<double>(cfg_.n_dft); }
    const std::vector<double>& channel_errors() const { return channel_error_; }
    double clock() const { return clock_; }

    /// DFT bin of `f_hz`; throws unless f_hz sits exactly on a bin below Nyquist.
    std::size_t bin_of(double f_hz) const {
        detail::require_positive(f_hz, "frequency");
        const double exact = f_hz / bin_width();
        const double rounded = std::round(exact);
        if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact) || rounded < 1.0) {
            throw ConfigError("frequency " + std::to_string(f_hz) +
                              " Hz is not aligned to a DFT bin (bin width " +
                              std::to_string(bin_width()) + " Hz)");
        }
        const auto b = static_cast<std::size_t>(rounded);
        if (2 * b >= cfg_.n_dft) throw ConfigError("frequency at or above Nyquist");
        return b;
    }

    /// Measures `dut` on `channel` at `f_hz`, advancing the clock by one conversion.
    template <ImpedanceSource S>
    Measurement measure(const S& dut, std::size_t channel, double f_hz) {
        if (channel >= cfg_.n_channels) throw IndexError("channel index out of range");
        const std::size_t bin = bin_of(f_hz);

        WaveformSpec spec;
        spec.f_hz = f_hz;
        spec.v_rms = cfg_.v_rms;
        spec.fs_sample = fs_;
        spec.n_samples = cfg_.n_dft;
        spec.noise = cfg_.noise;
        spec.seed = rng_();
        const auto i_cal = synthesize_waveform(cal_, spec);
        spec.seed = rng_();
        const auto i_dut = synthesize_waveform(dut, spec);

        const Complex x_cal = single_bin_dft(i_cal, bin);
        const Complex x_dut = single_bin_dft(i_dut, bin);
        if (!(std::abs(x_dut) > 1e-12 * std::abs(x_cal)) || !(std::abs(x_dut) > 1e-300)) {
            throw NumericalError("measurement underflow: DUT current bin below numeric floor");
        }
        Complex z = cal_.z_cal * (x_cal / x_dut);
        z *= 1.0 + cfg_.gain_offset_pct / 100.0;
        const double mag = std::abs(z);
        if (mag > 0.0) z *= std::max(0.0, mag + channel_error_[channel]) / mag;

        clock_ += cfg_.t_conversion;
        return Measurement::from(channel, clock_, f_hz, z);
    }

    /// Round-robin sweep: for each frequency, every channel in order.
    template <ImpedanceSource S>
    std::vector<Measurement> sweep(std::span<const S> duts, std::span<const double> frequencies) {
        if (duts.empty() || duts.size() > cfg_.n_channels) {
            throw ConfigError("tdm sweep needs between 1 and n_channels devices");
        }
        if (frequencies.empty()) throw ConfigError("tdm sweep needs at least one frequency");
        for (double f : frequencies) (void)bin_of(f);
        std::vector<Measurement> out;
        out.reserve(duts.size() * frequencies.size());
        for (double f : frequencies) {
            for (std::size_t ch = 0; ch < duts.size(); ++ch) out.push_back(measure(duts[ch], ch, f));
        }
        return out;
    }

private:
    AnalyzerConfig cfg_;
    CalCell cal_;
    std::mt19937_64 rng_;
    std::size_t bin_ = 1;
    double fs_ = 0.0;
    double clock_ = 0.0;
    std::vector<double> channel_error_;
};

/// One measurement of `dut` on channel 0 at the excitation frequency with a
/// fresh analyzer.
template <ImpedanceSource S>
Measurement measure_ratiometric(const AnalyzerConfig& cfg, const CalCell& cal, const S& dut) {
    Analyzer a(cfg, cal);
    return a.measure(dut, 0, cfg.f_excite);
}

template <ImpedanceSource S>
std::vector<Measurement> tdm_sweep(const AnalyzerConfig& cfg, const CalCell& cal,
                                   std::span<const S> duts, std::span<const double> frequencies) {
    Analyzer a(cfg, cal);
    return a.sweep(duts, frequencies);
}

}  // namespace eiskit::dft
