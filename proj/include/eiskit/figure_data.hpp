#pragma once

// Table schemas for every file the toolkit reads or writes, with conversions
// between in-memory results and csv::Table.
//
//   sweep           channel,timestamp_s,freq_hz,zreal_ohm,zimag_ohm,zmod_ohm,zphase_deg
//   noise_spectrum  freq_hz,psd_v2_per_hz,term_thermal,term_interface,term_ktc,term_flicker
//   noise_settling  time_s,freq_hz,v_rms
//   cdr             ph,concentration_mg_dl,mean_delta_z_pct,sem_pct,n
//   box             concentration_mg_dl,n,q1,median,q3,iqr,whisker_lo,whisker_hi
//   acf             lag,r,band_lo,band_hi
//   prediction      timestamp_s,reference_mg_dl,predicted_mg_dl,residual_mg_dl
//   histogram       bin_left,count
//   series          timestamp_s,zreal_ohm,zimag_ohm,zmod_ohm,zphase_deg,skin_temp_c,rh_pct
//   reference       time_s,glucose_mg_dl
//   dose            concentration_mg_dl,ph,replicate,zmod_ohm,zbaseline_ohm
//   glucose         timestamp_s,glucose_mg_dl

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eiskit/csv.hpp"
#include "eiskit/dft.hpp"
#include "eiskit/dose.hpp"
#include "eiskit/noise.hpp"
#include "eiskit/regarima.hpp"
#include "eiskit/subject.hpp"
#include "eiskit/timeseries.hpp"

namespace eiskit::figures {

enum class Kind { sweep, noise_spectrum, cdr, box, acf, prediction, histogram };

inline std::string schema_name(Kind k) {
    switch (k) {
        case Kind::sweep: return "sweep";
        case Kind::noise_spectrum: return "noise_spectrum";
        case Kind::cdr: return "cdr";
        case Kind::box: return "box";
        case Kind::acf: return "acf";
        case Kind::prediction: return "prediction";
        case Kind::histogram: return "histogram";
    }
    return "unknown";
}

// ---- sweep -----------------------------------------------------------------

inline csv::Table sweep_table(std::span<const dft::Measurement> ms) {
    csv::Table t{"sweep", {"channel", "timestamp_s", "freq_hz", "zreal_ohm", "zimag_ohm", "zmod_ohm", "zphase_deg"}, {}};
    for (const auto& m : ms) {
        t.rows.push_back({static_cast<double>(m.channel), m.timestamp, m.freq_hz, m.z.real(), m.z.imag(), m.zmod, m.zphase});
    }
    return t;
}

inline std::vector<dft::Measurement> sweep_from(const csv::Table& t) {
    const auto ch = t.index_of("channel"), ts_ = t.index_of("timestamp_s"), f = t.index_of("freq_hz");
    const auto re = t.index_of("zreal_ohm"), im = t.index_of("zimag_ohm");
    const auto mod = t.index_of("zmod_ohm"), ph = t.index_of("zphase_deg");
    std::vector<dft::Measurement> out;
    for (const auto& r : t.rows) {
        if (!(r[ch] >= 0.0) || r[ch] != std::floor(r[ch])) throw DataError("sweep: channel must be a non-negative integer");
        out.push_back({static_cast<std::size_t>(r[ch]), r[ts_], r[f], Complex(r[re], r[im]), r[mod], r[ph]});
    }
    return out;
}

// ---- noise -----------------------------------------------------------------

inline csv::Table noise_spectrum_table(const noise::NoiseBudget& b, std::span<const double> freqs) {
    csv::Table t{"noise_spectrum",
                 {"freq_hz", "psd_v2_per_hz", "term_thermal", "term_interface", "term_ktc", "term_flicker"}, {}};
    for (double f : freqs) {
        const auto terms = noise::composite_noise_terms(b, f);
        t.rows.push_back({f, terms.total(), terms.thermal, terms.interface, terms.ktc, terms.flicker});
    }
    return t;
}

inline csv::Table noise_settling_table(std::span<const double> times, std::span<const double> freqs,
                                       const std::vector<std::vector<double>>& rms) {
    csv::Table t{"noise_settling", {"time_s", "freq_hz", "v_rms"}, {}};
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = 0; j < freqs.size(); ++j) t.rows.push_back({times[i], freqs[j], rms[i][j]});
    }
    return t;
}

// ---- dose ------------------------------------------------------------------

inline csv::Table cdr_table(std::span<const dose::DoseSummary> s) {
    csv::Table t{"cdr", {"ph", "concentration_mg_dl", "mean_delta_z_pct", "sem_pct", "n"}, {}};
    for (const auto& d : s) {
        t.rows.push_back({d.ph, d.concentration, d.mean,
                          d.sem ? *d.sem : std::numeric_limits<double>::quiet_NaN(), static_cast<double>(d.n)});
    }
    return t;
}

struct BoxRow {
    double concentration = 0.0;
    dose::BoxStats stats;
};

inline csv::Table box_table(std::span<const BoxRow> rows) {
    csv::Table t{"box", {"concentration_mg_dl", "n", "q1", "median", "q3", "iqr", "whisker_lo", "whisker_hi"}, {}};
    for (const auto& r : rows) {
        const auto& s = r.stats;
        t.rows.push_back({r.concentration, static_cast<double>(s.n), s.q1, s.median, s.q3, s.iqr, s.whisker_lo, s.whisker_hi});
    }
    return t;
}

inline std::vector<dose::DoseResponsePoint> dose_points_from(const csv::Table& t) {
    const auto c = t.index_of("concentration_mg_dl"), ph = t.index_of("ph"), rep = t.index_of("replicate");
    const auto z = t.index_of("zmod_ohm"), zb = t.index_of("zbaseline_ohm");
    std::vector<dose::DoseResponsePoint> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (!(r[zb] > 0.0)) {
            throw DataError("dose row " + std::to_string(i + 1) + " column 'zbaseline_ohm': must be > 0");
        }
        out.push_back({r[c], r[ph], dose::percent_delta_z(r[z], r[zb]), static_cast<int>(r[rep])});
    }
    return out;
}

// ---- time series -----------------------------------------------------------

inline csv::Table acf_table(const ts::AcfResult& a) {
    csv::Table t{"acf", {"lag", "r", "band_lo", "band_hi"}, {}};
    for (std::size_t k = 0; k < a.r.size(); ++k) t.rows.push_back({static_cast<double>(k), a.r[k], -a.band, a.band});
    return t;
}

inline ts::AcfResult acf_from(const csv::Table& t) {
    ts::AcfResult a;
    a.r = t.column("r");
    const auto hi = t.column("band_hi");
    a.band = hi.empty() ? 0.0 : hi.front();
    if (a.band > 0.0) a.n = static_cast<std::size_t>(std::llround(9.0 / (a.band * a.band)));
    return a;
}

inline csv::Table prediction_table(const regarima::Prediction& p) {
    csv::Table t{"prediction", {"timestamp_s", "reference_mg_dl", "predicted_mg_dl", "residual_mg_dl"}, {}};
    for (std::size_t i = 0; i < p.timestamps.size(); ++i) {
        t.rows.push_back({p.timestamps[i], p.target[i], p.fitted[i], p.residuals[i]});
    }
    return t;
}

inline regarima::Prediction prediction_from(const csv::Table& t) {
    regarima::Prediction p;
    p.timestamps = t.column("timestamp_s");
    p.target = t.column("reference_mg_dl");
    p.fitted = t.column("predicted_mg_dl");
    p.residuals = t.column("residual_mg_dl");
    return p;
}

inline csv::Table histogram_table(const ts::Histogram& h) {
    csv::Table t{"histogram", {"bin_left", "count"}, {}};
    for (std::size_t i = 0; i < h.counts.size(); ++i) t.rows.push_back({h.edges[i], static_cast<double>(h.counts[i])});
    return t;
}

// ---- subject inputs --------------------------------------------------------

inline SubjectSeries series_from(const csv::Table& t) {
    SubjectSeries s;
    s.timestamps = t.column("timestamp_s");
    s.zreal = t.column("zreal_ohm");
    s.zimag = t.column("zimag_ohm");
    s.zmod = t.column("zmod_ohm");
    s.zphase = t.column("zphase_deg");
    s.skin_temp = t.column("skin_temp_c");
    s.rh = t.column("rh_pct");
    s.compute_derivatives();
    return s;
}

inline csv::Table series_table(const SubjectSeries& s) {
    csv::Table t{"series", {"timestamp_s", "zreal_ohm", "zimag_ohm", "zmod_ohm", "zphase_deg", "skin_temp_c", "rh_pct"}, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
        t.rows.push_back({s.timestamps[i], s.zreal[i], s.zimag[i], s.zmod[i], s.zphase[i], s.skin_temp[i], s.rh[i]});
    }
    return t;
}

inline std::vector<ts::RefPoint> reference_from(const csv::Table& t) {
    const auto time = t.column("time_s");
    const auto g = t.column("glucose_mg_dl");
    std::vector<ts::RefPoint> out;
    for (std::size_t i = 0; i < time.size(); ++i) out.push_back({time[i], g[i]});
    return out;
}

inline csv::Table reference_table(std::span<const ts::RefPoint> ref) {
    csv::Table t{"reference", {"time_s", "glucose_mg_dl"}, {}};
    for (const auto& r : ref) t.rows.push_back({r.time, r.glucose});
    return t;
}

inline csv::Table glucose_table(std::span<const double> timestamps, std::span<const double> glucose) {
    csv::Table t{"glucose", {"timestamp_s", "glucose_mg_dl"}, {}};
    for (std::size_t i = 0; i < timestamps.size(); ++i) t.rows.push_back({timestamps[i], glucose[i]});
    return t;
}

}  // namespace eiskit::figures
