// eis-kit: command-line front end. One subcommand per module; module config
// files (key=value) are read first and explicit flags override them.
//
// Exit codes: 0 ok, 2 configuration, 3 data/schema, 4 numerical failure.
// Failures print a single line `code=<n> msg=<text>` on stderr.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eiskit/eiskit.hpp"

namespace fs = std::filesystem;
using namespace eiskit;

namespace {

constexpr const char* version_string = "eis-kit 1.0.0";

std::string fmt(double v) { return csv::format_number(v); }

/// Comma list of numbers. "a,b,...,c" expands the progression a, b, b+(b-a), ... up to c.
std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<std::string> tokens;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(eiskit::detail::trim(tok));
    std::vector<double> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "...") {
            if (out.size() < 2 || i + 1 >= tokens.size()) {
                throw ConfigError(what + ": '...' needs two values before it and one after");
            }
            const double step = out[out.size() - 1] - out[out.size() - 2];
            const double stop = eiskit::detail::parse_double(tokens[i + 1], what);
            if (!(step > 0.0) || stop < out.back()) throw ConfigError(what + ": '...' needs an increasing progression");
            // Values are origin + k * step so they stay exact multiples.
            const double start = out[out.size() - 2];
            const auto first_new = static_cast<long long>(std::llround((out.back() - start) / step)) + 1;
            for (long long k = first_new;; ++k) {
                const double v = start + static_cast<double>(k) * step;
                if (v > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
                out.push_back(v);
            }
            if (std::abs(out.back() - stop) > 1e-9 * std::max(1.0, std::abs(stop))) {
                throw ConfigError(what + ": progression does not reach " + tokens[i + 1]);
            }
            ++i;
            continue;
        }
        try {
            out.push_back(eiskit::detail::parse_double(tokens[i], what));
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = eiskit::detail::trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

regarima::ArimaOrders parse_orders(const std::string& text) {
    const auto parts = parse_name_list(text);
    if (parts.size() != 3) throw ConfigError("--orders expects p,d,q");
    long long v[3];
    for (int i = 0; i < 3; ++i) {
        try {
            v[i] = eiskit::detail::parse_int(parts[static_cast<std::size_t>(i)], "--orders");
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
        if (v[i] < 0 || v[i] > 50) throw ConfigError("--orders values must be in [0, 50]");
    }
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

/// Lower-cases names so mixed-case spellings like "dZmod" are accepted.
std::vector<std::string> parse_predictors(const std::string& text) {
    auto names = parse_name_list(text);
    for (auto& n : names) {
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!SubjectSeries::is_predictor(n)) throw ConfigError("unknown predictor '" + n + "'");
    }
    return names;
}

SubjectSeries load_subject(const std::string& series_path, const std::string& ref_path) {
    auto s = figures::series_from(csv::read_file(series_path, "series"));
    if (!ref_path.empty()) s.ref_points = figures::reference_from(csv::read_file(ref_path, "reference"));
    return s;
}

std::vector<double> load_target(const std::string& path, const SubjectSeries& s) {
    const auto t = csv::read_file(path, "glucose");
    const auto ts_col = t.column("timestamp_s");
    if (ts_col.size() != s.size()) throw DataError(path + ": glucose track length differs from the series");
    for (std::size_t i = 0; i < ts_col.size(); ++i) {
        if (std::abs(ts_col[i] - s.timestamps[i]) > 1e-6) {
            throw DataError(path + " row " + std::to_string(i + 1) + ": timestamp differs from the series");
        }
    }
    return t.column("glucose_mg_dl");
}

ts::InterpolationMode parse_interp(const std::string& s) {
    if (s == "pchip" || s == "monotone") return ts::InterpolationMode::monotone_cubic;
    if (s == "linear") return ts::InterpolationMode::linear;
    throw ConfigError("--interp must be pchip or linear");
}

regarima::OutputScale parse_scale(const std::string& s) {
    if (s == "identity") return regarima::OutputScale::identity;
    if (s == "log") return regarima::OutputScale::log;
    throw ConfigError("--scale must be identity or log");
}

void write_histogram(const std::string& path, std::span<const double> residuals, std::size_t bins) {
    csv::write_file(path, figures::histogram_table(ts::residual_histogram(residuals, bins)));
}

void print_table(const regarima::RegArimaModel& m) {
    std::cout << "name,value,std_error,t_stat,p_value\n";
    for (const auto& r : m.table) {
        std::cout << r.name << ',' << fmt(r.value) << ',' << fmt(r.std_error) << ',' << fmt(r.t_stat) << ','
                  << fmt(r.p_value) << '\n';
    }
    std::cout << "loglik=" << fmt(m.loglik) << "\naic=" << fmt(m.aic) << '\n';
    const auto sig = regarima::significance_filter(m);
    std::cout << "retained=";
    for (std::size_t i = 0; i < sig.retained.size(); ++i) std::cout << (i ? ";" : "") << sig.retained[i];
    std::cout << "\nremovable=";
    for (std::size_t i = 0; i < sig.removable.size(); ++i) std::cout << (i ? ";" : "") << sig.removable[i];
    std::cout << '\n';
}

// ---- subcommands -----------------------------------------------------------

struct MeasureArgs {
    std::string config, analyzer = "ideal", preset = "sensor", freqs = "100", out, noise_budget;
    std::vector<std::string> circuits;
    std::uint64_t seed = 0;
    double gain = 0.0, jitter = 0.0, fs = 20480.0, z_cal = 3990.0;
    std::size_t channels = 0;
};

int run_measure(const MeasureArgs& a, const CLI::App& cmd) {
    dft::AnalyzerConfig cfg;
    if (a.analyzer == "calibration") {
        cfg = dft::AnalyzerConfig::calibration_preset(a.seed);
    } else if (a.analyzer != "ideal") {
        throw ConfigError("--analyzer must be ideal or calibration");
    }
    double z_cal = 3990.0;
    cfg.fs_sample = 20480.0;
    if (!a.config.empty()) {
        const auto kv = KeyValueConfig::load(a.config);
        dft::AnalyzerConfig from_file = dft::analyzer_from_config(kv);
        // Only keys present in the file replace the preset.
        if (kv.has("f_excite_hz")) cfg.f_excite = from_file.f_excite;
        if (kv.has("v_rms_v")) cfg.v_rms = from_file.v_rms;
        if (kv.has("fs_sample_hz")) cfg.fs_sample = from_file.fs_sample;
        if (kv.has("n_dft")) cfg.n_dft = from_file.n_dft;
        if (kv.has("n_channels")) cfg.n_channels = from_file.n_channels;
        if (kv.has("t_conversion_s")) cfg.t_conversion = from_file.t_conversion;
        if (kv.has("gain_offset_pct")) cfg.gain_offset_pct = from_file.gain_offset_pct;
        if (kv.has("channel_jitter_ohm")) cfg.channel_jitter_ohm = from_file.channel_jitter_ohm;
        z_cal = kv.get_double("z_cal_ohm", z_cal);
    }
    if (cmd.count("--gain-offset-pct")) cfg.gain_offset_pct = a.gain;
    if (cmd.count("--jitter-ohm")) cfg.channel_jitter_ohm = a.jitter;
    if (cmd.count("--fs-sample")) cfg.fs_sample = a.fs;
    if (cmd.count("--z-cal")) z_cal = a.z_cal;
    if (cmd.count("--channels")) cfg.n_channels = a.channels;
    cfg.rng_seed = a.seed;
    if (!a.noise_budget.empty()) cfg.noise = noise::budget_from_config(KeyValueConfig::load(a.noise_budget));
    if (!(z_cal > 0.0)) throw ConfigError("z_cal must be > 0");

    std::vector<CircuitModel> duts;
    if (!a.circuits.empty()) {
        for (const auto& p : a.circuits) duts.push_back(circuit_from_config(KeyValueConfig::load(p)));
    } else {
        for (const auto& name : parse_name_list(a.preset)) {
            const auto c = builtin_circuit(name);
            if (!c) throw ConfigError("unknown circuit preset '" + name + "' (sensor, dummy-cell, resistor-4k)");
            duts.push_back(*c);
        }
    }
    if (duts.size() == 1) duts.assign(cfg.n_channels, duts.front());
    const auto freqs = parse_number_list(a.freqs, "--freqs");
    const auto ms = dft::tdm_sweep<CircuitModel>(cfg, CalCell{z_cal}, duts, freqs);
    const auto table = figures::sweep_table(ms);
    if (a.out.empty()) {
        csv::write(std::cout, table);
    } else {
        csv::write_file(a.out, table);
    }
    return 0;
}

struct NoiseArgs {
    std::string budget, preset = "nominal", out, settling_out, t_min = "5,10,15,20,25,30", settling_freqs = "100";
    double fmin = 1.0, fmax = 10000.0, decay_tau_min = 10.0, amplitude = 3.0;
    std::size_t points = 200;
};

int run_noise(const NoiseArgs& a) {
    noise::NoiseBudget b;
    if (!a.budget.empty()) {
        b = noise::budget_from_config(KeyValueConfig::load(a.budget));
    } else if (a.preset == "nominal") {
        b = noise::nominal_budget();
    } else {
        throw ConfigError("--preset must be nominal (or pass --budget)");
    }
    const auto grid = noise::log_grid(a.fmin, a.fmax, a.points);
    const auto spectrum = figures::noise_spectrum_table(b, grid);
    if (a.out.empty()) {
        csv::write(std::cout, spectrum);
    } else {
        csv::write_file(a.out, spectrum);
    }
    if (!a.settling_out.empty()) {
        auto t = parse_number_list(a.t_min, "--t-min");
        for (double& v : t) v *= 60.0;
        const auto f = parse_number_list(a.settling_freqs, "--settling-freqs");
        const auto rms = noise::noise_settling_series(b, f, t, a.decay_tau_min * 60.0, a.amplitude);
        csv::write_file(a.settling_out, figures::noise_settling_table(t, f, rms));
    }
    return 0;
}

struct DoseArgs {
    std::string in, scenario, out, box, cdr, axis = "log10";
    double band_factor = 2.0, span_origin = 0.0;
};

int run_dose(const DoseArgs& a) {
    std::vector<dose::DoseResponsePoint> pts;
    if (!a.in.empty() && !a.scenario.empty()) throw ConfigError("give --in or --scenario, not both");
    if (!a.in.empty()) {
        pts = figures::dose_points_from(csv::read_file(a.in, "dose"));
    } else if (a.scenario == "sst11") {
        pts = dose::sst11_scenario();
    } else {
        throw ConfigError("dose needs --in <csv> or --scenario sst11");
    }
    dose::DoseFitOptions opt;
    if (a.axis == "linear") {
        opt.axis = dose::ConcentrationAxis::linear;
    } else if (a.axis != "log10") {
        throw ConfigError("--axis must be log10 or linear");
    }
    opt.band_factor = a.band_factor;
    opt.span_origin = a.span_origin;

    json_io::ordered_json j;
    j["schema"] = json_io::dose_schema;
    j["axis"] = a.axis;
    j["fits"] = json_io::ordered_json::array();
    for (double ph : dose::ph_values(pts)) {
        const auto f = dose::fit_dose_response(pts, ph, opt);
        auto fj = json_io::to_json(f);
        fj["fom_sensor"] = json_io::num(f.sst_pct() > 0.0 ? metrology::fom_sensor({f.ldr_pct, f.sst_pct()})
                                                          : std::numeric_limits<double>::quiet_NaN());
        j["fits"].push_back(fj);
        std::cout << "ph=" << fmt(ph) << " slope=" << fmt(f.slope) << " sst_pct=" << fmt(f.sst_pct())
                  << " r_squared=" << fmt(f.r_squared) << " ldr_pct=" << fmt(f.ldr_pct) << '\n';
    }
    json_io::ordered_json sems = json_io::ordered_json::array();
    for (const auto& [c, s] : dose::sem_by_dose(pts)) {
        sems.push_back({{"concentration_mg_dl", c}, {"sem_pct", s ? json_io::num(*s) : json_io::ordered_json(nullptr)}});
    }
    j["sem_by_dose"] = sems;
    if (!a.out.empty()) json_io::write_file(a.out, j);

    if (!a.box.empty()) {
        std::vector<figures::BoxRow> rows;
        for (double c : dose::concentrations(pts)) rows.push_back({c, dose::box_stats(pts, c)});
        csv::write_file(a.box, figures::box_table(rows));
    }
    if (!a.cdr.empty()) {
        const auto s = dose::summarize(pts);
        csv::write_file(a.cdr, figures::cdr_table(s));
    }
    return 0;
}

struct FomArgs {
    std::string profile, out;
    double i_avg = 0.0, ldr = 0.0, sst = 0.0;
};

int run_fom(const FomArgs& a, const CLI::App& cmd) {
    metrology::PowerProfile p;
    std::optional<double> i_avg, ldr, sst;
    if (!a.profile.empty()) {
        const auto kv = KeyValueConfig::load(a.profile);
        p = metrology::profile_from_config(kv);
        if (kv.has("i_avg_a")) i_avg = kv.get_double("i_avg_a");
        if (kv.has("ldr_pct")) ldr = kv.get_double("ldr_pct");
        if (kv.has("sst_pct")) sst = kv.get_double("sst_pct");
    }
    if (cmd.count("--i-avg-a")) i_avg = a.i_avg;
    if (cmd.count("--ldr-pct")) ldr = a.ldr;
    if (cmd.count("--sst-pct")) sst = a.sst;
    const double current = i_avg ? *i_avg : metrology::average_current(p);
    const double hours = metrology::battery_life_hours(p.battery_capacity, current);
    const double fom_dev = metrology::fom_device(p, current);

    json_io::ordered_json j;
    j["schema"] = "eis-kit/fom-report/1";
    j["i_avg_a"] = json_io::num(current);
    j["i_avg_source"] = i_avg ? "given" : "duty-cycle";
    j["battery_hours"] = json_io::num(hours);
    j["fom_device_j_per_point"] = json_io::num(fom_dev);
    std::cout << "i_avg_a=" << fmt(current) << "\nbattery_hours=" << fmt(hours)
              << "\nfom_device_j_per_point=" << fmt(fom_dev) << '\n';
    if (ldr || sst) {
        if (!ldr || !sst) throw ConfigError("fom_sensor needs both ldr_pct and sst_pct");
        const double fs = metrology::fom_sensor({*ldr, *sst});
        j["fom_sensor"] = json_io::num(fs);
        std::cout << "fom_sensor=" << fmt(fs) << '\n';
    }
    if (!a.out.empty()) json_io::write_file(a.out, j);
    return 0;
}

struct MardArgs {
    std::string pred, ref, column = "glucose_mg_dl", out;
    bool synth = false;
    double g_true = 100.0, bias = 0.0, cv = 0.0;
    std::size_t n = 100000;
    std::optional<std::uint64_t> seed;
};

int run_mard(const MardArgs& a) {
    if (a.synth) {
        if (!a.seed) throw ConfigError("mard --synth is stochastic and requires --seed");
        metrology::MardModel m(a.bias, a.cv, *a.seed);
        const auto g = m.synthesize_noisy(a.g_true, a.n);
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        double ss = 0.0;
        for (double v : g) ss += (v - mean) * (v - mean);
        const double sd = g.size() > 1 ? std::sqrt(ss / static_cast<double>(g.size() - 1)) : 0.0;
        const std::vector<double> ref(g.size(), a.g_true);
        std::cout << "bias_pct=" << fmt(100.0 * (mean - a.g_true) / a.g_true) << "\ncv_pct=" << fmt(100.0 * sd / mean)
                  << "\nmard_pct=" << fmt(metrology::mard(g, ref)) << '\n';
        if (!a.out.empty()) {
            csv::Table t{"mard_samples", {"index", "glucose_mg_dl"}, {}};
            for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({static_cast<double>(i), g[i]});
            csv::write_file(a.out, t);
        }
        return 0;
    }
    if (a.pred.empty() || a.ref.empty()) throw ConfigError("mard needs --pred and --ref (or --synth)");
    const auto p = csv::read_file(a.pred).column(a.column);
    const auto r = csv::read_file(a.ref).column(a.column);
    std::cout << "mard_pct=" << fmt(metrology::mard(p, r)) << '\n';
    return 0;
}

struct AcfArgs {
    std::vector<std::string> series;
    std::string predictors = "zmod,dzmod", out_prefix;
    std::size_t max_lag = 20;
    int max_p = 10;
};

int run_acf(const AcfArgs& a) {
    const auto names = parse_predictors(a.predictors);
    std::vector<SubjectSeries> subjects;
    for (const auto& p : a.series) subjects.push_back(load_subject(p, ""));
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        for (const auto& nme : names) {
            const auto r = ts::acf(subjects[i].column(nme), a.max_lag);
            std::cout << "subject=" << i + 1 << " predictor=" << nme
                      << " significant_initial_lags=" << ts::significant_initial_lags(r) << '\n';
            if (!a.out_prefix.empty()) {
                csv::write_file(a.out_prefix + "_s" + std::to_string(i + 1) + "_" + nme + ".csv", figures::acf_table(r));
            }
        }
    }
    const auto sel = regarima::select_order(subjects, names, a.max_p);
    std::cout << "p=" << sel.p << '\n';
    return 0;
}

struct FitArgs {
    std::string series, ref, target, orders = "10,0,3",
                predictors = "zimag,zmod,zphase,zreal,dzimag,dzmod,dzphase,dzreal,rh", out, prediction, histogram,
                scale = "identity", interp = "pchip";
    std::size_t bins = 20;
    int max_iter = 500;
    double tol = 1e-8;
    bool no_intercept = false;
};

int run_fit(const FitArgs& a) {
    if (a.ref.empty() == a.target.empty()) throw ConfigError("fit needs exactly one of --ref or --target");
    const auto s = load_subject(a.series, a.ref);
    s.validate();
    regarima::FitOptions opt;
    opt.max_iter = a.max_iter;
    opt.rel_tol = a.tol;
    opt.scale = parse_scale(a.scale);
    opt.include_intercept = !a.no_intercept;
    opt.interpolation = parse_interp(a.interp);
    const auto names = parse_predictors(a.predictors);
    const auto y = a.target.empty() ? regarima::reference_target(s, opt.interpolation) : load_target(a.target, s);
    const auto res = regarima::fit_series(y, regarima::predictor_columns(s, names), names, parse_orders(a.orders), opt);
    print_table(res.model);
    std::cout << "iterations=" << res.iterations << '\n';
    if (!a.out.empty()) json_io::write_file(a.out, json_io::to_json(res.model));
    if (!a.prediction.empty()) {
        csv::write_file(a.prediction, figures::prediction_table({s.timestamps, y, res.fitted, res.residuals}));
    }
    if (!a.histogram.empty()) write_histogram(a.histogram, res.residuals, a.bins);
    return 0;
}

struct PredictArgs {
    std::string model, series, ref, target, out, histogram, interp = "pchip";
    std::size_t bins = 20;
};

int run_predict(const PredictArgs& a) {
    if (a.ref.empty() == a.target.empty()) throw ConfigError("predict needs exactly one of --ref or --target");
    const auto m = json_io::model_from_json(json_io::read_file(a.model));
    const auto s = load_subject(a.series, a.ref);
    regarima::Prediction p;
    if (a.target.empty()) {
        p = regarima::predict(m, s, parse_interp(a.interp));
    } else {
        s.validate();
        p.timestamps = s.timestamps;
        p.target = load_target(a.target, s);
        auto ins = regarima::predict_series(m, p.target, regarima::predictor_columns(s, m.predictors));
        p.fitted = std::move(ins.fitted);
        p.residuals = std::move(ins.residuals);
    }
    const auto table = figures::prediction_table(p);
    if (a.out.empty()) {
        csv::write(std::cout, table);
    } else {
        csv::write_file(a.out, table);
    }
    if (!a.histogram.empty()) write_histogram(a.histogram, p.residuals, a.bins);
    return 0;
}

struct SynthArgs {
    std::size_t n_subjects = 20;
    double duration_h = 8.0, cadence_s = 60.0;
    std::string scenario = "meals", out_dir = ".";
    std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
    synth::CohortSpec spec;
    spec.n_subjects = a.n_subjects;
    spec.duration_h = a.duration_h;
    spec.cadence_s = a.cadence_s;
    spec.scenario = synth::parse_scenario(a.scenario);
    spec.seed = a.seed;
    const auto cohort = synth::synth_cohort(spec);
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + a.out_dir + "': " + ec.message());

    json_io::ordered_json truth;
    truth["schema"] = "eis-kit/synth-truth/1";
    truth["seed"] = a.seed;
    truth["scenario"] = a.scenario;
    truth["cadence_s"] = a.cadence_s;
    truth["duration_h"] = a.duration_h;
    truth["subjects"] = json_io::ordered_json::array();
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "subject_%02zu", i + 1);
        const fs::path base = fs::path(a.out_dir) / stem;
        const auto& c = cohort[i];
        csv::write_file(base.string() + "_series.csv", figures::series_table(c.series));
        csv::write_file(base.string() + "_ref.csv", figures::reference_table(c.series.ref_points));
        csv::write_file(base.string() + "_glucose.csv", figures::glucose_table(c.series.timestamps, c.glucose));
        json_io::ordered_json sj;
        sj["id"] = stem;
        sj["orders"] = {{"p", c.truth.ar.size()}, {"d", 0}, {"q", c.truth.ma.size()}};
        sj["intercept"] = c.truth.intercept;
        sj["ar"] = c.truth.ar;
        sj["ma"] = c.truth.ma;
        sj["innovation_sd"] = c.truth.sigma;
        json_io::ordered_json betas = json_io::ordered_json::array();
        for (std::size_t k = 0; k < c.truth.predictors.size(); ++k) {
            betas.push_back({{"predictor", c.truth.predictors[k]}, {"value", c.truth.betas[k]}});
        }
        sj["betas"] = betas;
        truth["subjects"].push_back(sj);
    }
    json_io::write_file((fs::path(a.out_dir) / "truth.json").string(), truth);
    std::cout << "subjects=" << cohort.size() << " rows=" << cohort.front().series.size() << '\n';
    return 0;
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

int fail(int code, const std::string& msg) {
    std::cerr << "code=" << code << " msg=" << one_line(msg) << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impedance-spectroscopy sweat-glucose toolkit"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    MeasureArgs ma;
    auto* measure = app.add_subcommand("measure", "Ratiometric DFT sweep of circuit presets");
    measure->add_option("--config", ma.config, "Analyzer key=value file")->check(CLI::ExistingFile);
    measure->add_option("--analyzer", ma.analyzer, "Base analyzer: ideal or calibration")->capture_default_str();
    measure->add_option("--preset", ma.preset, "Circuit preset(s): sensor, dummy-cell, resistor-4k")->capture_default_str();
    measure->add_option("--circuit", ma.circuits, "Circuit key=value file, one per channel")->check(CLI::ExistingFile);
    measure->add_option("--freqs", ma.freqs, "Frequencies in Hz, e.g. 80,100,...,1000")->capture_default_str();
    measure->add_option("--seed", ma.seed, "RNG seed")->required();
    measure->add_option("--gain-offset-pct", ma.gain, "Systematic gain offset in percent");
    measure->add_option("--jitter-ohm", ma.jitter, "Std-dev of the fixed per-channel error");
    measure->add_option("--fs-sample", ma.fs, "Requested sample rate in Hz (snapped to coherence)");
    measure->add_option("--z-cal", ma.z_cal, "Calibration resistor in ohm");
    measure->add_option("--channels", ma.channels, "Number of channels");
    measure->add_option("--noise-budget", ma.noise_budget, "Noise budget file for waveform noise")->check(CLI::ExistingFile);
    measure->add_option("--out", ma.out, "Sweep CSV (stdout if omitted)");

    NoiseArgs na;
    auto* noise_cmd = app.add_subcommand("noise", "Composite noise spectrum and settling series");
    noise_cmd->add_option("--budget", na.budget, "Noise budget key=value file")->check(CLI::ExistingFile);
    noise_cmd->add_option("--preset", na.preset, "Budget preset when no file is given")->capture_default_str();
    noise_cmd->add_option("--fmin", na.fmin)->capture_default_str();
    noise_cmd->add_option("--fmax", na.fmax)->capture_default_str();
    noise_cmd->add_option("--points", na.points)->capture_default_str();
    noise_cmd->add_option("--out", na.out, "Spectrum CSV (stdout if omitted)");
    noise_cmd->add_option("--settling-out", na.settling_out, "Settling series CSV");
    noise_cmd->add_option("--t-min", na.t_min, "Settling times in minutes")->capture_default_str();
    noise_cmd->add_option("--settling-freqs", na.settling_freqs, "Settling frequencies in Hz")->capture_default_str();
    noise_cmd->add_option("--decay-tau-min", na.decay_tau_min)->capture_default_str();
    noise_cmd->add_option("--amplitude", na.amplitude)->capture_default_str();

    DoseArgs da;
    auto* dose_cmd = app.add_subcommand("dose", "Dose-response fits, SEM and box statistics");
    dose_cmd->add_option("--in", da.in, "Dose CSV")->check(CLI::ExistingFile);
    dose_cmd->add_option("--scenario", da.scenario, "Built-in scenario: sst11");
    dose_cmd->add_option("--out", da.out, "Fit JSON");
    dose_cmd->add_option("--box", da.box, "Box statistics CSV");
    dose_cmd->add_option("--cdr", da.cdr, "Mean/SEM per pH and concentration CSV");
    dose_cmd->add_option("--axis", da.axis, "log10 or linear")->capture_default_str();
    dose_cmd->add_option("--band-factor", da.band_factor, "LDR residual band in RMSE units")->capture_default_str();
    dose_cmd->add_option("--span-origin", da.span_origin, "Start of the tested span in mg/dL")->capture_default_str();

    FomArgs fa;
    auto* fom = app.add_subcommand("fom", "Average current, battery life and figures of merit");
    fom->add_option("--profile", fa.profile, "Power profile key=value file")->check(CLI::ExistingFile);
    fom->add_option("--i-avg-a", fa.i_avg, "Average current in A (skips the duty-cycle estimate)");
    fom->add_option("--ldr-pct", fa.ldr);
    fom->add_option("--sst-pct", fa.sst);
    fom->add_option("--out", fa.out, "Report JSON");

    MardArgs mda;
    std::uint64_t mard_seed = 0;
    auto* mard = app.add_subcommand("mard", "MARD of two series, or statistics of synthesized readings");
    mard->add_option("--pred", mda.pred)->check(CLI::ExistingFile);
    mard->add_option("--ref", mda.ref)->check(CLI::ExistingFile);
    mard->add_option("--column", mda.column)->capture_default_str();
    mard->add_flag("--synth", mda.synth, "Synthesize noisy readings instead of reading files");
    mard->add_option("--g-true", mda.g_true)->capture_default_str();
    mard->add_option("--bias-pct", mda.bias)->capture_default_str();
    mard->add_option("--cv-pct", mda.cv)->capture_default_str();
    mard->add_option("--n", mda.n)->capture_default_str();
    auto* mard_seed_opt = mard->add_option("--seed", mard_seed, "RNG seed (required with --synth)");
    mard->add_option("--out", mda.out, "Synthesized samples CSV");

    AcfArgs aa;
    auto* acf = app.add_subcommand("acf", "Autocorrelation and AR-order selection");
    acf->add_option("--series", aa.series, "Series CSV (repeatable)")->required()->check(CLI::ExistingFile);
    acf->add_option("--predictors", aa.predictors)->capture_default_str();
    acf->add_option("--max-lag", aa.max_lag)->capture_default_str();
    acf->add_option("--max-p", aa.max_p)->capture_default_str();
    acf->add_option("--out-prefix", aa.out_prefix, "Write <prefix>_s<i>_<predictor>.csv per series and predictor");

    FitArgs fta;
    auto* fit = app.add_subcommand("fit", "Regression with ARIMA errors");
    fit->add_option("--series", fta.series)->required()->check(CLI::ExistingFile);
    fit->add_option("--ref", fta.ref, "Reference samples CSV")->check(CLI::ExistingFile);
    fit->add_option("--target", fta.target, "Full glucose track CSV instead of interpolated references")->check(CLI::ExistingFile);
    fit->add_option("--orders", fta.orders)->capture_default_str();
    fit->add_option("--predictors", fta.predictors)->capture_default_str();
    fit->add_option("--out", fta.out, "Model JSON");
    fit->add_option("--prediction", fta.prediction, "In-sample prediction CSV");
    fit->add_option("--histogram", fta.histogram, "Residual histogram CSV");
    fit->add_option("--bins", fta.bins)->capture_default_str();
    fit->add_option("--scale", fta.scale, "identity or log")->capture_default_str();
    fit->add_option("--interp", fta.interp, "pchip or linear")->capture_default_str();
    fit->add_option("--max-iter", fta.max_iter)->capture_default_str();
    fit->add_option("--tol", fta.tol)->capture_default_str();
    fit->add_flag("--no-intercept", fta.no_intercept);

    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "One-step-ahead prediction with a fitted model");
    predict->add_option("--model", pa.model)->required()->check(CLI::ExistingFile);
    predict->add_option("--series", pa.series)->required()->check(CLI::ExistingFile);
    predict->add_option("--ref", pa.ref)->check(CLI::ExistingFile);
    predict->add_option("--target", pa.target)->check(CLI::ExistingFile);
    predict->add_option("--out", pa.out, "Prediction CSV (stdout if omitted)");
    predict->add_option("--histogram", pa.histogram, "Residual histogram CSV");
    predict->add_option("--bins", pa.bins)->capture_default_str();
    predict->add_option("--interp", pa.interp)->capture_default_str();

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic cohort with hidden ground truth");
    synth_cmd->add_option("--n-subjects", sa.n_subjects)->capture_default_str();
    synth_cmd->add_option("--duration-h", sa.duration_h)->capture_default_str();
    synth_cmd->add_option("--cadence-s", sa.cadence_s)->capture_default_str();
    synth_cmd->add_option("--scenario", sa.scenario, "meals or fasting")->capture_default_str();
    synth_cmd->add_option("--seed", sa.seed)->required();
    synth_cmd->add_option("--out-dir", sa.out_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(static_cast<int>(ExitCode::configuration), e.what());
    }

    try {
        if (*measure) return run_measure(ma, *measure);
        if (*noise_cmd) return run_noise(na);
        if (*dose_cmd) return run_dose(da);
        if (*fom) return run_fom(fa, *fom);
        if (*mard) {
            if (mard_seed_opt->count()) mda.seed = mard_seed;
            return run_mard(mda);
        }
        if (*acf) return run_acf(aa);
        if (*fit) return run_fit(fta);
        if (*predict) return run_predict(pa);
        if (*synth_cmd) return run_synth(sa);
    } catch (const Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(static_cast<int>(ExitCode::data), e.what());
    }
    return 0;
}
