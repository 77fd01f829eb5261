#pragma once

// JSON forms of fitted models and reports. Non-finite numbers are written as
// null and read back as NaN.

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "eiskit/dose.hpp"
#include "eiskit/error.hpp"
#include "eiskit/regarima.hpp"

namespace eiskit::json_io {

using nlohmann::ordered_json;

inline constexpr const char* model_schema = "eis-kit/regarima-model/1";
inline constexpr const char* dose_schema = "eis-kit/dose-fit/1";

inline ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

inline double to_num(const ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw DataError("expected a number in JSON, found " + std::string(j.type_name()));
    return j.get<double>();
}

inline ordered_json to_json(const regarima::RegArimaModel& m) {
    ordered_json j;
    j["schema"] = model_schema;
    j["orders"] = {{"p", m.orders.p}, {"d", m.orders.d}, {"q", m.orders.q}};
    j["output_scale"] = m.scale == regarima::OutputScale::log ? "log" : "identity";
    j["has_intercept"] = m.has_intercept;
    j["intercept"] = num(m.intercept);
    ordered_json ar = ordered_json::array(), ma = ordered_json::array();
    for (double v : m.ar) ar.push_back(num(v));
    for (double v : m.ma) ma.push_back(num(v));
    j["ar"] = ar;
    j["ma"] = ma;
    ordered_json betas = ordered_json::array();
    for (std::size_t i = 0; i < m.predictors.size(); ++i) {
        betas.push_back({{"predictor", m.predictors[i]}, {"value", num(m.betas[i])}});
    }
    j["betas"] = betas;
    j["variance"] = num(m.variance);
    j["loglik"] = num(m.loglik);
    j["aic"] = num(m.aic);
    j["n_obs"] = m.n_obs;
    ordered_json table = ordered_json::array();
    for (const auto& r : m.table) {
        table.push_back({{"name", r.name},
                         {"value", num(r.value)},
                         {"std_error", num(r.std_error)},
                         {"t_stat", num(r.t_stat)},
                         {"p_value", num(r.p_value)}});
    }
    j["coefficients"] = table;
    return j;
}

inline regarima::RegArimaModel model_from_json(const ordered_json& j) {
    try {
        if (j.value("schema", std::string{}) != model_schema) {
            throw DataError("model JSON: expected schema '" + std::string(model_schema) + "'");
        }
        regarima::RegArimaModel m;
        m.orders = {j.at("orders").at("p").get<int>(), j.at("orders").at("d").get<int>(),
                    j.at("orders").at("q").get<int>()};
        const auto scale = j.at("output_scale").get<std::string>();
        if (scale != "identity" && scale != "log") throw DataError("model JSON: unknown output_scale '" + scale + "'");
        m.scale = scale == "log" ? regarima::OutputScale::log : regarima::OutputScale::identity;
        m.has_intercept = j.at("has_intercept").get<bool>();
        m.intercept = to_num(j.at("intercept"));
        for (const auto& v : j.at("ar")) m.ar.push_back(to_num(v));
        for (const auto& v : j.at("ma")) m.ma.push_back(to_num(v));
        for (const auto& b : j.at("betas")) {
            m.predictors.push_back(b.at("predictor").get<std::string>());
            m.betas.push_back(to_num(b.at("value")));
        }
        m.variance = to_num(j.at("variance"));
        m.loglik = to_num(j.at("loglik"));
        m.aic = to_num(j.at("aic"));
        m.n_obs = j.at("n_obs").get<std::size_t>();
        for (const auto& r : j.at("coefficients")) {
            m.table.push_back({r.at("name").get<std::string>(), to_num(r.at("value")), to_num(r.at("std_error")),
                               to_num(r.at("t_stat")), to_num(r.at("p_value"))});
        }
        if (m.ar.size() != static_cast<std::size_t>(m.orders.p) || m.ma.size() != static_cast<std::size_t>(m.orders.q)) {
            throw DataError("model JSON: coefficient counts do not match orders");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model JSON: ") + e.what());
    }
}

inline ordered_json to_json(const dose::DoseFit& f) {
    return {{"ph", num(f.ph)},
            {"slope", num(f.slope)},
            {"intercept", num(f.intercept)},
            {"sst_pct", num(f.sst_pct())},
            {"r_squared", num(f.r_squared)},
            {"rmse", num(f.rmse)},
            {"ldr_pct", num(f.ldr_pct)},
            {"linear_lo_mg_dl", num(f.linear_lo)},
            {"linear_hi_mg_dl", num(f.linear_hi)},
            {"n", f.n}};
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << dump(j);
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline ordered_json read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace eiskit::json_io
