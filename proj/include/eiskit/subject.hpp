#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eiskit/error.hpp"
#include "eiskit/timeseries.hpp"

namespace eiskit {

/// One subject's continuous recording: impedance features sampled on a uniform
/// grid, their first differences, skin temperature, humidity and the sparse
/// reference glucose samples.
struct SubjectSeries {
    std::vector<double> timestamps;  // s
    std::vector<double> zreal, zimag, zmod, zphase;
    std::vector<double> dzreal, dzimag, dzmod, dzphase;
    std::vector<double> skin_temp;  // C
    std::vector<double> rh;         // %
    std::vector<ts::RefPoint> ref_points;

    std::size_t size() const { return timestamps.size(); }

    /// Names accepted by column().
    static constexpr std::array<std::string_view, 10> predictor_names = {
        "zreal", "zimag", "zmod", "zphase", "dzreal", "dzimag", "dzmod", "dzphase", "skin_temp", "rh"};

    static bool is_predictor(std::string_view name) {
        for (auto n : predictor_names) {
            if (n == name) return true;
        }
        return false;
    }

    const std::vector<double>& column(std::string_view name) const {
        if (name == "zreal") return zreal;
        if (name == "zimag") return zimag;
        if (name == "zmod") return zmod;
        if (name == "zphase") return zphase;
        if (name == "dzreal") return dzreal;
        if (name == "dzimag") return dzimag;
        if (name == "dzmod") return dzmod;
        if (name == "dzphase") return dzphase;
        if (name == "skin_temp") return skin_temp;
        if (name == "rh") return rh;
        throw DataError("unknown predictor '" + std::string(name) + "'");
    }

    /// Recomputes the first-difference columns (d[0] = 0).
    void compute_derivatives() {
        dzreal = ts::first_difference_padded(zreal);
        dzimag = ts::first_difference_padded(zimag);
        dzmod = ts::first_difference_padded(zmod);
        dzphase = ts::first_difference_padded(zphase);
    }

    /// Checks lengths, uniform cadence and reference ordering.
    void validate() const {
        const std::size_t n = size();
        if (n < 2) throw DataError("subject series needs at least two samples");
        for (const auto* c : {&zreal, &zimag, &zmod, &zphase, &dzreal, &dzimag, &dzmod, &dzphase,
                              &skin_temp, &rh}) {
            if (c->size() != n) throw DataError("subject series columns have unequal lengths");
        }
        const double step = timestamps[1] - timestamps[0];
        if (!(step > 0.0)) throw DataError("subject series timestamps must increase");
        for (std::size_t i = 1; i < n; ++i) {
            const double s = timestamps[i] - timestamps[i - 1];
            if (std::abs(s - step) > 1e-9 * std::max(1.0, step)) {
                throw DataError("subject series must be uniformly sampled (row " + std::to_string(i) + ")");
            }
        }
        for (std::size_t i = 1; i < ref_points.size(); ++i) {
            if (!(ref_points[i].time > ref_points[i - 1].time)) {
                throw DataError("reference points must be strictly time-sorted");
            }
        }
        for (const auto& r : ref_points) {
            if (r.time < timestamps.front() || r.time > timestamps.back()) {
                throw DataError("reference point outside the series span");
            }
        }
    }
};

}  // namespace eiskit
