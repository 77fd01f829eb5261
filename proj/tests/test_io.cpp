#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eiskit/csv.hpp"
#include "eiskit/figure_data.hpp"
#include "eiskit/model_json.hpp"
#include "eiskit/synth.hpp"

using namespace eiskit;

namespace {

csv::Table round_trip(const csv::Table& t, std::string_view schema) {
    std::ostringstream out;
    csv::write(out, t);
    std::istringstream in(out.str());
    return csv::read(in, "<memory>", schema);
}

bool same_or_both_nan(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

TEST_CASE("CSV files start with a versioned schema line") {
    const csv::Table t{"histogram", {"bin_left", "count"}, {{0.5, 3}}};
    std::ostringstream out;
    csv::write(out, t);
    CHECK(out.str() == "# eis-kit v1.0.0 histogram\nbin_left,count\n0.5,3\n");
}

TEST_CASE("numbers round-trip exactly, including non-finite values") {
    const std::vector<double> v{0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, std::numeric_limits<double>::infinity(),
                                std::nan("")};
    const csv::Table t{"series", {"x"}, {}};
    csv::Table tt = t;
    for (double x : v) tt.rows.push_back({x});
    const auto back = round_trip(tt, "series");
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(same_or_both_nan(back.rows[i][0], v[i]));
}

TEST_CASE("CSV reader rejects other major versions, wrong schemas and ragged rows") {
    std::istringstream v2("# eis-kit v2.0.0 sweep\na\n1\n");
    CHECK_THROWS_AS(csv::read(v2, "x"), DataError);
    std::istringstream wrong("# eis-kit v1.3.0 acf\na\n1\n");
    CHECK_THROWS_AS(csv::read(wrong, "x", "sweep"), DataError);
    std::istringstream ragged("# eis-kit v1.0.0 acf\na,b\n1,2\n3\n");
    try {
        csv::read(ragged, "f.csv");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("f.csv:4") != std::string::npos);
    }
    std::istringstream junk("# eis-kit v1.0.0 acf\nlag,r\n1,abc\n");
    try {
        csv::read(junk, "g.csv");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("g.csv:3") != std::string::npos);
        CHECK(msg.find("'r'") != std::string::npos);
    }
    std::istringstream minor("# eis-kit v1.7.2 acf\nlag\n1\n");
    CHECK(csv::read(minor, "x", "acf").rows.size() == 1);
}

TEST_CASE("missing required columns are reported by name") {
    std::istringstream in("# eis-kit v1.0.0 reference\ntime_s\n1\n");
    const auto t = csv::read(in, "r.csv", "reference");
    try {
        (void)figures::reference_from(t);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("glucose_mg_dl") != std::string::npos);
    }
}

TEST_CASE("figure schemas") {
    ts::Histogram h{{0.0, 1.0, 2.0}, {4, 5}};
    CHECK(figures::histogram_table(h).columns == std::vector<std::string>{"bin_left", "count"});
    ts::AcfResult a{{1.0, 0.2}, 0.3, 100};
    CHECK(figures::acf_table(a).columns == std::vector<std::string>{"lag", "r", "band_lo", "band_hi"});
    CHECK(figures::schema_name(figures::Kind::noise_spectrum) == "noise_spectrum");
}

TEST_CASE("figure data round-trips through CSV") {
    SECTION("sweep") {
        const std::vector<dft::Measurement> ms{dft::Measurement::from(2, 0.026, 100.0, {4897.9, -2981.9}),
                                               dft::Measurement::from(3, 0.039, 200.0, {3990.0, 0.0})};
        const auto back = figures::sweep_from(round_trip(figures::sweep_table(ms), "sweep"));
        REQUIRE(back.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(back[i].channel == ms[i].channel);
            CHECK(back[i].timestamp == ms[i].timestamp);
            CHECK(back[i].z == ms[i].z);
            CHECK(back[i].zphase == ms[i].zphase);
        }
    }
    SECTION("acf") {
        ts::AcfResult a{{1.0, 0.25, -0.125}, 3.0 / 20.0, 400};
        const auto back = figures::acf_from(round_trip(figures::acf_table(a), "acf"));
        CHECK(back.r == a.r);
        CHECK(back.band == a.band);
        CHECK(back.n == 400);
    }
    SECTION("prediction") {
        regarima::Prediction p{{0, 60}, {100, 101.5}, {99.25, 102}, {0.75, -0.5}};
        const auto back = figures::prediction_from(round_trip(figures::prediction_table(p), "prediction"));
        CHECK(back.timestamps == p.timestamps);
        CHECK(back.target == p.target);
        CHECK(back.fitted == p.fitted);
        CHECK(back.residuals == p.residuals);
    }
    SECTION("subject series and reference") {
        synth::CohortSpec spec;
        spec.n_subjects = 1;
        spec.seed = 3;
        const auto s = synth::synth_cohort(spec)[0].series;
        const auto back = figures::series_from(round_trip(figures::series_table(s), "series"));
        CHECK(back.zmod == s.zmod);
        CHECK(back.dzmod == s.dzmod);
        CHECK(back.rh == s.rh);
        CHECK(back.skin_temp == s.skin_temp);
        const auto ref = figures::reference_from(round_trip(figures::reference_table(s.ref_points), "reference"));
        REQUIRE(ref.size() == s.ref_points.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(ref[i].time == s.ref_points[i].time);
            CHECK(ref[i].glucose == s.ref_points[i].glucose);
        }
    }
    SECTION("dose summary keeps absent SEM as nan") {
        const std::vector<dose::DoseSummary> d{{4.0, 10.0, 19.0, std::nullopt, 1}, {4.0, 20.0, 21.5, 0.5, 4}};
        const auto t = round_trip(figures::cdr_table(d), "cdr");
        CHECK(std::isnan(t.rows[0][3]));
        CHECK(t.rows[1][3] == 0.5);
    }
}

TEST_CASE("dose input rows with a bad baseline name the row and column") {
    const csv::Table t{"dose",
                       {"concentration_mg_dl", "ph", "replicate", "zmod_ohm", "zbaseline_ohm"},
                       {{10, 4, 0, 4400, 4000}, {20, 4, 0, 4400, 0}}};
    try {
        (void)figures::dose_points_from(t);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("zbaseline_ohm") != std::string::npos);
    }
    const auto ok = figures::dose_points_from(csv::Table{t.schema, t.columns, {t.rows[0]}});
    CHECK(ok[0].delta_z_pct == 10.0);
}

TEST_CASE("model JSON round-trips including NaN standard errors") {
    regarima::RegArimaModel m;
    m.orders = {2, 0, 1};
    m.intercept = 4.9;
    m.ar = {0.5, -0.25};
    m.ma = {0.4};
    m.predictors = {"zmod"};
    m.betas = {-0.125};
    m.variance = 1.1;
    m.loglik = -881.6;
    m.aic = 1777.2;
    m.n_obs = 600;
    m.scale = regarima::OutputScale::log;
    m.table = {{"Intercept", 4.9, 0.14, 35.0, 0.0}, {"AR{1}", 0.5, std::nan(""), std::nan(""), std::nan("")}};
    const auto text = json_io::dump(json_io::to_json(m));
    const auto back = json_io::model_from_json(json_io::ordered_json::parse(text));
    CHECK(back.orders.p == 2);
    CHECK(back.orders.q == 1);
    CHECK(back.ar == m.ar);
    CHECK(back.ma == m.ma);
    CHECK(back.betas == m.betas);
    CHECK(back.predictors == m.predictors);
    CHECK(back.scale == regarima::OutputScale::log);
    CHECK(back.table[0].std_error == 0.14);
    CHECK(std::isnan(back.table[1].std_error));
    CHECK(json_io::dump(json_io::to_json(back)) == text);
}

TEST_CASE("model JSON rejects wrong schema and inconsistent orders") {
    regarima::RegArimaModel m;
    m.orders = {1, 0, 0};
    m.ar = {0.5};
    auto j = json_io::to_json(m);
    auto bad = j;
    bad["schema"] = "something-else";
    CHECK_THROWS_AS(json_io::model_from_json(bad), DataError);
    bad = j;
    bad["orders"]["p"] = 2;
    CHECK_THROWS_AS(json_io::model_from_json(bad), DataError);
    bad = j;
    bad.erase("variance");
    CHECK_THROWS_AS(json_io::model_from_json(bad), DataError);
}

TEST_CASE("synthetic cohort shape and determinism") {
    synth::CohortSpec spec;
    spec.seed = 77;
    const auto a = synth::synth_cohort(spec);
    REQUIRE(a.size() == 20);
    for (const auto& s : a) {
        CHECK(s.series.size() == 480);
        CHECK(s.series.ref_points.size() == 4);
        CHECK(s.series.ref_points.front().time == 0.0);
        CHECK(s.series.ref_points[1].time == 3600.0);
        CHECK(s.series.ref_points[2].time == 14400.0);
        CHECK(s.series.ref_points.back().time == s.series.timestamps.back());
        s.series.validate();
    }
    const auto b = synth::synth_cohort(spec);
    CHECK(a[7].series.zmod == b[7].series.zmod);
    CHECK(a[7].glucose == b[7].glucose);
    CHECK_THROWS_AS(synth::parse_scenario("brunch"), ConfigError);
    spec.n_subjects = 0;
    CHECK_THROWS_AS(synth::synth_cohort(spec), ConfigError);
}
