#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eiskit/csv.hpp"
#include "eiskit/regarima.hpp"
#include "eiskit/state_space.hpp"
#include "eiskit/synth.hpp"
#include "support.hpp"

using namespace eiskit;
using namespace eiskit::regarima;
using eiskit::testing::golden;
using eiskit::testing::golden_path;
using eiskit::testing::rel_err;
using Catch::Approx;

namespace {

struct Generated {
    std::vector<double> y;
    std::vector<std::vector<double>> xs;
    std::vector<std::string> names;
};

// y = 10 + 2 x1 - 1.5 x2 + 0.5 x3 + ARMA(2,1) noise with unit innovations.
Generated arma21_data(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Generated d;
    d.names = {"x1", "x2", "x3"};
    d.xs.assign(3, std::vector<double>(n));
    double walk = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        d.xs[0][t] = g(rng);
        walk = 0.95 * walk + g(rng);
        d.xs[1][t] = walk;
        d.xs[2][t] = std::sin(0.01 * double(t)) + 0.5 * g(rng);
    }
    const std::vector<double> ar{0.5, 0.2}, ma{0.4};
    const auto u = synth::simulate_arma(ar, ma, 1.0, n, rng);
    d.y.resize(n);
    for (std::size_t t = 0; t < n; ++t) d.y[t] = 10.0 + 2.0 * d.xs[0][t] - 1.5 * d.xs[1][t] + 0.5 * d.xs[2][t] + u[t];
    return d;
}

struct Truth {
    std::string name;
    double value;
};

const std::vector<Truth> arma21_truth{{"Intercept", 10.0}, {"AR{1}", 0.5},        {"AR{2}", 0.2},
                                      {"MA{1}", 0.4},      {"Beta(x1)", 2.0},     {"Beta(x2)", -1.5},
                                      {"Beta(x3)", 0.5},   {"Variance", 1.0}};

void check_against_reference(const char* key, const FitResult& fit, const std::vector<std::string>& rows) {
    const auto g = golden("regarima_mle.json")[key];
    const auto& m = fit.model;
    CHECK(m.loglik == Approx(g["llf"].get<double>()).epsilon(1e-8));
    CHECK(m.aic == Approx(g["aic"].get<double>()).epsilon(1e-8));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        INFO(rows[i]);
        const auto& r = m.row(rows[i]);
        CHECK(r.value == Approx(g["params"][i].get<double>()).margin(5e-4));
        CHECK(rel_err(r.std_error, g["bse"][i].get<double>()) < 5e-3);
    }
}

}  // namespace

TEST_CASE("regression with ARMA(2,1) errors matches the reference MLE") {
    const auto t = csv::read_file(golden_path("regarima_case_a.csv"));
    const auto fit = fit_series(t.column("y"), {t.column("x1"), t.column("x2")}, {"x1", "x2"}, {2, 0, 1});
    CHECK(fit.converged);
    check_against_reference("case_a", fit, {"Intercept", "Beta(x1)", "Beta(x2)", "AR{1}", "AR{2}", "MA{1}", "Variance"});
}

TEST_CASE("MA(2) with intercept matches the reference MLE") {
    const auto t = csv::read_file(golden_path("regarima_case_b.csv"));
    const auto fit = fit_series(t.column("y"), {}, {}, {0, 0, 2});
    check_against_reference("case_b", fit, {"Intercept", "MA{1}", "MA{2}", "Variance"});
}

TEST_CASE("p-values use the two-sided normal approximation") {
    const auto g = golden("statistics.json");
    CHECK(normal_p_value(1.96) == Approx(g["p_value_t_1p96"].get<double>()).epsilon(1e-12));
    CHECK(normal_p_value(-2.5) == Approx(g["p_value_t_2p5"].get<double>()).epsilon(1e-12));
}

TEST_CASE("known ARMA(2,1) model with three predictors is recovered within 3 SE") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto d = arma21_data(seed, 5000);
        const auto fit = fit_series(d.y, d.xs, d.names, {2, 0, 1});
        for (const auto& tr : arma21_truth) {
            INFO("seed " << seed << " " << tr.name);
            const auto& r = fit.model.row(tr.name);
            CHECK(std::abs(r.value - tr.value) <= 3.0 * r.std_error);
            CHECK(r.t_stat == Approx(r.value / r.std_error));
        }
        // Residual variance near the true innovation variance.
        double ss = 0.0;
        for (double e : fit.residuals) ss += e * e;
        CHECK(std::abs(ss / double(fit.residuals.size()) - 1.0) < 0.10);
    }
}

TEST_CASE("AIC prefers ARMA(2,1) over AR(1) on ARMA(2,1) data") {
    int wins = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto d = arma21_data(seed, 1000);
        const auto good = fit_series(d.y, d.xs, d.names, {2, 0, 1});
        const auto under = fit_series(d.y, d.xs, d.names, {1, 0, 0});
        wins += good.model.aic < under.model.aic;
        CHECK(good.model.aic == Approx(2.0 * 8 - 2.0 * good.model.loglik));
        CHECK(under.model.aic == Approx(2.0 * 6 - 2.0 * under.model.loglik));
    }
    CHECK(wins >= 18);
}

TEST_CASE("a pure-noise predictor is insignificant in >= 90 percent of trials") {
    int insignificant = 0;
    const int trials = 40;
    for (int s = 0; s < trials; ++s) {
        auto d = arma21_data(500 + std::uint64_t(s), 800);
        std::mt19937_64 rng(900 + std::uint64_t(s));
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> junk(d.y.size());
        for (double& v : junk) v = g(rng);
        d.xs.push_back(junk);
        d.names.push_back("junk");
        const auto fit = fit_series(d.y, d.xs, d.names, {2, 0, 1});
        insignificant += fit.model.row("Beta(junk)").p_value > 0.05;
    }
    CHECK(insignificant >= trials * 9 / 10);
}

TEST_CASE("objective trace is non-increasing and returned models are admissible") {
    for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
        const auto d = arma21_data(seed, 600);
        for (ArimaOrders o : {ArimaOrders{2, 0, 1}, ArimaOrders{3, 0, 2}, ArimaOrders{0, 0, 3}, ArimaOrders{1, 1, 1}}) {
            const auto fit = fit_series(d.y, d.xs, d.names, o);
            REQUIRE_FALSE(fit.objective_trace.empty());
            for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
                CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1]);
            }
            if (!fit.model.ar.empty()) CHECK(ss::ar_root_radius(fit.model.ar) > 1.0 + 1e-6);
            if (!fit.model.ma.empty()) CHECK(ss::ma_root_radius(fit.model.ma) > 1.0 + 1e-6);
        }
    }
}

TEST_CASE("differenced fits keep the series length for predictions") {
    const auto d = arma21_data(31, 600);
    const auto fit = fit_series(d.y, d.xs, d.names, {1, 1, 1});
    CHECK(fit.model.n_obs == 599);
    CHECK(fit.fitted.size() == 600);
    CHECK(fit.residuals[0] == 0.0);
    for (std::size_t t = 0; t < 600; ++t) CHECK(fit.fitted[t] + fit.residuals[t] == Approx(d.y[t]));
}

TEST_CASE("the full predictor set at (10,0,3) gives the 24-row coefficient table") {
    synth::CohortSpec spec;
    spec.n_subjects = 1;
    spec.seed = 5;
    const auto cohort = synth::synth_cohort(spec);
    const auto& s = cohort[0].series;
    const std::vector<std::string> names{"zimag", "zmod", "zphase", "zreal", "dzimag", "dzmod", "dzphase", "dzreal", "rh"};
    const auto fit = fit_series(cohort[0].glucose, predictor_columns(s, names), names, {10, 0, 3});
    const auto& table = fit.model.table;
    REQUIRE(table.size() == 24);
    CHECK(table[0].name == "Intercept");
    for (int i = 1; i <= 10; ++i) CHECK(table[std::size_t(i)].name == "AR{" + std::to_string(i) + "}");
    for (int i = 1; i <= 3; ++i) CHECK(table[10 + std::size_t(i)].name == "MA{" + std::to_string(i) + "}");
    for (std::size_t j = 0; j < names.size(); ++j) CHECK(table[14 + j].name == "Beta(" + names[j] + ")");
    CHECK(table[23].name == "Variance");
    CHECK(fit.model.aic == Approx(2.0 * 24 - 2.0 * fit.model.loglik));
}

TEST_CASE("predicting on the training subject reproduces fit residuals") {
    synth::CohortSpec spec;
    spec.n_subjects = 1;
    spec.seed = 6;
    const auto s = synth::synth_cohort(spec)[0].series;
    const std::vector<std::string> names{"zmod", "dzmod", "rh"};
    const auto fit = regarima::fit(s, {2, 0, 1}, names);
    const auto pred = predict(fit.model, s);
    REQUIRE(pred.residuals.size() == fit.residuals.size());
    for (std::size_t i = 0; i < pred.residuals.size(); ++i) CHECK(pred.residuals[i] == fit.residuals[i]);
    CHECK(pred.timestamps == s.timestamps);
    const auto target = reference_target(s);
    for (std::size_t i = 0; i < target.size(); ++i) CHECK(pred.target[i] == target[i]);
}

TEST_CASE("a constant model predicts its intercept") {
    RegArimaModel m;
    m.intercept = 7.5;
    m.variance = 1.0;
    const std::vector<double> y{1.0, 20.0, -3.0, 7.5, 100.0};
    const auto ins = predict_series(m, y, {});
    for (double f : ins.fitted) CHECK(f == 7.5);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(ins.residuals[i] == y[i] - 7.5);
}

TEST_CASE("prediction requires every named predictor") {
    RegArimaModel m;
    m.predictors = {"humidity"};
    m.betas = {1.0};
    synth::CohortSpec spec;
    spec.n_subjects = 1;
    const auto s = synth::synth_cohort(spec)[0].series;
    CHECK_THROWS_AS(predict(m, s), DataError);
    CHECK_THROWS_AS(predict_series(m, s.zmod, {}), DataError);
}

TEST_CASE("log output scale fits log-glucose and reports glucose units") {
    const auto d = arma21_data(41, 800);
    std::vector<double> y(d.y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(0.05 * d.y[i]);
    FitOptions opt;
    opt.scale = OutputScale::log;
    const auto fit = fit_series(y, d.xs, d.names, {2, 0, 1}, opt);
    CHECK(fit.model.scale == OutputScale::log);
    CHECK(fit.model.beta("x1") == Approx(0.1).margin(0.01));
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(fit.fitted[i] > 0.0);
        CHECK(fit.fitted[i] + fit.residuals[i] == Approx(y[i]));
    }
    std::vector<double> bad(y);
    bad[3] = -1.0;
    CHECK_THROWS_AS(fit_series(bad, d.xs, d.names, {2, 0, 1}, opt), DataError);
}

TEST_CASE("fit rejects short series, bad orders and non-finite data") {
    const auto d = arma21_data(51, 60);
    CHECK_THROWS_AS(fit_series(d.y, d.xs, d.names, {2, 0, 2}), DataError);
    CHECK_THROWS_AS(fit_series(d.y, d.xs, d.names, {-1, 0, 0}), ConfigError);
    CHECK_THROWS_AS(fit_series(d.y, d.xs, {"a"}, {1, 0, 0}), ConfigError);
    auto y = d.y;
    y[0] = std::nan("");
    CHECK_THROWS_AS(fit_series(y, {}, {}, {1, 0, 0}), DataError);
}

TEST_CASE("significance filter") {
    RegArimaModel m;
    m.table = {{"Intercept", 1, 0.1, 10, 0.0}, {"AR{1}", 1, 0.1, 10, 0.0}, {"Beta(zmod)", 1, 1, 1, 0.07},
               {"Variance", 1, 0.1, 10, 0.0}};
    const auto r = significance_filter(m);
    CHECK(r.retained == std::vector<std::string>{"Intercept", "AR{1}"});
    CHECK(r.removable == std::vector<std::string>{"Beta(zmod)"});
    for (auto& row : m.table) row.p_value = 0.0;
    CHECK(significance_filter(m).retained.size() == 3);
    CHECK(significance_filter(m).removable.empty());
}

TEST_CASE("stored coefficient table: every row with p < 0.05 is retained, AR{4} included") {
    RegArimaModel m;
    const auto stored = golden("stored_table.json");
    for (const auto& row : stored["rows"]) {
        m.table.push_back({row["name"].get<std::string>(), row["value"].get<double>(), row["std_error"].get<double>(),
                           row["t_stat"].get<double>(), row["p_value"].get<double>()});
    }
    REQUIRE(m.table.size() == 24);
    const auto r = significance_filter(m);
    CHECK(r.retained.size() == 23);
    CHECK(r.removable.empty());
    CHECK(std::find(r.retained.begin(), r.retained.end(), "AR{4}") != r.retained.end());
    // The stored p-values are consistent with the normal approximation.
    for (const auto& row : m.table) {
        if (row.p_value > 1e-300) CHECK(normal_p_value(row.t_stat) == Approx(row.p_value).epsilon(2e-3));
    }
}

TEST_CASE("order selection") {
    SECTION("white-noise predictors floor at 1") {
        std::mt19937_64 rng(61);
        std::normal_distribution<double> g(0.0, 1.0);
        SubjectSeries s;
        for (int t = 0; t < 2000; ++t) {
            s.timestamps.push_back(60.0 * t);
            s.zmod.push_back(4000 + g(rng));
            s.zreal.push_back(0);
            s.zimag.push_back(0);
            s.zphase.push_back(0);
            s.rh.push_back(40);
            s.skin_temp.push_back(33);
        }
        s.compute_derivatives();
        const std::vector<SubjectSeries> one{s};
        CHECK(select_order(one, {"zmod"}, 10).p == 1);
    }
    SECTION("5 lags on one subject's zmod and 10 on another's dzmod give p = 10") {
        const auto cohort = synth::order_selection_cohort(20000, 7);
        const auto sel = select_order(cohort, {"zmod", "dzmod"}, 10);
        CHECK(sel.p == 10);
        REQUIRE(sel.entries.size() == 4);
        CHECK(sel.entries[0].predictor == "zmod");
        CHECK(sel.entries[0].significant_lags == 5);
        CHECK(sel.entries[3].predictor == "dzmod");
        CHECK(sel.entries[3].significant_lags == 10);
    }
    SECTION("persistent AR(12) clamps to max_p") {
        std::mt19937_64 rng(62);
        std::vector<double> ar(12, 0.0);
        ar[0] = 0.9;
        ar[11] = 0.05;
        const auto x = synth::simulate_arma(ar, std::vector<double>{}, 1.0, 5000, rng);
        SubjectSeries s;
        for (std::size_t t = 0; t < x.size(); ++t) {
            s.timestamps.push_back(60.0 * double(t));
            s.zmod.push_back(4000 + x[t]);
            s.zreal.push_back(0);
            s.zimag.push_back(0);
            s.zphase.push_back(0);
            s.rh.push_back(40);
            s.skin_temp.push_back(33);
        }
        s.compute_derivatives();
        const std::vector<SubjectSeries> one{s};
        CHECK(select_order(one, {"zmod"}, 10).p == 10);
        CHECK(select_order(one, {"zmod"}, 3).p == 3);
    }
    const std::vector<SubjectSeries> none;
    CHECK_THROWS_AS(select_order(none, {"zmod"}, 0), ConfigError);
}
