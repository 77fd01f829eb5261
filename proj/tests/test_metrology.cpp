#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "eiskit/metrology.hpp"
#include "support.hpp"

using namespace eiskit;
using namespace eiskit::metrology;
using eiskit::testing::golden;
using eiskit::testing::rel_err;
using Catch::Approx;

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / double(v.size() - 1));
    return m;
}

PowerProfile device_profile() {
    PowerProfile p;
    p.n_channels = 4;
    p.points_per_cycle = 10;
    p.n_bits = 16;
    p.f_s = 1.0 / 0.013;
    p.v_batt = 3.7;
    return p;
}

}  // namespace

TEST_CASE("noise-free MARD model returns g_true") {
    MardModel m(0.0, 0.0, 1);
    for (double g : m.synthesize_noisy(120.0, 50)) CHECK(g == 120.0);
}

TEST_CASE("-1.25 percent bias maps 4000 to 3950") {
    MardModel m(-1.25, 0.0, 1);
    for (double g : m.synthesize_noisy(4000.0, 10)) CHECK(g == Approx(3950.0).epsilon(1e-15));
}

TEST_CASE("10 percent cv gives sample cv 0.10 +- 0.005 at n = 10000") {
    MardModel m(0.0, 10.0, 42);
    const auto mo = moments(m.synthesize_noisy(100.0, 10000));
    CHECK(std::abs(mo.sd / mo.mean - 0.10) < 0.005);
}

TEST_CASE("synthesis is deterministic per seed") {
    MardModel a(1.0, 5.0, 7), b(1.0, 5.0, 7), c(1.0, 5.0, 8);
    const auto x = a.synthesize_noisy(100.0, 100);
    CHECK(x == b.synthesize_noisy(100.0, 100));
    CHECK(x != c.synthesize_noisy(100.0, 100));
}

TEST_CASE("large-sample moments converge to the model within 3 sigma") {
    const double g = 150.0, b = -1.25, cv = 10.0;
    const std::size_t n = 100000;
    MardModel m(b, cv, 2024);
    const auto x = m.synthesize_noisy(g, n);
    const auto mo = moments(x);
    const double sigma = g * cv / 100.0;
    CHECK(std::abs(mo.mean - g * (1 + b / 100)) < 3.0 * sigma / std::sqrt(double(n)));
    // sd of the sample sd is about sigma / sqrt(2n).
    CHECK(std::abs(mo.sd - sigma) < 3.0 * sigma / std::sqrt(2.0 * double(n)));
}

TEST_CASE("MARD of synthesized data converges to the folded-normal mean") {
    const double want = golden("statistics.json")["mard_folded_normal_pct"].get<double>();
    MardModel m(-1.25, 10.0, 99);
    const auto x = m.synthesize_noisy(100.0, 100000);
    const std::vector<double> ref(x.size(), 100.0);
    // sd of |e| is below 10 percent points, so 3 sigma of the mean is < 0.1.
    CHECK(std::abs(mard(x, ref) - want) < 0.1);
}

TEST_CASE("MARD arithmetic") {
    const std::vector<double> ref{100.0, 50.0, 80.0};
    CHECK(mard(ref, ref) == 0.0);
    const std::vector<double> scaled{110.0, 55.0, 88.0};
    CHECK(mard(scaled, ref) == Approx(10.0).epsilon(1e-12));
    const std::vector<double> p2{90.0, 110.0}, r2{100.0, 100.0};
    CHECK(mard(p2, r2) == golden("closed_form.json")["mard_90_110"].get<double>());
    const std::vector<double> short_ref{100.0};
    CHECK_THROWS_AS(mard(p2, short_ref), DataError);
    const std::vector<double> zero_ref{100.0, 0.0};
    CHECK_THROWS_AS(mard(p2, zero_ref), DataError);
}

TEST_CASE("average current and battery lifetime") {
    const auto g = golden("closed_form.json");
    PowerProfile p;
    p.i_sleep = 10e-6;
    p.t_sleep = 99.0;
    p.i_active = 10e-3;
    p.t_active = 1.0;
    CHECK(rel_err(average_current(p), g["i_avg_duty_1_99"].get<double>()) < 1e-12);
    const double i215 = g["i_avg_for_215h"].get<double>();
    CHECK(battery_life_hours(0.3, i215) == Approx(215.0).epsilon(1e-12));
    CHECK(battery_life_hours(0.3, 1.3953e-3) == Approx(g["battery_h_1p3953ma"].get<double>()).epsilon(1e-12));
    CHECK(battery_life_hours(0.6, 1.3953e-3) == Approx(2.0 * battery_life_hours(0.3, 1.3953e-3)).epsilon(1e-15));
    CHECK(battery_life_hours(1.0, 1e-3) == Approx(1000.0).epsilon(1e-15));
    CHECK_THROWS_AS(battery_life_hours(0.3, 0.0), DomainError);
    PowerProfile zero;
    CHECK_THROWS_AS(average_current(zero), DomainError);
}

TEST_CASE("device figure of merit") {
    const auto g = golden("closed_form.json");
    const auto p = device_profile();
    const double i = g["i_avg_for_19nj"].get<double>();
    CHECK(rel_err(current_for_fom(p, 19e-9), i) < 1e-12);
    CHECK(fom_device(p, i) == Approx(19e-9).epsilon(1e-12));
    CHECK(rel_err(fom_device(p, 0.6470e-3), g["fom_device_0p6470ma"].get<double>()) < 1e-12);
    PowerProfile unit;
    unit.n_channels = 1;
    unit.points_per_cycle = 1;
    unit.v_batt = 1.0;
    unit.f_s = 1.0;
    unit.n_bits = 0;
    CHECK(fom_device(unit, 1.0) == 1.0);
}

TEST_CASE("device FOM is linear in n, p, V, I and inverse-linear in f_s and 2^NBITS") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::uniform_int_distribution<int> ui(1, 8), ub(0, 20);
    for (int k = 0; k < 200; ++k) {
        PowerProfile p;
        p.n_channels = ui(rng);
        p.points_per_cycle = ui(rng);
        p.v_batt = 3.0 * u(rng);
        p.f_s = 50.0 * u(rng);
        p.n_bits = ub(rng);
        const double i = 1e-3 * u(rng);
        const double base = fom_device(p, i);
        auto scaled = p;
        scaled.n_channels *= 2;
        CHECK(rel_err(fom_device(scaled, i), 2 * base) < 1e-14);
        scaled = p;
        scaled.points_per_cycle *= 3;
        CHECK(rel_err(fom_device(scaled, i), 3 * base) < 1e-14);
        scaled = p;
        scaled.v_batt *= 1.7;
        CHECK(rel_err(fom_device(scaled, i), 1.7 * base) < 1e-14);
        CHECK(rel_err(fom_device(p, 2.5 * i), 2.5 * base) < 1e-14);
        scaled = p;
        scaled.f_s *= 4.0;
        CHECK(rel_err(fom_device(scaled, i), base / 4) < 1e-14);
        scaled = p;
        scaled.n_bits += 1;
        CHECK(rel_err(fom_device(scaled, i), base / 2) < 1e-14);
    }
}

TEST_CASE("sensor figure of merit") {
    CHECK(fom_sensor({95.0, 8.0}) == Approx(11.875).epsilon(1e-15));
    CHECK(fom_sensor({42.0, 42.0}) == 1.0);
    CHECK(fom_sensor({100.0, 10.0}) == 10.0);
    CHECK_THROWS_AS(fom_sensor({95.0, 0.0}), DomainError);
    CHECK_THROWS_AS(fom_sensor({95.0, -1.0}), DomainError);
}

TEST_CASE("accuracy") {
    CHECK(accuracy(5.0, 5.0) == 0.0);
    CHECK(accuracy(3950.0, 4000.0) == Approx(-0.0125).epsilon(1e-14));
    CHECK(accuracy(1.1 * 7.0, 7.0) == Approx(0.10).epsilon(1e-12));
    CHECK_THROWS_AS(accuracy(1.0, 0.0), DomainError);
}

TEST_CASE("mismatch") {
    CHECK(mismatch(2.0, 2.0, 3.0, 3.0) == 0.0);
    CHECK(mismatch(2.0, 2.0, 3.3, 3.0) == Approx(0.10).epsilon(1e-12));
    const double a1 = 0.0125, a2 = 0.10;
    const double m = mismatch(4000.0 * (1 + a1), 4000.0, 120.0 * (1 + a2), 120.0);
    CHECK(m == Approx((1 + a2) / (1 + a1) - 1).epsilon(1e-12));
    CHECK(rel_err(m, golden("closed_form.json")["mismatch_a1_a2"].get<double>()) < 1e-12);
    CHECK_THROWS_AS(mismatch(0.0, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(mismatch(1.0, 0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(mismatch(1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("accuracy and mismatch are invariant under common scaling") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng), X = u(rng), y = u(rng), Y = u(rng), s = 1e3 * u(rng);
        CHECK(accuracy(s * x, s * X) == Approx(accuracy(x, X)).margin(1e-12));
        CHECK(mismatch(s * x, s * X, s * y, s * Y) == Approx(mismatch(x, X, y, Y)).margin(1e-12));
        CHECK(mismatch(s * x, s * X, y, Y) == Approx(mismatch(x, X, y, Y)).margin(1e-12));
    }
}

TEST_CASE("biases of uncorrelated sources add in percent") {
    const std::vector<double> b{-1.25, 0.5, 2.0};
    CHECK(combine_bias_pct(b) == Approx(1.25));
}

TEST_CASE("power profile config") {
    const auto p = profile_from_config(KeyValueConfig::parse_string(
        "i_sleep_a=1e-5\nt_sleep_s=99\ni_active_a=0.01\nt_active_s=1\ncapacity_mah=300\nt_conversion_s=0.013\n"));
    CHECK(p.battery_capacity == Approx(0.3));
    CHECK(p.f_s == Approx(1.0 / 0.013));
    CHECK(average_current(p) == Approx(1.099e-4));
    CHECK_THROWS_AS(profile_from_config(KeyValueConfig::parse_string("f_s_hz=10\nt_conversion_s=0.1\n")), ConfigError);
    CHECK_THROWS_AS(profile_from_config(KeyValueConfig::parse_string("unknown=1\n")), ConfigError);
}
