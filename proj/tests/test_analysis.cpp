#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "hydrostat/analysis.hpp"
#include "hydrostat/errors.hpp"

using namespace hydrostat;

namespace {

TaskScenario two_leg(std::vector<double> right, std::vector<double> left, double dt = 1e-3) {
    TaskScenario sc;
    sc.right.samples = std::move(right);
    sc.left.samples = std::move(left);
    sc.right.dt = sc.left.dt = dt;
    sc.right.period = sc.left.period = dt * static_cast<double>(sc.right.samples.size());
    return sc;
}

const TaskScenario& walk() {
    static const TaskScenario sc = make_scenario(synth_profile(Task::Walk));
    return sc;
}

}  // namespace

TEST_CASE("variant labels are a bijection") {
    std::string labels;
    for (auto v : all_variants()) {
        labels += v.label();
        CHECK(DesignVariant::from_label(v.label()) == v);
    }
    CHECK(labels == "ABCD");
    CHECK_THROWS_AS(DesignVariant::from_label('E'), InvalidInput);
}

TEST_CASE("rms closed forms") {
    std::vector<double> c(37, 5.0);
    CHECK(rms(c) == doctest::Approx(5.0).epsilon(1e-15));
    std::vector<double> sq(1000, 0.0);
    for (int i = 0; i < 500; ++i) sq[i] = 10.0;
    CHECK(rms(sq) == doctest::Approx(10.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rms(std::vector<double>{}), InvalidInput);
}

TEST_CASE("sharing demand arithmetic") {
    auto sc = two_leg({5.0, 5.0, 0.0, 0.0}, {3.0, 0.0, 3.0, 0.0});
    const auto d = demand(sc, DesignVariant::C(), 0.0);
    REQUIRE(d.motor_count == 1);
    CHECK(d.force[0][0] == 4.0);
    CHECK(d.force[0][1] == 5.0);
    CHECK(d.force[0][2] == 3.0);
    CHECK(d.force[0][3] == 0.0);
}

TEST_CASE("offset branch never produces the negative offset when aerial") {
    auto sc = two_leg({10.0, 0.0}, {10.0, 0.0});
    const auto d = demand(sc, DesignVariant::B(), 8.0);
    REQUIRE(d.motor_count == 2);
    CHECK(d.force[0][0] == 2.0);
    CHECK(d.force[0][1] == 0.0);
}

TEST_CASE("demand errors") {
    const auto& sc = walk();
    CHECK_THROWS_AS(demand(sc, DesignVariant::B(), -1.0), InvalidInput);
    CHECK_THROWS_AS(demand(sc, DesignVariant::A(), 1.0), InvalidInput);
    CHECK_THROWS_AS(demand(sc, DesignVariant::C(), 1.0), InvalidInput);
}

TEST_CASE("battery loss fractions") {
    CHECK(loss_fraction(0.9) == doctest::Approx(0.2111).epsilon(1e-3));
    CHECK(loss_fraction(0.7) == doctest::Approx(0.7286).epsilon(1e-3));
    CHECK_THROWS_AS(loss_fraction(0.0), InvalidInput);
}

TEST_CASE("battery power of zero demand is zero") {
    auto sc = two_leg(std::vector<double>(100, 0.0), std::vector<double>(100, 0.0));
    const auto d = demand(sc, DesignVariant::A(), 0.0, {0.4, 2});
    EfficiencyParams e{0.9, 0.9, 0.8, 0.093, 100.0};
    CHECK(battery_power(d, e, 80.0) == 0.0);
    e.torque_constant = 0.0;
    CHECK_THROWS_AS(battery_power(d, e, 80.0), InvalidInput);
}

TEST_CASE("battery power is monotone in resistance, power and efficiency") {
    const auto d = demand(walk(), DesignVariant::A(), 0.0);
    EfficiencyParams e{0.9, 0.9, 0.5, 0.093, 300.0};
    const double base = battery_power(d, e, 80.0);
    CHECK(base > 0.0);
    auto e2 = e;
    e2.winding_resistance = 1.0;
    CHECK(battery_power(d, e2, 80.0) >= base);
    auto e3 = e;
    e3.eta_gen = 0.7;
    CHECK(battery_power(d, e3, 80.0) > base);
    const auto faster = demand(walk(), DesignVariant::A(), 0.0, {0.8, 2});
    CHECK(battery_power(faster, e, 80.0) > base);
}

TEST_CASE("walk table-II analogue") {
    const auto a = metrics(demand(walk(), DesignVariant::A(), 0.0));
    REQUIRE(a.size() == 2);
    CHECK(a[0].f_dyn_rms == doctest::Approx(6.5).epsilon(0.1));
    CHECK(a[0].f_dyn_peak == doctest::Approx(13.4).epsilon(0.01));
    CHECK(a[0].v_max == doctest::Approx(0.4).epsilon(1e-3));
    const auto c = metrics(demand(walk(), DesignVariant::C(), 0.0));
    REQUIRE(c.size() == 1);
    CHECK(c[0].v_max == 2.0 * a[0].v_max);
    const auto d = metrics(demand(walk(), DesignVariant::D(), 8.2));
    CHECK(d[0].f_dyn_rms == doctest::Approx(2.4).epsilon(0.1));
    for (const auto& m : {a[0], a[1], c[0], d[0]}) {
        CHECK(m.f_dyn_rms <= m.f_dyn_peak);
        CHECK(m.mean_abs_power >= 0.0);
    }
}

TEST_CASE("design table rows, ratios and emission") {
    std::vector<TaskScenario> set{walk(), make_scenario(synth_profile(Task::Run)),
                                  make_scenario(synth_profile(Task::Jump))};
    OffsetMap off{{Task::Walk, {{'B', 7.27}, {'D', 8.2}}},
                  {Task::Run, {{'B', 8.5}, {'D', 8.5}}},
                  {Task::Jump, {{'B', 4.9}, {'D', 4.9}}}};
    const auto t = design_table(set, off);
    REQUIRE(t.rows.size() == 12);
    REQUIRE(t.ratios.size() == 3);
    CHECK(t.ratios[0].rms_ratio_per_motor == doctest::Approx(2.7).epsilon(0.15));
    CHECK(t.ratios[0].rms_ratio_total > t.ratios[0].rms_ratio_per_motor);

    // Brute-force oracle for the run Design-B row.
    const auto& run = set[1].right.samples;
    double acc = 0.0;
    for (double f : run) {
        const double v = f > kDefaultContactThreshold ? f - 8.5 : 0.0;
        acc += v * v;
    }
    CHECK(t.rows[5].variant == 'B');
    CHECK(t.rows[5].f_dyn_rms == doctest::Approx(std::sqrt(acc / run.size())).epsilon(1e-12));

    // Jump reports peaks only.
    CHECK(std::isnan(t.rows[8].f_dyn_rms));
    CHECK(t.rows[8].f_dyn_peak > 0.0);

    const auto csv = design_table_csv(t);
    CHECK(csv.rfind("task,variant,f_dyn_rms,f_dyn_peak,mean_abs_P,v_max,f_stat\n", 0) == 0);
    const auto j = nlohmann::json::parse(design_table_json(t));
    CHECK(j["rows"].size() == 12);
    CHECK(j["rows"][8]["f_dyn_rms"].is_null());

    OffsetMap missing{{Task::Walk, {{'B', 7.0}}}};
    CHECK_THROWS_AS(design_table({walk()}, missing), InvalidInput);
}

TEST_CASE("property: offset dominance for offsets below the smallest load") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> f(200);
        for (auto& v : f) v = u(rng);
        for (int i = 0; i < 50; ++i) f[rng() % 200] = 0.0;
        auto sc = two_leg(f, f);
        double min_pos = 1e9;
        for (double v : f) if (v > kDefaultContactThreshold) min_pos = std::min(min_pos, v);
        const double ra = metrics(demand(sc, DesignVariant::A(), 0.0))[0].f_dyn_rms;
        CHECK(metrics(demand(sc, DesignVariant::B(), 0.0))[0].f_dyn_rms == ra);
        for (double s : {0.25 * min_pos, 0.5 * min_pos, min_pos}) {
            CHECK(metrics(demand(sc, DesignVariant::B(), s))[0].f_dyn_rms < ra);
        }
    }
}

TEST_CASE("property: sharing conservation and speed sum") {
    const auto& sc = walk();
    const auto d = demand(sc, DesignVariant::C(), 0.0);
    const auto v = leg_speeds(sc, default_speed_model(Task::Walk));
    for (std::size_t i = 0; i < sc.size(); ++i) {
        const int n = sc.legs_in_contact(i);
        if (n == 2) REQUIRE(d.force[0][i] * 2 == doctest::Approx(sc.right.samples[i] + sc.left.samples[i]).epsilon(1e-15));
        if (n == 1) {
            const double loaded = sc.in_contact(0, i) ? sc.right.samples[i] : sc.left.samples[i];
            const double other = sc.in_contact(0, i) ? sc.left.samples[i] : sc.right.samples[i];
            REQUIRE(d.force[0][i] == loaded + other);
        }
        REQUIRE(d.speed[0][i] == v[0][i] + v[1][i]);
    }
}

TEST_CASE("property: demand and metrics are homogeneous of degree one") {
    auto p = synth_profile(Task::Run);
    const auto m1 = metrics(demand(make_scenario(p), DesignVariant::D(), 4.0));
    for (auto& v : p.samples) v *= 2.0;
    const auto m2 = metrics(demand(make_scenario(p, -1.0, 2.0 * kDefaultContactThreshold), DesignVariant::D(), 8.0));
    CHECK(m2[0].f_dyn_rms == doctest::Approx(2.0 * m1[0].f_dyn_rms).epsilon(1e-12));
    CHECK(m2[0].f_dyn_peak == doctest::Approx(2.0 * m1[0].f_dyn_peak).epsilon(1e-12));
    CHECK(m2[0].mean_abs_power == doctest::Approx(2.0 * m1[0].mean_abs_power).epsilon(1e-12));
}
