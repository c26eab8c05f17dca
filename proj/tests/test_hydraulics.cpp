#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrostat/errors.hpp"
#include "hydrostat/hydraulics.hpp"

using namespace hydrostat;

namespace {

// Midpoint-rule integral of the gas law, independent of the closed form.
double numeric_work(const AccumulatorParams& p, double V1, double V2, int steps) {
    const double h = (V2 - V1) / steps;
    double w = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double V = V1 + (i + 0.5) * h;
        w += p.P_a0 * std::pow(p.V_a0 / (p.V_a0 - V), p.n) * h;
    }
    return w;
}

}  // namespace

TEST_CASE("accumulator pressure examples") {
    AccumulatorParams p;
    CHECK(accumulator_pressure(p, 0.0) == p.P_a0);
    CHECK(accumulator_pressure(p, 250.0 * units::mL) == doctest::Approx(2.06e6).epsilon(1e-12));
    p.n = 1.4;
    CHECK(accumulator_pressure(p, 250.0 * units::mL) == doctest::Approx(1.03e6 * std::pow(2.0, 1.4)).epsilon(1e-12));
}

TEST_CASE("accumulator limits") {
    AccumulatorParams p;
    CHECK_THROWS_AS(accumulator_pressure(p, -1e-9), InvalidInput);
    CHECK_THROWS_AS(accumulator_pressure(p, p.V_a0), SimulationFault);
    CHECK_THROWS_AS(accumulator_pressure(p, p.V_a0 * 1.1), SimulationFault);
    const double vmax = accumulator_max_volume(p);
    CHECK(accumulator_pressure(p, 0.999 * vmax) < p.P_max);
    CHECK_THROWS_AS(accumulator_pressure(p, 1.001 * vmax), SimulationFault);
}

TEST_CASE("accumulator curve family ordering") {
    AccumulatorParams base;
    AccumulatorParams high = base;
    high.P_a0 = 1.5e6;
    AccumulatorParams big = base;
    big.V_a0 = 750.0 * units::mL;
    for (double V = 10.0 * units::mL; V < 400.0 * units::mL; V += 10.0 * units::mL) {
        CHECK(accumulator_pressure(high, V) > accumulator_pressure(base, V));
        CHECK(accumulator_pressure(big, V) < accumulator_pressure(base, V));
    }
}

TEST_CASE("gas work matches quadrature") {
    for (double n : {1.0, 1.4}) {
        AccumulatorParams p;
        p.n = n;
        const double V2 = 300.0 * units::mL;
        const double closed = accumulator_work(p, 0.0, V2);
        CHECK(numeric_work(p, 0.0, V2, 10000) == doctest::Approx(closed).epsilon(0.005));
        CHECK(accumulator_work(p, V2, 0.0) == doctest::Approx(-closed).epsilon(1e-12));
    }
}

TEST_CASE("polytropic selector hysteresis") {
    PolytropicSelector sel;
    CHECK(sel.update(1.0 * units::mL) == 1.0);
    CHECK(sel.update(6.0 * units::mL) == 1.4);
    CHECK(sel.update(3.0 * units::mL) == 1.4);
    CHECK(sel.update(-2.0 * units::mL) == 1.0);
}

TEST_CASE("pump flow") {
    const auto p = PumpParams::from_slopes(0.10 * units::mL, 9709.0, 9.5 / units::mL);
    CHECK(pump_flow(p, 0.0, 0.0) == 0.0);
    for (double w : {-50.0, 10.0, 200.0}) CHECK(pump_flow(p, w, 0.0) == doctest::Approx((p.V_displ + p.beta) * w));
    // Stall: flow vanishes where dP / omega equals the pressure-speed slope.
    const double w = 100.0;
    CHECK(pump_flow(p, w, 9709.0 * w) == doctest::Approx(0.0).epsilon(1e-12).scale(1e-6));
    CHECK(p.m_P() == doctest::Approx(9709.0));
    CHECK(pump_flow(p, 0.0, 1e6) < 0.0);
}

TEST_CASE("pump speed command") {
    const auto p = PumpParams::from_slopes(0.10 * units::mL, 9709.0, 9.5 / units::mL);
    CHECK(pump_speed_cmd(p, 0.0, 0.0) == 0.0);
    CHECK(pump_speed_cmd(p, 1.0 * units::mL, 0.0) == doctest::Approx(9.5));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> q(-5e-6, 5e-6), pa(0.0, 3e6);
    for (int i = 0; i < 100; ++i) {
        const double Qd = q(rng), Pa = pa(rng);
        CHECK(pump_flow(p, pump_speed_cmd(p, Qd, Pa), Pa) == doctest::Approx(Qd).scale(1e-9));
    }
    CHECK_THROWS_AS(PumpParams::from_slopes(0.1 * units::mL, 9709.0, 20.0 / units::mL), InvalidInput);
    CHECK_THROWS_AS(PumpParams::from_slopes(0.0, 9709.0, 9.5 / units::mL), InvalidInput);
}

TEST_CASE("friction model") {
    const FrictionParams f;
    const MotorParams m;
    const BallscrewParams bs;
    const CylinderParams cyl;
    auto fr = [&](double I, double v) { return friction_pressure(f, I, v, m.torque_constant, bs.lead, cyl.A_r); };
    CHECK(fr(0.0, 0.0) == 0.0);
    CHECK(fr(10.0, 0.0) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> I(-15.0, 15.0), v(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double a = I(rng), b = v(rng);
        CHECK(fr(a, b) * b >= 0.0);
        CHECK(fr(a, -b) == doctest::Approx(-fr(a, b)));
    }
    // Far onto the Coulomb plateau the slope is the viscous term.
    const double x = 0.5, h = 1e-4;
    CHECK((fr(2.0, x + h) - fr(2.0, x - h)) / (2.0 * h) == doctest::Approx(f.b).epsilon(0.01));
    // Load-dependent ballscrew term.
    CHECK(fr(10.0, 0.5) > fr(0.0, 0.5));
}

TEST_CASE("motor force and current are inverse") {
    const MotorParams m;
    const BallscrewParams bs;
    for (double F : {-500.0, 0.0, 123.0, 2000.0}) CHECK(motor_force(m, bs, current_for_force(m, bs, F)) == doctest::Approx(F));
}

TEST_CASE("valve flow coefficient shape") {
    const ValveParams v;
    for (double th = v.band_lo; th <= v.band_hi; th += 0.5) {
        CHECK(valve_cv(v, th).tank == 0.0);
        CHECK(valve_cv(v, th).leader == 0.0);
        CHECK(valve_flow(v, th, 1e6) == 0.0);
    }
    CHECK(valve_cv(v, 0.0).tank == v.cv_max);
    CHECK(valve_cv(v, 180.0).leader == v.cv_max);
    double prev_t = valve_cv(v, 0.0).tank, prev_l = valve_cv(v, 0.0).leader;
    double max_jump = 0.0;
    for (double th = 0.01; th <= 180.0; th += 0.01) {
        const auto c = valve_cv(v, th);
        CHECK(c.tank <= prev_t);
        CHECK(c.leader >= prev_l);
        CHECK(c.tank >= 0.0);
        max_jump = std::max({max_jump, std::abs(c.tank - prev_t), std::abs(c.leader - prev_l)});
        prev_t = c.tank;
        prev_l = c.leader;
    }
    CHECK(max_jump < 1e-3 * v.cv_max);
}

TEST_CASE("orifice symmetry") {
    const ValveParams v;
    for (double th : {110.0, 140.0, 180.0}) {
        for (double dP : {1e3, 2e5, 3e6}) CHECK(valve_flow(v, th, -dP) == -valve_flow(v, th, dP));
    }
    CHECK(orifice_flow(2e-6, 4e4) == doctest::Approx(2e-6 * 200.0));
}

TEST_CASE("check valve is one-way with cracking pressure") {
    const CheckValveParams c;
    CHECK(check_valve_flow(c, -1e6) == 0.0);
    CHECK(check_valve_flow(c, c.cracking) == 0.0);
    CHECK(check_valve_flow(c, c.cracking + 1e4) == doctest::Approx(c.cv * 100.0));
}

TEST_CASE("variable speed profile") {
    const ValveParams v;
    CHECK(variable_speed_switch_profile(v, 0.0) == v.max_speed);
    CHECK(variable_speed_switch_profile(v, 180.0) == v.max_speed);
    CHECK(variable_speed_switch_profile(v, 90.0) == doctest::Approx(260.0));
    // Continuous: Lipschitz with the ramp slope.
    const double lip = v.max_speed * (1.0 - v.slow_ratio) / v.ramp;
    double prev = variable_speed_switch_profile(v, 0.0);
    for (double th = 0.01; th <= 180.0; th += 0.01) {
        const double s = variable_speed_switch_profile(v, th);
        CHECK(std::abs(s - prev) <= lip * 0.01 * (1.0 + 1e-6));
        prev = s;
    }
}

TEST_CASE("valve servo switch timing") {
    const ValveParams v;
    const double dt = 1e-4;
    double th = 0.0, t = 0.0, t113 = -1.0;
    while (th < 179.5 && t < 1.0) {
        th = valve_servo_step(v, th, 180.0, dt, false);
        t += dt;
        if (t113 < 0.0 && th >= 113.0) t113 = t;
    }
    CHECK(t == doctest::Approx(0.080).epsilon(0.15));
    CHECK(t113 > 0.0);
    CHECK(t113 <= 0.060);
    // Never overshoots the target.
    CHECK(valve_servo_step(v, 179.99, 180.0, 1.0, false) == 180.0);
}

TEST_CASE("line resonance round trip") {
    const auto l = LineParams::from_resonance(4e-13, 30.0, 0.1);
    CHECK(l.natural_frequency() == doctest::Approx(30.0));
    CHECK(l.inertance > 0.0);
    CHECK(l.resistance > 0.0);
    CHECK_THROWS_AS(LineParams::from_resonance(0.0, 30.0, 0.1), InvalidInput);
}
