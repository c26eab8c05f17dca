#include "hydrostat/plant.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "hydrostat/errors.hpp"

namespace hydrostat {

namespace {

constexpr double kLeaderStopStiffness = 1e7;  // N/m
constexpr double kLeaderStopDamping = 2000.0;

double sq(double v) { return v * v; }

// Penalty stop: force pushing back into [lo, hi] and its stored energy.
struct Stop {
    double force = 0.0;
    double spring_energy = 0.0;
    double damping_force = 0.0;
};

Stop range_stop(double x, double v, double lo, double hi, double k, double c) {
    Stop s;
    if (x < lo) {
        const double d = lo - x;
        s.force = k * d;
        s.damping_force = -c * v;
        s.spring_energy = 0.5 * k * d * d;
    } else if (x > hi) {
        const double d = x - hi;
        s.force = -k * d;
        s.damping_force = -c * v;
        s.spring_energy = 0.5 * k * d * d;
    }
    return s;
}

double stops_energy(const SimConfig& c, const PlantState& s) {
    double e = range_stop(s.x_L, 0.0, 0.0, c.cylinders.leader_stroke, kLeaderStopStiffness, 0.0).spring_energy;
    e += range_stop(s.leg_length(c), 0.0, 0.0, c.exo.leg_stroke, c.exo.stop_stiffness, 0.0).spring_energy;
    if (s.z < 0.0) e += 0.5 * c.exo.ground_stiffness * s.z * s.z;
    return e;
}

// Kinetic, gravitational and contact-spring energy of cart and foot.
double cart_energy(const SimConfig& c, const PlantState& s) {
    const double m_cart = c.exo.proto_mass + s.payload;
    double e = 0.5 * m_cart * sq(s.vy) + 0.5 * c.exo.foot_mass * sq(s.vz);
    e += kGravity * (m_cart * s.y + c.exo.foot_mass * s.z);
    e += range_stop(s.leg_length(c), 0.0, 0.0, c.exo.leg_stroke, c.exo.stop_stiffness, 0.0).spring_energy;
    if (s.z < 0.0) e += 0.5 * c.exo.ground_stiffness * s.z * s.z;
    return e;
}

// Integral of (P - P_t) dV along a polytropic from (P1, gas volume g1) to gas volume g2.
double polytropic_work(double P1, double g1, double g2, double n) {
    if (g1 == g2) return 0.0;
    if (std::abs(n - 1.0) < 1e-12) return P1 * g1 * std::log(g1 / g2);
    const double k = P1 * std::pow(g1, n);
    return k * (std::pow(g2, 1.0 - n) - std::pow(g1, 1.0 - n)) / (n - 1.0);
}

}  // namespace

double EnergyLedger::closure() const {
    const double scale = std::max({input(), output(), dissipated()});
    if (scale <= 0.0) return std::abs(residual()) <= 1e-12 ? 0.0 : 1.0;
    return std::abs(residual()) / scale;
}

double stored_energy(const SimConfig& c, const PlantState& s) {
    const double Pt = c.tank_pressure;
    const LineParams line = c.line_params();
    const double m_cart = c.exo.proto_mass + s.payload;
    double e = 0.5 * c.motor.reflected_mass * sq(s.v_L);
    e += 0.5 * m_cart * sq(s.vy) + 0.5 * c.exo.foot_mass * sq(s.vz);
    e += kGravity * (m_cart * s.y + c.exo.foot_mass * s.z);
    e += stops_energy(c, s);
    e += 0.5 * c.line.leader_compliance * sq(s.P_L - Pt) + Pt * s.void_L;
    for (int i = 0; i < 2; ++i) {
        e += 0.5 * line.compliance * sq(s.P_line[i] - Pt) + Pt * s.void_line[i];
        e += 0.5 * line.inertance * sq(s.Q_line[i]);
    }
    return e;
}

Plant::Plant(SimConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    line_ = cfg_.line_params();
    pump_ = cfg_.pump.params();
}

double Plant::volume_for_pressure(double P_abs, double n) const {
    const auto& a = cfg_.accumulator;
    if (P_abs <= a.P_a0) return 0.0;
    return a.V_a0 * (1.0 - std::pow(a.P_a0 / P_abs, 1.0 / n));
}

void Plant::set_accumulator(PlantState& s, double P_abs) const {
    const double n = cfg_.sim.polytropic == PolytropicMode::Adiabatic ? 1.4 : 1.0;
    s.n_gas = n;
    if (P_abs < cfg_.accumulator.P_a0) P_abs = cfg_.accumulator.P_a0;
    s.V_a = volume_for_pressure(P_abs, n);
    s.P_gas = s.V_a > 0.0 ? P_abs : cfg_.accumulator.P_a0;
    s.P_a = s.P_gas;
}

double Plant::balanced_leader_pressure(const PlantState& s) const {
    const double pa = cfg_.sim.accumulator_connected ? s.P_a - cfg_.tank_pressure : 0.0;
    return cfg_.tank_pressure + pa * cfg_.cylinders.A / cfg_.cylinders.A_r;
}

void Plant::step(PlantState& s, const PlantInputs& u, EnergyLedger& L) {
    const auto& c = cfg_;
    const double dt = c.sim.dt_plant;
    const double Pt = c.tank_pressure;
    const double A = c.cylinders.A, Ar = c.cylinders.A_r;
    const double R = c.exo.knee_ratio;
    const bool acc_on = c.sim.accumulator_connected;

    // Valve servos.
    for (int i = 0; i < 2; ++i) {
        const double th = valve_servo_step(c.valves, s.theta[i], u.theta_target[i], dt, c.controller.variable_speed_valves);
        L.valve_actuation += c.sim.valve_energy_per_deg * std::abs(th - s.theta[i]);
        s.theta[i] = th;
    }
    {
        const double th = valve_servo_step(c.valves, s.theta_a, u.theta_a_target, dt, false);
        L.valve_actuation += c.sim.valve_energy_per_deg * std::abs(th - s.theta_a);
        s.theta_a = th;
    }

    // Motor (ideal current loop) and pump (ideal speed loop, only with the charge path open).
    const double I_max = c.motor.peak_torque / c.motor.torque_constant;
    s.I_M = std::clamp(u.I_cmd, -I_max, I_max);
    const bool charge_open = acc_on && s.theta_a > c.valves.band_hi;
    s.omega_p = charge_open ? std::clamp(u.omega_cmd, -c.pump.max_speed, c.pump.max_speed) : 0.0;
    const double pa = acc_on ? s.P_a - Pt : 0.0;
    const double Q_pump = charge_open ? pump_flow(pump_, s.omega_p, pa) : 0.0;
    flows_.Q_pump = Q_pump;

    // Leg lines: implicit in the junction pressure and line flow.
    const double pL = s.P_L - Pt;
    double leader_out = 0.0;
    for (int i = 0; i < 2; ++i) {
        const PortCv cv = valve_cv(c.valves, s.theta[i]);
        const double pi = s.P_line[i] - Pt;
        const double Q_old = s.Q_line[i];
        const double a = dt / line_.inertance;
        const double denom = 1.0 + dt * line_.resistance / line_.inertance;
        auto inflow = [&](double pj, double& qL, double& qT, double& qC) {
            qL = orifice_flow(cv.leader, pL - pj);
            qT = orifice_flow(cv.tank, -pj);
            qC = c.sim.check_valves ? check_valve_flow(c.check_valve, pj - pL) : 0.0;  // junction -> leader
            return qL + qT - qC;
        };
        auto g = [&](double pj) {
            double qL, qT, qC;
            return inflow(pj, qL, qT, qC) - (Q_old + a * (pj - pi)) / denom;
        };
        double lo = std::min({pL, 0.0, pi}) - 1e5, hi = std::max({pL, 0.0, pi}) + 1e5;
        const double q_span = std::abs(Q_old) * denom / a;
        lo -= q_span;
        hi += q_span;
        while (g(lo) < 0.0) lo -= (hi - lo);
        while (g(hi) > 0.0) hi += (hi - lo);
        // Bisect to machine precision: the orifice law is infinitely steep at zero drop.
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (g(mid) > 0.0 ? lo : hi) = mid;
        }
        const double pj = 0.5 * (lo + hi);
        double qL, qT, qC;
        const double Q = inflow(pj, qL, qT, qC);
        flows_.q_leader[i] = qL;
        flows_.q_tank[i] = qT;
        flows_.q_check[i] = qC;

        L.orifice += (qL * (pL - pj) + qT * (0.0 - pj)) * dt;
        L.check_valve += qC * (pj - pL) * dt;
        L.line_resistance += line_.resistance * Q * Q * dt;
        s.Q_line[i] = Q;
        leader_out += qL - qC;
    }

    // Leader piston.
    const double F_m = motor_force(c.motor, c.ballscrew, s.I_M);
    const double F_f = friction_pressure(c.friction, s.I_M, s.v_L, c.motor.torque_constant, c.ballscrew.lead, Ar) * Ar;
    const Stop lstop = range_stop(s.x_L, s.v_L, 0.0, c.cylinders.leader_stroke, kLeaderStopStiffness, kLeaderStopDamping);
    const double F_L = F_m + pa * A - pL * Ar - F_f + lstop.force + lstop.damping_force;
    s.v_L += dt * F_L / c.motor.reflected_mass;
    s.x_L += dt * s.v_L;
    flows_.motor_force = F_m;
    flows_.friction_force = F_f;

    const double P_motor = c.motor.winding_resistance * sq(s.I_M) + F_m * s.v_L;
    (P_motor >= 0.0 ? L.motor_in : L.motor_out) += std::abs(P_motor) * dt;
    L.joule += c.motor.winding_resistance * sq(s.I_M) * dt;
    L.motor_joule_integral += sq(s.I_M) * dt;
    L.friction += F_f * s.v_L * dt;
    L.stops += -lstop.damping_force * s.v_L * dt;

    // Pump shaft power with leakage dissipation.
    if (charge_open) {
        const double shaft = (pump_.V_displ + pump_.beta) * s.omega_p * pa;
        (shaft >= 0.0 ? L.pump_in : L.pump_out) += std::abs(shaft) * dt;
        L.pump_leakage += pump_.alpha * pa * pa * dt;
    }

    // Cart and foot.
    const double m_cart = c.exo.proto_mass + s.payload;
    const double F_leg = R * A * ((s.P_line[0] - Pt) + (s.P_line[1] - Pt));
    flows_.leg_force = F_leg;
    double vF = 0.0;
    if (u.mode == OutputMode::Free) {
        const double ell = s.leg_length(c);
        const double ell_dot = s.vy - s.vz;
        const Stop st = range_stop(ell, ell_dot, 0.0, c.exo.leg_stroke, c.exo.stop_stiffness, c.exo.stop_damping);
        double F_ground = 0.0, F_gd = 0.0;
        if (s.z < 0.0) {
            F_ground = -c.exo.ground_stiffness * s.z;
            F_gd = -c.exo.ground_damping * s.vz;
        }
        flows_.ground_force = F_ground + F_gd;
        const double F_pair = F_leg + st.force + st.damping_force;  // pushes cart up, foot down
        s.vy += dt * (F_pair / m_cart - kGravity);
        s.vz += dt * ((-F_pair + F_ground + F_gd) / c.exo.foot_mass - kGravity);
        s.y += dt * s.vy;
        s.z += dt * s.vz;
        const double ell_dot_new = s.vy - s.vz;
        L.stops += -st.damping_force * ell_dot_new * dt;
        L.contact += -F_gd * s.vz * dt;
        vF = R * ell_dot_new;
    } else {
        // Kinematically driven output: whatever moves the cart is an external source.
        const double e0 = cart_energy(c, s);
        s.vz = 0.0;
        s.vy = u.mode == OutputMode::Prescribed ? u.leg_rate : 0.0;
        s.y += dt * s.vy;
        vF = R * s.vy;
        flows_.ground_force = 0.0;
        const double w = cart_energy(c, s) - e0 - F_leg * s.vy * dt;
        (w >= 0.0 ? L.external_in : L.external_out) += std::abs(w);
    }

    // Node pressures.
    auto integrate_node = [&](double& P, double& vvoid, double C, double dV_in) {
        if (vvoid > 0.0) {
            const double fill = std::min(vvoid, dV_in);
            vvoid -= fill;
            dV_in -= fill;
            if (vvoid > 0.0) return;
        }
        P += dV_in / C;
        if (P < 0.0) {
            vvoid += -P * C;
            P = 0.0;
        }
    };

    for (int i = 0; i < 2; ++i) {
        integrate_node(s.P_line[i], s.void_line[i], line_.compliance, (s.Q_line[i] - A * vF) * dt);
    }
    integrate_node(s.P_L, s.void_L, c.line.leader_compliance, (Ar * s.v_L - leader_out) * dt);

    // Accumulator.
    if (acc_on) {
        const double dV = (Q_pump - A * s.v_L) * dt;
        if (c.sim.polytropic == PolytropicMode::Auto) {
            const double r = std::abs(dV / dt);
            if (s.n_gas < 1.2 && r > 5.0 * units::mL) s.n_gas = 1.4;
            else if (s.n_gas > 1.2 && r < 2.5 * units::mL) s.n_gas = 1.0;
        } else {
            s.n_gas = c.sim.polytropic == PolytropicMode::Adiabatic ? 1.4 : 1.0;
        }
        const double V0 = c.accumulator.V_a0, Ce = c.line.leader_compliance;
        const double V = s.V_a, Vn = s.V_a + dV;
        double work = 0.0;
        auto gas_segment = [&] {
            const double g_lo = std::max(V, 0.0), g_hi = std::max(Vn, 0.0);
            if (g_lo == g_hi) return;
            const double g1 = V0 - g_lo, g2 = V0 - g_hi;
            if (g2 <= 0.0) throw SimulationFault("accumulator over-filled: " + describe(s));
            work += polytropic_work(s.P_gas, g1, g2, s.n_gas);
            s.P_gas *= std::pow(g1 / g2, s.n_gas);
            if (s.P_gas > c.accumulator.P_max) throw SimulationFault("accumulator above rated pressure: " + describe(s));
        };
        // Emptied: liquid pressure falls on a stiff compliance below the frozen gas pressure.
        auto empty_segment = [&] {
            const double e_lo = std::min(V, 0.0), e_hi = std::min(Vn, 0.0);
            if (e_lo == e_hi) return;
            auto F = [&](double v) {
                const double vc = std::max(v, -s.P_gas * Ce);
                return s.P_gas * vc + vc * vc / (2.0 * Ce);
            };
            work += F(e_hi) - F(e_lo);
        };
        if (dV >= 0.0) {
            empty_segment();
            gas_segment();
        } else {
            gas_segment();
            empty_segment();
        }
        work -= Pt * dV;
        L.gas_work += work;
        s.V_a = Vn;
        s.P_a = Vn >= 0.0 ? s.P_gas : std::max(0.0, s.P_gas + Vn / Ce);
    }

    s.t += dt;

    if (!std::isfinite(s.x_L) || !std::isfinite(s.y) || !std::isfinite(s.P_L) || !std::isfinite(s.P_line[0]) ||
        !std::isfinite(s.P_line[1]) || !std::isfinite(s.P_a))
        throw SimulationFault("non-finite plant state: " + describe(s));
}

std::string describe(const PlantState& s) {
    return fmt::format(
        "t={:.4f} x_L={:.5f} v_L={:.4f} V_a={:.3f}mL P_a={:.4f}MPa P_L={:.4f}MPa P1={:.4f}MPa P2={:.4f}MPa "
        "th1={:.1f} th2={:.1f} I={:.3f} y={:.4f} vy={:.4f} z={:.4f}",
        s.t, s.x_L, s.v_L, s.V_a / units::mL, s.P_a / units::MPa, s.P_L / units::MPa, s.P_line[0] / units::MPa,
        s.P_line[1] / units::MPa, s.theta[0], s.theta[1], s.I_M, s.y, s.vy, s.z);
}

}  // namespace hydrostat
