#include "hydrostat/hydraulics.hpp"

#include <algorithm>
#include <cmath>

#include "hydrostat/errors.hpp"

namespace hydrostat {

double accumulator_max_volume(const AccumulatorParams& p) {
    return p.V_a0 * (1.0 - std::pow(p.P_a0 / p.P_max, 1.0 / p.n));
}

double accumulator_pressure(const AccumulatorParams& p, double V_a) {
    if (V_a < 0.0) throw InvalidInput("negative accumulator liquid volume");
    const double gas = p.V_a0 - V_a;
    if (gas <= 0.0) throw SimulationFault("accumulator over-filled: gas volume <= 0");
    const double P = p.P_a0 * std::pow(p.V_a0 / gas, p.n);
    if (P > p.P_max) throw SimulationFault("accumulator pressure above rated maximum");
    return P;
}

double accumulator_work(const AccumulatorParams& p, double V1, double V2) {
    const double g1 = p.V_a0 - V1, g2 = p.V_a0 - V2;
    if (std::abs(p.n - 1.0) < 1e-12) return p.P_a0 * p.V_a0 * std::log(g1 / g2);
    const double k = p.P_a0 * std::pow(p.V_a0, p.n);
    return k * (std::pow(g2, 1.0 - p.n) - std::pow(g1, 1.0 - p.n)) / (p.n - 1.0);
}

double PolytropicSelector::update(double dVdt) {
    const double r = std::abs(dVdt);
    if (n_ < 1.2 && r > up_) n_ = 1.4;
    else if (n_ > 1.2 && r < down_) n_ = 1.0;
    return n_;
}

PumpParams PumpParams::from_slopes(double V_displ, double m_P, double m_Q) {
    if (!(V_displ > 0.0 && m_P > 0.0 && m_Q > 0.0)) throw InvalidInput("pump slopes must be positive");
    PumpParams p;
    p.V_displ = V_displ;
    p.beta = 1.0 / m_Q - V_displ;
    if (p.beta < 0.0 || p.beta >= V_displ) {
        throw InvalidInput("pump displacement inconsistent with speed slope (need 0 <= beta < V_displ)");
    }
    p.alpha = (V_displ + p.beta) / m_P;
    return p;
}

double pump_flow(const PumpParams& p, double omega, double dP) {
    return p.V_displ * omega - (p.alpha * dP - p.beta * omega);
}

double pump_speed_cmd(const PumpParams& p, double Q_d, double P_a) {
    return p.m_Q() * Q_d + P_a / p.m_P();
}

double friction_pressure(const FrictionParams& f, double current, double xdot, double torque_constant,
                         double lead, double area_r) {
    const double load = std::abs(current * torque_constant / (lead * area_r));
    return (f.mu_seal + (1.0 - f.eta_bs) * load) * std::tanh(f.gamma * xdot) + f.b * xdot;
}

double motor_force(const MotorParams& m, const BallscrewParams& bs, double current) {
    return current * m.torque_constant / bs.lead;
}

double current_for_force(const MotorParams& m, const BallscrewParams& bs, double force) {
    return force * bs.lead / m.torque_constant;
}

PortCv valve_cv(const ValveParams& v, double theta) {
    theta = std::clamp(theta, 0.0, 180.0);
    PortCv c;
    if (theta < v.band_lo) c.tank = v.cv_max * (v.band_lo - theta) / v.band_lo;
    if (theta > v.band_hi) c.leader = v.cv_max * (theta - v.band_hi) / (180.0 - v.band_hi);
    return c;
}

double orifice_flow(double cv, double dP) {
    return dP >= 0.0 ? cv * std::sqrt(dP) : -cv * std::sqrt(-dP);
}

double valve_flow(const ValveParams& v, double theta, double dP_leader_side) {
    return orifice_flow(valve_cv(v, theta).leader, dP_leader_side);
}

double variable_speed_switch_profile(const ValveParams& v, double theta) {
    const double d = std::max({v.band_lo - theta, theta - v.band_hi, 0.0});
    const double slow = v.max_speed * v.slow_ratio;
    if (d <= v.slow_margin) return slow;
    if (d >= v.slow_margin + v.ramp || v.ramp <= 0.0) return v.max_speed;
    return slow + (v.max_speed - slow) * (d - v.slow_margin) / v.ramp;
}

double valve_servo_step(const ValveParams& v, double theta, double target, double dt, bool variable_speed) {
    const double cap = variable_speed ? variable_speed_switch_profile(v, theta) : v.max_speed;
    const double rate = std::clamp((target - theta) / v.tau, -cap, cap);
    double next = theta + rate * dt;
    // Do not step past the target.
    if ((target - theta) * (target - next) < 0.0) next = target;
    return std::clamp(next, 0.0, 180.0);
}

double check_valve_flow(const CheckValveParams& c, double dP) {
    return dP > c.cracking ? c.cv * std::sqrt(dP - c.cracking) : 0.0;
}

LineParams LineParams::from_resonance(double compliance, double natural_hz, double zeta) {
    if (!(compliance > 0.0 && natural_hz > 0.0 && zeta > 0.0)) throw InvalidInput("line parameters must be positive");
    LineParams l;
    l.compliance = compliance;
    const double w = 2.0 * kPi * natural_hz;
    l.inertance = 1.0 / (w * w * compliance);
    l.resistance = 2.0 * zeta * std::sqrt(l.inertance / compliance);
    return l;
}

double LineParams::natural_frequency() const {
    return 1.0 / (2.0 * kPi * std::sqrt(inertance * compliance));
}

}  // namespace hydrostat
