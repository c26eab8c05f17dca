#pragma once

#include "hydrostat/units.hpp"

namespace hydrostat {

// All quantities SI: Pa, m^3, m^3/s, rad/s, m, N.

struct AccumulatorParams {
    double V_a0 = 500.0 * units::mL;  // gas volume at precharge
    double P_a0 = 1.03e6;             // precharge, absolute
    double n = 1.0;                   // polytropic exponent
    double P_max = 21e6;
};

/// Largest liquid volume before P_max is reached.
double accumulator_max_volume(const AccumulatorParams& p);

/// Polytropic gas law. Throws SimulationFault on over-fill or over-pressure,
/// InvalidInput on negative liquid volume.
double accumulator_pressure(const AccumulatorParams& p, double V_a);

/// Closed-form integral of P dV for liquid volume V1 -> V2.
double accumulator_work(const AccumulatorParams& p, double V1, double V2);

/// Isothermal/adiabatic switch on liquid flow rate with hysteresis.
class PolytropicSelector {
public:
    PolytropicSelector(double up = 5.0 * units::mL, double down = 2.5 * units::mL) : up_(up), down_(down) {}
    double update(double dVdt);
    double n() const { return n_; }

private:
    double up_, down_;
    double n_ = 1.0;
};

struct PumpParams {
    double V_displ = 0.10 * units::mL;  // m^3/rad
    double alpha = 0.0;                 // m^3/s/Pa
    double beta = 0.0;                  // m^3/rad

    /// Back-solve leakage from the measured stall slope m_P (Pa s/rad) and speed
    /// slope m_Q (rad/s per m^3/s).
    static PumpParams from_slopes(double V_displ, double m_P, double m_Q);
    double m_Q() const { return 1.0 / (V_displ + beta); }
    double m_P() const { return (V_displ + beta) / alpha; }
};

/// Q = V w - (alpha dP - beta w).
double pump_flow(const PumpParams& p, double omega, double dP);
/// Exact inverse of pump_flow at dP = P_a.
double pump_speed_cmd(const PumpParams& p, double Q_d, double P_a);

struct MotorParams {
    double torque_constant = 0.093;  // N m/A
    double winding_resistance = 0.0; // ohm, required from config
    double continuous_torque = 0.42; // N m
    double peak_torque = 1.4;        // N m
    double reflected_mass = 5.2;     // kg at the leader piston
};

struct BallscrewParams {
    double lead = 0.02 / (2.0 * kPi);  // m/rad
    double efficiency = 0.96;
};

struct CylinderParams {
    double A = 572.0 * units::mm2;
    double A_r = 524.0 * units::mm2;
    double leader_stroke = 0.203;
    double follower_stroke = 0.076;
};

struct FrictionParams {
    double mu_seal = 7e4;   // Pa, Coulomb magnitude
    double eta_bs = 0.96;
    double b = 4000.0;      // Pa s/m
    double gamma = 300.0;   // s/m
};

/// Leader friction in pressure units.
double friction_pressure(const FrictionParams& f, double current, double xdot, double torque_constant,
                         double lead, double area_r);

/// Motor force on the leader piston for a given current.
double motor_force(const MotorParams& m, const BallscrewParams& bs, double current);
double current_for_force(const MotorParams& m, const BallscrewParams& bs, double force);

struct ValveParams {
    double cv_max = 1.08e-6;   // m^3/s/sqrt(Pa)
    double band_lo = 80.0;     // deg
    double band_hi = 100.0;
    double max_speed = 2600.0; // deg/s
    double tau = 0.01;         // s, servo lag
    double slow_ratio = 0.1;   // variable-speed profile inside the band
    double slow_margin = 10.0; // deg beyond the band edges held at slow speed
    double ramp = 10.0;        // deg blend between slow and fast
};

struct PortCv {
    double tank = 0.0;
    double leader = 0.0;
};

/// Trapezoid: tank side open below the band, leader side above, closed inside.
PortCv valve_cv(const ValveParams& v, double theta);
/// Signed orifice flow for dP = upstream - downstream.
double orifice_flow(double cv, double dP);
double valve_flow(const ValveParams& v, double theta, double dP_leader_side);

double variable_speed_switch_profile(const ValveParams& v, double theta);

/// Rate-limited first-order tracker for a valve servo.
double valve_servo_step(const ValveParams& v, double theta, double target, double dt, bool variable_speed);

struct CheckValveParams {
    double cv = 2.0e-6;
    double cracking = 20e3;  // Pa
};

double check_valve_flow(const CheckValveParams& c, double dP);

struct LineParams {
    double compliance = 4.5e-13;  // m^3/Pa
    double inertance = 0.0;       // Pa s^2/m^3
    double resistance = 0.0;      // Pa s/m^3

    static LineParams from_resonance(double compliance, double natural_hz, double zeta);
    double natural_frequency() const;  // Hz
};

}  // namespace hydrostat
