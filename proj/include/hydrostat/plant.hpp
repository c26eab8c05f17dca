#pragma once

#include <array>
#include <string>

#include "hydrostat/config.hpp"

namespace hydrostat {

enum class OutputMode { Free, Blocked, Prescribed };

/// Pressures are absolute (Pa). Legs are rigidly tied to one cart, so both
/// followers share position and velocity.
struct PlantState {
    double t = 0.0;
    double x_L = 0.1, v_L = 0.0;
    double V_a = 0.0;              // accumulator liquid volume, m^3
    double P_a = 1.03e6;           // liquid-side pressure
    double P_gas = 1.03e6;         // gas pressure (differs from P_a only when emptied)
    double n_gas = 1.0;
    double P_L = 0.1e6;            // leader leg-side chamber
    double void_L = 0.0;           // cavitated volume in that chamber
    std::array<double, 2> P_line{0.1e6, 0.1e6};
    std::array<double, 2> Q_line{0.0, 0.0};
    std::array<double, 2> void_line{0.0, 0.0};
    std::array<double, 2> theta{0.0, 0.0};
    double theta_a = 0.0;
    double I_M = 0.0;
    double omega_p = 0.0;
    double y = 1.10, vy = 0.0;     // cart
    double z = 0.0, vz = 0.0;      // foot
    double payload = 0.0;          // kg riding on the cart

    double leg_length(const SimConfig& c) const { return y - z - c.exo.rest_length; }
    double x_F(const SimConfig& c) const { return c.exo.knee_ratio * leg_length(c); }
    double v_F(const SimConfig& c) const { return c.exo.knee_ratio * (vy - vz); }
};

struct PlantInputs {
    double I_cmd = 0.0;
    double omega_cmd = 0.0;
    std::array<double, 2> theta_target{0.0, 0.0};
    double theta_a_target = 0.0;
    OutputMode mode = OutputMode::Free;
    double leg_rate = 0.0;  // prescribed d(leg length)/dt
};

/// Cumulative energy flows, J. Inputs and outputs are positive numbers.
struct EnergyLedger {
    double motor_in = 0.0, motor_out = 0.0;
    double pump_in = 0.0, pump_out = 0.0;
    double external_in = 0.0, external_out = 0.0;
    double joule = 0.0, friction = 0.0, orifice = 0.0, check_valve = 0.0;
    double line_resistance = 0.0, pump_leakage = 0.0, contact = 0.0, stops = 0.0;
    double gas_work = 0.0;          // integral of gauge accumulator pressure over dV_a
    double stored_initial = 0.0, stored_final = 0.0;
    double valve_actuation = 0.0;   // servo electrical energy, reported outside the balance
    double motor_joule_integral = 0.0;  // integral of I^2 dt, A^2 s

    double input() const { return motor_in + pump_in + external_in; }
    double output() const { return motor_out + pump_out + external_out; }
    double dissipated() const {
        return joule + friction + orifice + check_valve + line_resistance + pump_leakage + contact + stops;
    }
    double stored_change() const { return stored_final - stored_initial; }
    double residual() const { return input() - output() - stored_change() - dissipated(); }
    /// |residual| relative to the largest of input, output and dissipation.
    double closure() const;
};

/// Mechanical + fluid + gas energy excluding the cumulative gas term.
double stored_energy(const SimConfig& c, const PlantState& s);

class Plant {
public:
    explicit Plant(SimConfig cfg);

    const SimConfig& config() const { return cfg_; }
    const LineParams& line() const { return line_; }

    /// Accumulator liquid volume on the precharge isentrope/isotherm for P_abs.
    double volume_for_pressure(double P_abs, double n) const;
    /// Put the accumulator at P_abs consistently (volume, gas and liquid pressure).
    void set_accumulator(PlantState& s, double P_abs) const;
    /// Static leader chamber pressure that balances the accumulator with zero motor force.
    double balanced_leader_pressure(const PlantState& s) const;

    /// Advance one plant step; throws SimulationFault on invariant violation.
    void step(PlantState& s, const PlantInputs& u, EnergyLedger& ledger);

    // Per-step diagnostics from the most recent call.
    struct Flows {
        std::array<double, 2> q_leader{}, q_tank{}, q_check{};
        double Q_pump = 0.0;
        double motor_force = 0.0;
        double friction_force = 0.0;
        double leg_force = 0.0;  // vertical force the legs put on the cart
        double ground_force = 0.0;
    };
    const Flows& last_flows() const { return flows_; }

private:
    SimConfig cfg_;
    LineParams line_;
    PumpParams pump_;
    Flows flows_;
};

std::string describe(const PlantState& s);

}  // namespace hydrostat
