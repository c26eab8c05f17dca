#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrostat/hydraulics.hpp"

namespace hydrostat {

enum class DoubleSupportPolicy { BothConnected, LeadingLegOnly, ReleaseBeforeSwitch };
enum class PolytropicMode { Auto, Isothermal, Adiabatic };

DoubleSupportPolicy policy_from_string(const std::string& s);
std::string to_string(DoubleSupportPolicy p);

struct PumpConfig {
    double V_displ = 0.10 * units::mL;  // m^3/rad
    double m_P = 9709.0;                // Pa s/rad
    double m_Q = 9.5e6;                 // rad/s per m^3/s
    double max_speed = 800.0;           // rad/s

    PumpParams params() const { return PumpParams::from_slopes(V_displ, m_P, m_Q); }
};

struct LineConfig {
    double compliance = 4.0e-13;         // m^3/Pa, per leg line
    double natural_hz = 30.0;            // blocked-output resonance incl. leader mass
    double zeta = 0.1;
    double leader_compliance = 1e-13;    // m^3/Pa, leader leg-side chamber
};

struct ExoConfig {
    double proto_mass = 13.4;      // kg, legs + rail
    double foot_mass = 1.0;        // kg, unsprung mass below the follower, not in proto_mass
    double knee_ratio = 0.18;      // vertical force / follower force
    double rest_length = 0.70;     // m, cart height at zero leg extension
    double leg_stroke = 0.42;      // m, extension range
    double standing_height = 1.10; // m
    double ground_stiffness = 1e6;
    double ground_damping = 2000.0;
    double stop_stiffness = 2e6;
    double stop_damping = 2000.0;
};

struct ControllerConfig {
    double k_p = 2.5e-11;               // m^3/s per Pa (2.5 mL/s per bar)
    double deadband_close = 0.01;       // relative accumulator error to shut the charge valve
    double deadband_open = 0.03;
    double valve_lead = 0.065;          // s
    DoubleSupportPolicy policy = DoubleSupportPolicy::BothConnected;
    double release_pressure = 30e3;     // Pa gauge
    double release_timeout = 0.25;      // s
    bool friction_compensation = true;
    bool variable_speed_valves = false;
    double max_transmission_pressure = 3.45e6;  // Pa gauge
    double trim_kp = 40.0;              // N/kg per m of cart height error
    double trim_kd = 8.0;               // N/kg per m/s
    double trim_limit = 2.0;            // N/kg
};

struct SimSettings {
    double dt_plant = 1e-4;
    double dt_control = 1e-3;
    std::uint64_t seed = 0;
    double pressure_noise = 0.0;  // Pa, std of sensor noise
    bool accumulator_connected = true;
    bool check_valves = false;
    PolytropicMode polytropic = PolytropicMode::Auto;
    double valve_energy_per_deg = 3.5 / 360.0;  // J per degree of servo travel
};

struct SimConfig {
    AccumulatorParams accumulator;
    PumpConfig pump;
    FrictionParams friction;
    MotorParams motor;
    BallscrewParams ballscrew;
    CylinderParams cylinders;
    LineConfig line;
    ValveParams valves;
    CheckValveParams check_valve;
    ExoConfig exo;
    ControllerConfig controller;
    SimSettings sim;
    double tank_pressure = 0.1e6;  // Pa absolute

    /// Line inertance/resistance after removing the leader's reflected inertance.
    LineParams line_params() const;
    double leader_inertance() const;  // Pa s^2/m^3 seen from the leg lines
    void validate() const;            // throws InvalidInput
};

/// Config as JSON with the file's field names and units.
nlohmann::ordered_json config_to_json(const SimConfig& c);
SimConfig config_from_json(const nlohmann::json& j);

/// Apply "section.key=value" overrides onto a config JSON document.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

/// Empty path reads the bundled prototype file. The file must set the winding resistance.
SimConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Prototype values with the bundled file's winding resistance, for programmatic use.
SimConfig default_config();
std::filesystem::path bundled_config_path();

}  // namespace hydrostat
