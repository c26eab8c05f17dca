#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrostat/controller.hpp"
#include "hydrostat/plant.hpp"

namespace hydrostat {

struct TickCommand {
    References refs;
    OutputMode mode = OutputMode::Free;
    double leg_rate = 0.0;
    std::optional<double> payload;  // kg, applied to the cart when set
};

using Driver = std::function<TickCommand(double t, const PlantState&)>;
using StopCondition = std::function<bool(double t, const PlantState&)>;

struct SimEvent {
    double t = 0.0;
    std::string kind;
    int leg = -1;
    double value = 0.0;
};

struct SimResult {
    std::string scenario;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // one per control tick
    EnergyLedger ledger;
    std::vector<SimEvent> events;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    std::vector<SimResult> runs;  // sub-runs of sweep scenarios

    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    /// Worst ledger closure over this result and all sub-runs.
    double worst_closure() const;
};

/// Fixed-step loop: controller every dt_control, plant every dt_plant.
class Simulation {
public:
    Simulation(const SimConfig& cfg, const PlantState& init, std::string name);

    void run_until(double t_end, const Driver& driver, const StopCondition& stop = {});
    PlantState& state() { return s_; }
    ForceController& controller() { return ctl_; }
    const Plant& plant() const { return plant_; }
    const ControllerOutput& last_output() const { return out_; }
    void set_recording(bool on) { record_ = on; }
    SimResult finish();

private:
    Feedback sense();
    void record(const TickCommand& cmd);

    SimConfig cfg_;
    Plant plant_;
    ForceController ctl_;
    PlantState s_;
    EnergyLedger ledger_;
    ControllerOutput out_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_{0.0, 1.0};
    bool record_ = true;
    SimResult result_;
    long tick_ = 0;
};

/// Standing state with both lines at gauge pressure p_line and the accumulator at P_a_abs.
PlantState standing_state(const Plant& plant, double leg_length, double p_line, double P_a_abs,
                          std::array<bool, 2> connected);

// Scenario library.
SimResult squat_varying_payload(const SimConfig& cfg);
SimResult jump(const SimConfig& cfg, double crouch_depth = 0.12);
SimResult walk_track(const SimConfig& cfg, int strides = 12);
SimResult run_track(const SimConfig& cfg, int strides = 12);
SimResult energy_comparison(const SimConfig& cfg, char variant, int strides = 10);
/// Blocked output, leader held at 1.5 MPa by the accumulator, one leg valve opened.
SimResult switch_step(const SimConfig& cfg, double valve_speed, bool variable_profile);
SimResult switch_sweep_fixed(const SimConfig& cfg);
SimResult switch_sweep_variable(const SimConfig& cfg);
SimResult switch_moving_output(const SimConfig& cfg, const std::string& direction, double speed);
SimResult check_valve_bypass(const SimConfig& cfg);
// Protocols backing controller properties.
SimResult pump_step(const SimConfig& cfg, double step_pressure);
SimResult backdrive(const SimConfig& cfg, bool compensation);
SimResult accumulator_charge(const SimConfig& cfg, double n);

/// Fixed-speed sweep used by the valve scenarios, deg/s.
const std::vector<double>& sweep_speeds();

/// Dispatch by "name" or "name:arg[:arg]"; throws InvalidInput for unknown names.
SimResult run_scenario(const std::string& spec, const SimConfig& cfg);
std::vector<std::string> scenario_names();

// Response metrics on a pressure trace (gauge or absolute, same units).
struct StepMetrics {
    double final_value = 0.0;
    double overshoot = 0.0;   // (peak - final) / (final - initial)
    double rise_time = 0.0;   // 1% -> 99% of the step
    double frequency = 0.0;   // Hz from successive peaks, 0 if not oscillatory
};
StepMetrics step_metrics(const std::vector<double>& t, const std::vector<double>& p, double t_start,
                         double settle_window = 0.05);

}  // namespace hydrostat
