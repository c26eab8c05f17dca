#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hydrostat/profiles.hpp"

namespace hydrostat {

struct DesignVariant {
    bool passive_offset = false;
    bool sharing = false;

    char label() const { return static_cast<char>('A' + (passive_offset ? 1 : 0) + (sharing ? 2 : 0)); }
    static DesignVariant from_label(char label);  // throws InvalidInput
    static constexpr DesignVariant A() { return {false, false}; }
    static constexpr DesignVariant B() { return {true, false}; }
    static constexpr DesignVariant C() { return {false, true}; }
    static constexpr DesignVariant D() { return {true, true}; }
    bool operator==(const DesignVariant&) const = default;
};

std::vector<DesignVariant> all_variants();

/// Sinusoidal vertical centre-of-mass speed: v_max * sin(2 pi k t / T).
struct SpeedModel {
    double v_max = 0.0;      // m/s
    int cycles_per_period = 1;
};
SpeedModel default_speed_model(Task task);

/// Per-leg speed series [right, left]; left follows the scenario phase offset.
std::vector<std::vector<double>> leg_speeds(const TaskScenario& scenario, const SpeedModel& model);

struct MotorDemand {
    std::vector<std::vector<double>> force;  // per motor, N/kg
    std::vector<std::vector<double>> speed;  // per motor, m/s
    double f_stat = 0.0;
    int motor_count = 2;
    double dt = 1e-3;
    bool periodic = true;
};

struct DemandMetrics {
    double f_dyn_rms = 0.0;
    double f_dyn_peak = 0.0;
    double mean_abs_power = 0.0;  // W/kg
    double v_max = 0.0;
};

struct EfficiencyParams {
    double eta_gen = 0.9;
    double eta_regen = 0.9;
    double winding_resistance = 0.0;  // ohm, required
    double torque_constant = 0.093;   // N m / A
    double motor_to_output_ratio = 0.0;  // output force per motor torque, 1/m
};

/// Rectangle-rule RMS over the whole series.
double rms(std::span<const double> series);
double peak_abs(std::span<const double> series);

/// Positive-part offset branch: f - f_stat where the leg is loaded, else 0.
std::vector<double> offset_branch(std::span<const double> f, const std::vector<bool>& loaded, double f_stat);

/// Shared-leader series: (f1 + f2) / N_legs where N_legs > 0, else 0.
std::vector<double> shared_series(const TaskScenario& scenario);

/// Loaded mask for the motor series of the given variant (leg 0 when not shared).
std::vector<bool> loaded_mask(const TaskScenario& scenario, bool sharing, int leg = 0);

MotorDemand demand(const TaskScenario& scenario, DesignVariant variant, double f_stat,
                   const SpeedModel& speed_model);
MotorDemand demand(const TaskScenario& scenario, DesignVariant variant, double f_stat);

std::vector<DemandMetrics> metrics(const MotorDemand& demand);

/// Mean battery power in W for a body of `body_mass` kg. Cyclic demand uses the
/// mean |P| shortcut; otherwise the instantaneous form is averaged.
double battery_power(const MotorDemand& demand, const EfficiencyParams& eff, double body_mass);
double loss_fraction(double eta);

struct TableRow {
    std::string task;
    char variant = 'A';
    double f_dyn_rms = 0.0;  // NaN for aperiodic tasks
    double f_dyn_peak = 0.0;
    double mean_abs_P = 0.0;  // NaN for aperiodic tasks
    double v_max = 0.0;
    double f_stat = 0.0;
    int motor_count = 2;
    double f_dyn_rms_total = 0.0;  // summed over motors
    double mean_abs_P_total = 0.0;
};

struct RatioRow {
    std::string task;
    double rms_ratio_per_motor = 0.0;  // A over D
    double rms_ratio_total = 0.0;
    double peak_ratio_per_motor = 0.0;
};

struct DesignTable {
    std::vector<TableRow> rows;
    std::vector<RatioRow> ratios;
};

/// Offsets keyed by task then variant label ('B', 'D'). Missing entries throw.
using OffsetMap = std::map<Task, std::map<char, double>>;

DesignTable design_table(const std::vector<TaskScenario>& scenarios, const OffsetMap& offsets);
std::string design_table_csv(const DesignTable& table);
std::string design_table_json(const DesignTable& table);

}  // namespace hydrostat
