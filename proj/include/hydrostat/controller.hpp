#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "hydrostat/config.hpp"
#include "hydrostat/plant.hpp"

namespace hydrostat {

/// Reference set for one control tick. Forces in N/kg, per leg.
struct References {
    std::array<double, 2> f{0.0, 0.0};        // at t
    std::array<double, 2> f_ahead{0.0, 0.0};  // at t + valve lead, drives connections
    double f_stat = 0.0;
    double mass = 0.0;                        // kg scaling the references
    bool accumulator_enable = true;
    std::optional<std::array<double, 2>> valve_targets;  // explicit schedule overrides the connect rule
    double y_ref = std::nan("");              // posture trim target, disabled when NaN
    std::optional<double> current_override;   // forces motor current (passivity checks)
};

/// What the controller sees; pressures absolute.
struct Feedback {
    double t = 0.0;
    double P_a = 0.0, P_L = 0.0;
    std::array<double, 2> P_line{0.0, 0.0};
    std::array<double, 2> theta{0.0, 0.0};
    double theta_a = 0.0;
    double x_L = 0.0, v_L = 0.0;
    double I_M = 0.0;
    double y = 0.0, vy = 0.0;
};

Feedback feedback_from(const PlantState& s);

enum class LegMode { Tank, Leader, Releasing };

struct ControllerOutput {
    double I_cmd = 0.0;
    double omega_cmd = 0.0;
    double theta_a_target = 0.0;
    std::array<double, 2> theta_target{0.0, 0.0};

    // Diagnostics.
    double P_L_d = 0.0;      // gauge
    double P_stat_d = 0.0;   // gauge leader static target
    double P_a_d = 0.0;      // gauge accumulator target
    double f_shared = 0.0;
    int n_legs = 0;
    bool clamped = false;
};

class ForceController {
public:
    explicit ForceController(const SimConfig& cfg);

    ControllerOutput update(const Feedback& fb, const References& ref);

    LegMode leg_mode(int i) const { return mode_[i]; }
    bool charge_valve_open() const { return charge_open_; }
    int clamp_count() const { return clamp_count_; }
    /// Initialize leg modes, e.g. when a scenario starts mid-stance.
    void set_leg_mode(int i, LegMode m) { mode_[i] = m; }

private:
    SimConfig cfg_;
    PumpParams pump_;
    std::array<LegMode, 2> mode_{LegMode::Tank, LegMode::Tank};
    std::array<double, 2> release_start_{0.0, 0.0};
    std::array<double, 2> desire_since_{0.0, 0.0};
    std::array<bool, 2> desire_prev_{false, false};
    bool charge_open_ = false;
    int clamp_count_ = 0;
};

}  // namespace hydrostat
