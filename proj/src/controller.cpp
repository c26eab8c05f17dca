#include "hydrostat/controller.hpp"

#include <algorithm>

#include "hydrostat/profiles.hpp"

namespace hydrostat {

Feedback feedback_from(const PlantState& s) {
    Feedback fb;
    fb.t = s.t;
    fb.P_a = s.P_a;
    fb.P_L = s.P_L;
    fb.P_line = s.P_line;
    fb.theta = s.theta;
    fb.theta_a = s.theta_a;
    fb.x_L = s.x_L;
    fb.v_L = s.v_L;
    fb.I_M = s.I_M;
    fb.y = s.y;
    fb.vy = s.vy;
    return fb;
}

ForceController::ForceController(const SimConfig& cfg) : cfg_(cfg), pump_(cfg.pump.params()) {}

ControllerOutput ForceController::update(const Feedback& fb, const References& ref) {
    const auto& c = cfg_;
    const double Pt = c.tank_pressure;
    const double A = c.cylinders.A, Ar = c.cylinders.A_r, R = c.exo.knee_ratio;
    ControllerOutput out;

    // Leg connections.
    if (ref.valve_targets) {
        out.theta_target = *ref.valve_targets;
    } else {
        std::array<bool, 2> want{};
        for (int i = 0; i < 2; ++i) {
            const bool d = ref.f_ahead[i] > kDefaultContactThreshold;
            if (d && !desire_prev_[i]) desire_since_[i] = fb.t;
            desire_prev_[i] = d;
            want[i] = d;
        }
        if (c.controller.policy == DoubleSupportPolicy::LeadingLegOnly && want[0] && want[1]) {
            // Keep the leg that touched down last.
            want[desire_since_[0] <= desire_since_[1] ? 0 : 1] = false;
        }
        for (int i = 0; i < 2; ++i) {
            switch (mode_[i]) {
                case LegMode::Tank:
                    if (want[i]) mode_[i] = LegMode::Leader;
                    break;
                case LegMode::Leader:
                    if (!want[i]) {
                        if (c.controller.policy == DoubleSupportPolicy::ReleaseBeforeSwitch) {
                            mode_[i] = LegMode::Releasing;
                            release_start_[i] = fb.t;
                        } else {
                            mode_[i] = LegMode::Tank;
                        }
                    }
                    break;
                case LegMode::Releasing:
                    if (want[i]) {
                        mode_[i] = LegMode::Leader;
                    } else if (fb.P_line[i] - Pt < c.controller.release_pressure ||
                               fb.t - release_start_[i] >= c.controller.release_timeout) {
                        mode_[i] = LegMode::Tank;
                    }
                    break;
            }
            out.theta_target[i] = mode_[i] == LegMode::Leader  ? 180.0
                                  : mode_[i] == LegMode::Tank ? 0.0
                                                              : 0.5 * (c.valves.band_lo + c.valves.band_hi);
        }
    }

    // Sharing law on the legs that are physically connected.
    int n = 0;
    for (int i = 0; i < 2; ++i) n += fb.theta[i] > c.valves.band_hi ? 1 : 0;
    out.n_legs = n;
    double f_shared = n > 0 ? (ref.f[0] + ref.f[1]) / n : 0.0;
    if (n > 0 && !std::isnan(ref.y_ref)) {
        const double trim = c.controller.trim_kp * (ref.y_ref - fb.y) - c.controller.trim_kd * fb.vy;
        f_shared += std::clamp(trim, -c.controller.trim_limit, c.controller.trim_limit) / n;
    }
    out.f_shared = f_shared;

    const double to_p = ref.mass / (R * A);
    const double p_max = c.controller.max_transmission_pressure;
    out.P_L_d = std::max(0.0, to_p * f_shared);
    if (out.P_L_d > p_max) {
        out.P_L_d = p_max;
        out.clamped = true;
    }
    out.P_stat_d = std::max(0.0, to_p * ref.f_stat);
    if (out.P_stat_d > p_max) {
        out.P_stat_d = p_max;
        out.clamped = true;
    }
    if (out.clamped) ++clamp_count_;

    // Static force unit.
    const bool acc_physical = c.sim.accumulator_connected;
    const double p_a = acc_physical ? fb.P_a - Pt : 0.0;
    if (acc_physical && ref.accumulator_enable) {
        out.P_a_d = std::max(out.P_stat_d * Ar / A, c.accumulator.P_a0 - Pt);
        const double e = out.P_a_d - p_a;
        const double rel = std::abs(e) / out.P_a_d;
        if (charge_open_ && rel < c.controller.deadband_close) charge_open_ = false;
        else if (!charge_open_ && rel > c.controller.deadband_open) charge_open_ = true;
        if (charge_open_) {
            const double Q_d = c.controller.k_p * e;
            out.omega_cmd = std::clamp(pump_speed_cmd(pump_, Q_d, p_a), -c.pump.max_speed, c.pump.max_speed);
            out.theta_a_target = 180.0;
        }
    } else {
        charge_open_ = false;
    }

    // Dynamic force unit: open-loop pressure feedforward with friction compensation.
    const double I_peak = c.motor.peak_torque / c.motor.torque_constant;
    if (ref.current_override) {
        out.I_cmd = *ref.current_override;
    } else if (n > 0) {
        double F = out.P_L_d * Ar - p_a * A;
        if (c.controller.friction_compensation) {
            F += friction_pressure(c.friction, fb.I_M, fb.v_L, c.motor.torque_constant, c.ballscrew.lead, Ar) * Ar;
        }
        out.I_cmd = std::clamp(current_for_force(c.motor, c.ballscrew, F), -I_peak, I_peak);
    }
    return out;
}

}  // namespace hydrostat
