#include "hydrostat/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hydrostat/errors.hpp"
#include "hydrostat/optimizer.hpp"
#include "hydrostat/profiles.hpp"

namespace hydrostat {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Results

std::size_t SimResult::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidInput("no column '" + name + "' in result " + scenario);
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SimResult::column(const std::string& name) const {
    const auto k = column_index(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[k]);
    return v;
}

double SimResult::worst_closure() const {
    double w = rows.empty() && !runs.empty() ? 0.0 : ledger.closure();
    for (const auto& r : runs) w = std::max(w, r.worst_closure());
    return w;
}

// ---------------------------------------------------------------------------
// Simulation loop

namespace {

const std::vector<std::string> kColumns = {
    "t_s",       "x_L_mm",      "v_L_m_s",    "V_a_mL",     "P_a_MPa",     "P_L_MPa",    "P_line1_MPa",
    "P_line2_MPa", "Q_line1_mL_s", "Q_line2_mL_s", "theta_v1_deg", "theta_v2_deg", "theta_va_deg", "I_M_A",
    "omega_p_rad_s", "y_m",     "vy_m_s",     "z_m",        "x_F_mm",      "v_F_m_s",    "P_L_d_MPa",
    "P_stat_d_MPa", "n_legs",   "f1_ref",     "f2_ref",     "leg_force_N", "motor_force_N", "motor_power_W",
    "leg_power_W"};

}  // namespace

Simulation::Simulation(const SimConfig& cfg, const PlantState& init, std::string name)
    : cfg_(cfg), plant_(cfg), ctl_(cfg), s_(init), rng_(cfg.sim.seed) {
    result_.scenario = std::move(name);
    result_.columns = kColumns;
    ledger_.stored_initial = stored_energy(cfg_, s_);
}

Feedback Simulation::sense() {
    Feedback fb = feedback_from(s_);
    if (cfg_.sim.pressure_noise > 0.0) {
        const double sd = cfg_.sim.pressure_noise;
        fb.P_a += sd * noise_(rng_);
        fb.P_L += sd * noise_(rng_);
        fb.P_line[0] += sd * noise_(rng_);
        fb.P_line[1] += sd * noise_(rng_);
    }
    return fb;
}

void Simulation::record(const TickCommand& cmd) {
    if (!record_) return;
    const auto& c = cfg_;
    const auto& fl = plant_.last_flows();
    const double Pt = c.tank_pressure;
    const double F_m = motor_force(c.motor, c.ballscrew, s_.I_M);
    const double leg_force = c.exo.knee_ratio * c.cylinders.A * ((s_.P_line[0] - Pt) + (s_.P_line[1] - Pt));
    (void)fl;
    result_.rows.push_back({s_.t,
                            s_.x_L / units::mm,
                            s_.v_L,
                            s_.V_a / units::mL,
                            s_.P_a / units::MPa,
                            s_.P_L / units::MPa,
                            s_.P_line[0] / units::MPa,
                            s_.P_line[1] / units::MPa,
                            s_.Q_line[0] / units::mL,
                            s_.Q_line[1] / units::mL,
                            s_.theta[0],
                            s_.theta[1],
                            s_.theta_a,
                            s_.I_M,
                            s_.omega_p,
                            s_.y,
                            s_.vy,
                            s_.z,
                            s_.x_F(c) / units::mm,
                            s_.v_F(c),
                            out_.P_L_d / units::MPa,
                            out_.P_stat_d / units::MPa,
                            static_cast<double>(out_.n_legs),
                            cmd.refs.f[0],
                            cmd.refs.f[1],
                            leg_force,
                            F_m,
                            F_m * s_.v_L,
                            leg_force * (s_.vy - s_.vz)});
}

void Simulation::run_until(double t_end, const Driver& driver, const StopCondition& stop) {
    const long sub = std::lround(cfg_.sim.dt_control / cfg_.sim.dt_plant);
    const double band_lo = cfg_.valves.band_lo, band_hi = cfg_.valves.band_hi;
    while (s_.t < t_end - 0.5 * cfg_.sim.dt_plant) {
        if (stop && stop(s_.t, s_)) break;
        const TickCommand cmd = driver(s_.t, s_);
        out_ = ctl_.update(sense(), cmd.refs);
        if (cmd.payload && *cmd.payload != s_.payload) {
            // Loading the cart is external work.
            const double e0 = stored_energy(cfg_, s_);
            s_.payload = *cmd.payload;
            const double w = stored_energy(cfg_, s_) - e0;
            (w >= 0.0 ? ledger_.external_in : ledger_.external_out) += std::abs(w);
        }
        record(cmd);
        PlantInputs u;
        u.I_cmd = out_.I_cmd;
        u.omega_cmd = out_.omega_cmd;
        u.theta_target = out_.theta_target;
        u.theta_a_target = out_.theta_a_target;
        u.mode = cmd.mode;
        u.leg_rate = cmd.leg_rate;
        for (long k = 0; k < sub; ++k) {
            const auto th_prev = s_.theta;
            const auto p_prev = s_.P_line;
            plant_.step(s_, u, ledger_);
            for (int i = 0; i < 2; ++i) {
                if (th_prev[i] >= band_lo && s_.theta[i] < band_lo) {
                    result_.events.push_back({s_.t, "tank_open", i, p_prev[i] - cfg_.tank_pressure});
                }
                if (th_prev[i] <= band_hi && s_.theta[i] > band_hi) {
                    result_.events.push_back({s_.t, "leader_open", i, p_prev[i] - cfg_.tank_pressure});
                }
            }
        }
        ++tick_;
    }
}

SimResult Simulation::finish() {
    ledger_.stored_final = stored_energy(cfg_, s_) + ledger_.gas_work;
    result_.ledger = ledger_;
    result_.metrics["clamp_events"] = ctl_.clamp_count();
    return result_;
}

PlantState standing_state(const Plant& plant, double leg_length, double p_line, double P_a_abs,
                          std::array<bool, 2> connected) {
    const auto& c = plant.config();
    PlantState s;
    plant.set_accumulator(s, P_a_abs);
    const double Pt = c.tank_pressure;
    s.x_L = 0.5 * c.cylinders.leader_stroke;
    s.P_L = Pt + p_line;
    for (int i = 0; i < 2; ++i) {
        s.theta[i] = connected[i] ? 180.0 : 0.0;
        s.P_line[i] = connected[i] ? Pt + p_line : Pt;
    }
    const double load = (c.exo.proto_mass + c.exo.foot_mass) * kGravity;
    s.z = -load / c.exo.ground_stiffness;
    s.y = s.z + c.exo.rest_length + leg_length;
    return s;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

double gauge_leader(const SimConfig& c, double mass, double f) {
    return mass * f / (c.exo.knee_ratio * c.cylinders.A);
}

// Accumulator absolute pressure that statically balances a leader gauge pressure.
double accumulator_for(const SimConfig& c, double p_leader) {
    return std::max(c.accumulator.P_a0, c.tank_pressure + p_leader * c.cylinders.A_r / c.cylinders.A);
}

// Periodic reference lookup with linear interpolation.
struct PeriodicRef {
    std::vector<double> right, left;
    double dt = 1e-3;
    double scale = 1.0;

    double at(const std::vector<double>& v, double t) const {
        const double n = static_cast<double>(v.size());
        double x = std::fmod(t / dt, n);
        if (x < 0.0) x += n;
        const auto i = static_cast<std::size_t>(x);
        const double w = x - static_cast<double>(i);
        return scale * ((1.0 - w) * v[i % v.size()] + w * v[(i + 1) % v.size()]);
    }
    double r(double t) const { return at(right, t); }
    double l(double t) const { return at(left, t); }
};

PeriodicRef task_refs(Task task, double scale = 1.0) {
    const auto sc = make_scenario(synth_profile(task));
    return {sc.right.samples, sc.left.samples, sc.dt(), scale};
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
    if (to <= from) return 0.0;
    return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to), 0.0) /
           static_cast<double>(to - from);
}

std::size_t index_at(const std::vector<double>& t, double when) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), when - 1e-12) - t.begin());
}

ordered_json ledger_json(const EnergyLedger& L) {
    return {{"motor_in_J", L.motor_in},
            {"motor_out_J", L.motor_out},
            {"pump_in_J", L.pump_in},
            {"pump_out_J", L.pump_out},
            {"external_in_J", L.external_in},
            {"external_out_J", L.external_out},
            {"joule_J", L.joule},
            {"friction_J", L.friction},
            {"orifice_J", L.orifice},
            {"check_valve_J", L.check_valve},
            {"line_resistance_J", L.line_resistance},
            {"pump_leakage_J", L.pump_leakage},
            {"contact_J", L.contact},
            {"stops_J", L.stops},
            {"accumulator_work_J", L.gas_work},
            {"stored_change_J", L.stored_change()},
            {"valve_actuation_J", L.valve_actuation},
            {"residual_J", L.residual()},
            {"closure", L.closure()}};
}

void attach_ledger(SimResult& r) { r.metrics["ledger"] = ledger_json(r.ledger); }

// Per-step stroke loss from tank-open events after t_from.
struct StrokeLoss {
    double mean_mm = 0.0;
    double max_mm = 0.0;
    double min_mm = 0.0;
    int events = 0;
};

StrokeLoss stroke_loss(const SimResult& r, const SimConfig& c, double t_from) {
    StrokeLoss s;
    const double C = c.line.compliance;
    double sum = 0.0;
    for (const auto& e : r.events) {
        if (e.kind != "tank_open" || e.t < t_from) continue;
        const double mm = C * std::max(e.value, 0.0) / c.cylinders.A_r / units::mm;
        sum += mm;
        s.max_mm = std::max(s.max_mm, mm);
        s.min_mm = s.events == 0 ? mm : std::min(s.min_mm, mm);
        ++s.events;
    }
    s.mean_mm = s.events > 0 ? sum / s.events : 0.0;
    return s;
}

}  // namespace

StepMetrics step_metrics(const std::vector<double>& t, const std::vector<double>& p, double t_start,
                         double settle_window) {
    StepMetrics m;
    if (t.size() < 3) return m;
    const std::size_t i0 = index_at(t, t_start);
    if (i0 >= p.size()) return m;
    const double initial = p[i0];
    const double t_end = t.back();
    const std::size_t is = index_at(t, t_end - settle_window);
    m.final_value = mean_of(p, is, p.size());
    const double step = m.final_value - initial;
    if (std::abs(step) < 1e-12) return m;

    double peak = initial;
    for (std::size_t i = i0; i < p.size(); ++i) peak = step > 0 ? std::max(peak, p[i]) : std::min(peak, p[i]);
    m.overshoot = std::max(0.0, (peak - m.final_value) / step);

    auto frac = [&](std::size_t i) { return (p[i] - initial) / step; };
    double t1 = -1.0, t99 = -1.0;
    for (std::size_t i = i0 + 1; i < p.size(); ++i) {
        if (t1 < 0.0 && frac(i) >= 0.01) {
            const double a = frac(i - 1), b = frac(i);
            t1 = t[i - 1] + (t[i] - t[i - 1]) * (0.01 - a) / (b - a);
        }
        if (t99 < 0.0 && frac(i) >= 0.99) {
            const double a = frac(i - 1), b = frac(i);
            t99 = t[i - 1] + (t[i] - t[i - 1]) * (0.99 - a) / (b - a);
            break;
        }
    }
    m.rise_time = (t1 >= 0.0 && t99 >= 0.0) ? t99 - t1 : std::nan("");

    // Oscillation frequency from successive maxima of the deviation after the first 99% crossing.
    std::vector<double> peaks;
    const std::size_t from = t99 >= 0.0 ? index_at(t, t99) : i0;
    for (std::size_t i = std::max<std::size_t>(from, 1); i + 1 < p.size(); ++i) {
        const double d0 = (p[i - 1] - m.final_value) / step, d1 = (p[i] - m.final_value) / step,
                     d2 = (p[i + 1] - m.final_value) / step;
        if (d1 > d0 && d1 >= d2 && d1 > 1e-4) peaks.push_back(t[i]);
    }
    if (peaks.size() >= 2) m.frequency = static_cast<double>(peaks.size() - 1) / (peaks.back() - peaks.front());
    return m;
}

// ---------------------------------------------------------------------------
// Scenarios

SimResult squat_varying_payload(const SimConfig& cfg) {
    Plant probe(cfg);
    const double f = kGravity / 2.0;
    const double m0 = cfg.exo.proto_mass;
    const double p0 = gauge_leader(cfg, m0, f);
    PlantState init = standing_state(probe, 0.30, p0, cfg.accumulator.P_a0, {true, true});
    Simulation sim(cfg, init, "squat_varying_payload");
    sim.controller().set_leg_mode(0, LegMode::Leader);
    sim.controller().set_leg_mode(1, LegMode::Leader);

    // Payload steps and a 1 Hz back-driven squat motion.
    const std::vector<std::pair<double, double>> payload{{0.0, 0.0}, {16.0, 10.0}, {36.0, 20.0}, {50.0, 0.0}};
    auto load_at = [&](double t) {
        double m = 0.0;
        for (const auto& [ts, kg] : payload) if (t >= ts) m = kg;
        return m;
    };
    const double amp = 0.02, w = 2.0 * kPi;
    const double T = 60.0;
    sim.run_until(T, [&](double t, const PlantState&) {
        TickCommand c;
        const double m = m0 + load_at(t);
        c.refs.f = {f, f};
        c.refs.f_ahead = {f, f};
        c.refs.f_stat = f;
        c.refs.mass = m;
        c.payload = load_at(t);
        c.mode = OutputMode::Prescribed;
        c.leg_rate = amp * w * std::cos(w * t);
        return c;
    });
    SimResult r = sim.finish();

    const auto t = r.column("t_s");
    const auto I = r.column("I_M_A");
    ordered_json steps = ordered_json::array();
    for (std::size_t k = 1; k < payload.size(); ++k) {
        const double ts = payload[k].first;
        // Cycle-averaged current just before, just after, and 8 s after the step.
        auto avg = [&](double a, double b) { return mean_of(I, index_at(t, a), index_at(t, b)); };
        steps.push_back({{"t_s", ts},
                         {"payload_kg", payload[k].second},
                         {"current_before_A", avg(ts - 1.0, ts)},
                         {"current_after_A", avg(ts, ts + 1.0)},
                         {"current_later_A", avg(ts + 7.0, ts + 8.0)}});
    }
    r.metrics["payload_steps"] = steps;
    attach_ledger(r);
    return r;
}

SimResult jump(const SimConfig& cfg_in, double crouch_depth) {
    SimConfig cfg = cfg_in;
    Plant probe(cfg);
    const double Pt = cfg.tank_pressure;
    const double f_jump = 24.0, m = cfg.exo.proto_mass;
    const double stand = cfg.exo.standing_height - cfg.exo.rest_length;
    const double lead = cfg.controller.valve_lead;

    PlantState init = standing_state(probe, stand - crouch_depth, 0.0, cfg.accumulator.P_a0, {false, false});
    init.x_L = 0.0;
    init.P_L = probe.balanced_leader_pressure(init);
    init.x_L = (init.P_L - Pt) * cfg.line.leader_compliance / cfg.cylinders.A_r * 0.0;
    Simulation sim(cfg, init, "jump");

    enum Phase { Charge, Launch, Air, Land, Stand, Done };
    Phase phase = Charge;
    double t_launch = 0.0, t_takeoff = -1.0, t_land = -1.0, t_bottom = -1.0;
    const double max_charge = 60.0;

    auto driver = [&](double t, const PlantState& s) {
        TickCommand c;
        c.refs.mass = m;
        c.refs.f_stat = f_jump;
        switch (phase) {
            case Charge:
                if (t > 0.2 && !sim.controller().charge_valve_open() && s.theta_a < 1.0) {
                    phase = Launch;
                    t_launch = t;
                } else if (t > max_charge) {
                    throw SimulationFault("jump: accumulator did not reach its target during charge");
                }
                break;
            case Launch:
                if (s.y > cfg.exo.standing_height) {
                    phase = Air;
                    t_takeoff = t;
                }
                break;
            case Air:
                if (s.vy < 0.0 && s.y < cfg.exo.standing_height + cfg.exo.leg_stroke - stand + std::abs(s.vy) * lead) {
                    phase = Land;
                    t_land = t;
                }
                break;
            case Land:
                if (s.vy >= 0.0 && s.z <= 0.0) {
                    phase = Stand;
                    t_bottom = t;
                }
                break;
            case Stand:
                if (t > t_bottom + 0.3) phase = Done;
                break;
            case Done:
                break;
        }
        const double f = (phase == Launch || phase == Land) ? f_jump : phase == Stand ? kGravity / 2.0 : 0.0;
        c.refs.f = {f, f};
        c.refs.f_ahead = {f, f};
        c.mode = phase == Charge ? OutputMode::Blocked : OutputMode::Free;
        return c;
    };
    sim.run_until(max_charge + 5.0, driver, [&](double, const PlantState&) { return phase == Done; });
    SimResult r = sim.finish();
    if (t_takeoff < 0.0) throw SimulationFault("jump: cart never reached standing height");

    const auto t = r.column("t_s");
    const auto z = r.column("z_m");
    const auto y = r.column("y_m");
    const auto vy = r.column("vy_m_s");
    const auto P_leg = r.column("leg_power_W");
    const auto P_mot = r.column("motor_power_W");
    const auto th1 = r.column("theta_v1_deg");
    const auto th2 = r.column("theta_v2_deg");

    const std::size_t il = index_at(t, t_launch), it = index_at(t, t_takeoff);
    double leg_peak = 0.0, mot_peak = 0.0, leg_mean = 0.0, mot_mean = 0.0;
    // Launch window: from launch until the feet leave the ground.
    std::size_t ie = it;
    while (ie < z.size() && z[ie] <= 0.0) ++ie;
    for (std::size_t i = il; i < ie; ++i) {
        leg_peak = std::max(leg_peak, P_leg[i]);
        mot_peak = std::max(mot_peak, P_mot[i]);
    }
    leg_mean = mean_of(P_leg, il, ie);
    mot_mean = mean_of(P_mot, il, ie);

    // Flight: first contiguous window with the foot off the ground.
    std::size_t air = 0, tank = 0;
    double apex = 0.0, y_max = 0.0, v_max = 0.0;
    for (std::size_t i = il; i < z.size(); ++i) {
        v_max = std::max(v_max, vy[i]);
        y_max = std::max(y_max, y[i]);
    }
    for (std::size_t i = ie; i < z.size() && z[i] > 0.0; ++i) {
        ++air;
        apex = std::max(apex, z[i]);
        if (th1[i] < cfg.valves.band_lo && th2[i] < cfg.valves.band_lo) ++tank;
    }
    r.metrics["crouch_depth_m"] = crouch_depth;
    r.metrics["charge_time_s"] = t_launch;
    r.metrics["apex_height_m"] = apex;
    r.metrics["cart_rise_m"] = y_max - cfg.exo.standing_height;
    r.metrics["max_speed_m_s"] = v_max;
    r.metrics["launch_duration_s"] = t[std::min(ie, t.size() - 1)] - t_launch;
    r.metrics["leg_power_peak_W"] = leg_peak;
    r.metrics["leg_power_mean_W"] = leg_mean;
    r.metrics["motor_power_peak_W"] = mot_peak;
    r.metrics["motor_power_mean_W"] = mot_mean;
    r.metrics["power_ratio_peak"] = mot_peak > 0.0 ? leg_peak / mot_peak : std::numeric_limits<double>::infinity();
    r.metrics["aerial_time_s"] = static_cast<double>(air) * cfg.sim.dt_control;
    r.metrics["aerial_tank_fraction"] = air > 0 ? static_cast<double>(tank) / static_cast<double>(air) : 0.0;
    r.metrics["landing_command_s"] = t_land;
    attach_ledger(r);
    return r;
}

namespace {

struct GaitRun {
    SimResult result;
    double warmup = 0.0;
    double period = 0.0;
};

// Shared gait-tracking loop for walk/run/energy scenarios.
GaitRun gait_tracking(const SimConfig& cfg, const std::string& name, Task task, double ref_scale, double f_stat,
                      OutputMode mode, int strides, bool single_leg_total, double y_stand_leg) {
    Plant probe(cfg);
    const auto refs = task_refs(task, ref_scale);
    const double m = cfg.exo.proto_mass;
    const double T = task_defaults(task).period;
    const double lead = cfg.controller.valve_lead;

    auto leg_refs = [&](double t) -> std::array<double, 2> {
        if (single_leg_total) return {refs.r(t) + refs.l(t), 0.0};
        return {refs.r(t), refs.l(t)};
    };
    const auto f0 = leg_refs(0.0);
    std::array<bool, 2> conn{f0[0] > kDefaultContactThreshold, f0[1] > kDefaultContactThreshold};
    if (single_leg_total) conn = {true, false};
    const int n0 = (conn[0] ? 1 : 0) + (conn[1] ? 1 : 0);
    const double p0 = n0 > 0 ? gauge_leader(cfg, m, (f0[0] + f0[1]) / n0) : 0.0;
    const double P_a = cfg.sim.accumulator_connected ? accumulator_for(cfg, gauge_leader(cfg, m, f_stat))
                                                     : cfg.accumulator.P_a0;
    PlantState init = standing_state(probe, y_stand_leg, p0, P_a, conn);
    if (mode != OutputMode::Free) init.z = 0.0, init.y = cfg.exo.rest_length + y_stand_leg;
    Simulation sim(cfg, init, name);
    for (int i = 0; i < 2; ++i) sim.controller().set_leg_mode(i, conn[i] ? LegMode::Leader : LegMode::Tank);
    const double y_ref = init.y;

    sim.run_until(strides * T, [&](double t, const PlantState&) {
        TickCommand c;
        c.refs.f = leg_refs(t);
        c.refs.f_ahead = leg_refs(t + lead);
        c.refs.f_stat = f_stat;
        c.refs.mass = m;
        c.refs.accumulator_enable = cfg.sim.accumulator_connected;
        if (single_leg_total) c.refs.valve_targets = std::array<double, 2>{180.0, 0.0};
        if (mode == OutputMode::Free) c.refs.y_ref = y_ref;
        c.mode = mode;
        return c;
    });
    GaitRun g;
    g.result = sim.finish();
    g.warmup = 2.0 * T;
    g.period = T;
    return g;
}

void stroke_metrics(SimResult& r, const SimConfig& cfg, double warmup, double period, int steps_per_stride) {
    const auto sl = stroke_loss(r, cfg, warmup);
    const auto t = r.column("t_s");
    const auto x = r.column("x_L_mm");
    const std::size_t i0 = index_at(t, warmup);
    const double steps = (t.back() - t[i0]) / period * steps_per_stride;
    r.metrics["stroke_loss_mm_per_step"] = sl.mean_mm;
    r.metrics["stroke_loss_max_mm"] = sl.max_mm;
    r.metrics["stroke_loss_min_mm"] = sl.min_mm;
    r.metrics["tank_open_events"] = sl.events;
    r.metrics["leader_drift_mm_per_step"] = steps > 0 ? (x.back() - x[i0]) / steps : 0.0;
    r.metrics["policy"] = to_string(cfg.controller.policy);

    // Force tracking on connected legs.
    const auto Pd = r.column("P_L_d_MPa");
    const auto P1 = r.column("P_line1_MPa");
    const auto th1 = r.column("theta_v1_deg");
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = i0; i < t.size(); ++i) {
        if (th1[i] >= 180.0 - 1e-9) {
            const double e = P1[i] - cfg.tank_pressure / units::MPa - Pd[i];
            acc += e * e;
            ++n;
        }
    }
    r.metrics["tracking_rms_MPa"] = n > 0 ? std::sqrt(acc / n) : 0.0;
}

}  // namespace

SimResult walk_track(const SimConfig& cfg, int strides) {
    auto g = gait_tracking(cfg, "walk_track", Task::Walk, 1.0, 8.2, OutputMode::Free, strides, false, 0.30);
    stroke_metrics(g.result, cfg, g.warmup, g.period, 2);
    g.result.metrics["f_stat"] = 8.2;
    attach_ledger(g.result);
    return g.result;
}

SimResult run_track(const SimConfig& cfg, int strides) {
    auto g = gait_tracking(cfg, "run_track", Task::Run, 0.6, 8.5, OutputMode::Blocked, strides, false, 0.30);
    stroke_metrics(g.result, cfg, g.warmup, g.period, 2);
    g.result.metrics["f_stat"] = 8.5;
    g.result.metrics["assistance"] = 0.6;
    attach_ledger(g.result);
    return g.result;
}

SimResult energy_comparison(const SimConfig& cfg_in, char variant, int strides) {
    const DesignVariant v = DesignVariant::from_label(variant);
    SimConfig cfg = cfg_in;
    cfg.exo.knee_ratio = 0.34;
    cfg.accumulator.P_a0 = 0.48e6;
    cfg.sim.accumulator_connected = v.passive_offset;

    double f_stat = 0.0;
    const auto sc = make_scenario(synth_profile(Task::Walk));
    if (v.passive_offset) {
        if (v.sharing) {
            f_stat = optimal_offset(make_offset_problem(sc, DesignVariant::D())).f_stat;
        } else {
            // One motor carries both legs' references on a single leg.
            const auto total = sc.total();
            f_stat = optimal_offset(make_offset_problem(total, std::vector<bool>(total.size(), true))).f_stat;
        }
    }
    auto g = gait_tracking(cfg, std::string("energy_comparison_") + variant, Task::Walk, 1.0, f_stat,
                           OutputMode::Free, strides, !v.sharing, 0.30);
    SimResult& r = g.result;
    const auto t = r.column("t_s");
    const auto I = r.column("I_M_A");
    const auto Pm = r.column("motor_power_W");
    const std::size_t i0 = index_at(t, g.warmup);
    double i2 = 0.0, mech = 0.0, pos = 0.0;
    for (std::size_t i = i0; i < t.size(); ++i) {
        i2 += I[i] * I[i];
        mech += Pm[i];
        pos += std::max(0.0, Pm[i]);
    }
    const double n = static_cast<double>(t.size() - i0);
    const double Rw = cfg.motor.winding_resistance;
    r.metrics["variant"] = std::string(1, variant);
    r.metrics["f_stat"] = f_stat;
    r.metrics["mean_square_current_A2"] = i2 / n;
    r.metrics["mean_electrical_power_W"] = Rw * i2 / n;
    r.metrics["mean_mechanical_power_W"] = mech / n;
    r.metrics["mean_positive_mechanical_power_W"] = pos / n;
    attach_ledger(r);
    return r;
}

const std::vector<double>& sweep_speeds() {
    static const std::vector<double> s{2600.0, 2000.0, 1500.0, 1000.0, 700.0, 500.0, 350.0, 250.0, 180.0};
    return s;
}

SimResult switch_step(const SimConfig& cfg_in, double valve_speed, bool variable_profile) {
    SimConfig cfg = cfg_in;
    cfg.valves.max_speed = valve_speed;
    cfg.controller.variable_speed_valves = variable_profile;
    Plant probe(cfg);
    const double Pt = cfg.tank_pressure;
    const double p_hold = 1.5e6;
    PlantState init = standing_state(probe, 0.30, 0.0, Pt + p_hold * cfg.cylinders.A_r / cfg.cylinders.A, {false, false});
    init.z = 0.0;
    init.P_L = probe.balanced_leader_pressure(init);
    Simulation sim(cfg, init, variable_profile ? "switch_step_variable" : "switch_step_fixed");
    const double t_sw = 0.02;
    const double t_end = t_sw + 180.0 / valve_speed + 0.35;
    sim.run_until(t_end, [&](double t, const PlantState&) {
        TickCommand c;
        c.refs.accumulator_enable = false;
        c.refs.current_override = 0.0;
        c.refs.valve_targets = std::array<double, 2>{t >= t_sw ? 180.0 : 0.0, 0.0};
        c.mode = OutputMode::Blocked;
        return c;
    });
    SimResult r = sim.finish();
    const auto t = r.column("t_s");
    const auto p = r.column("P_line1_MPa");
    // Measure from the instant the leader port opens.
    double t_open = t_sw;
    for (const auto& e : r.events) if (e.kind == "leader_open" && e.leg == 0) { t_open = e.t; break; }
    const auto m = step_metrics(t, p, t_open - cfg.sim.dt_control);
    r.metrics["valve_speed_deg_s"] = valve_speed;
    r.metrics["variable_profile"] = variable_profile;
    r.metrics["final_MPa"] = m.final_value;
    r.metrics["peak_MPa"] = *std::max_element(p.begin(), p.end());
    r.metrics["overshoot"] = m.overshoot;
    r.metrics["rise_time_s"] = m.rise_time;
    r.metrics["oscillation_hz"] = m.frequency;
    attach_ledger(r);
    return r;
}

SimResult switch_sweep_fixed(const SimConfig& cfg) {
    SimResult r;
    r.scenario = "switch_sweep_fixed";
    ordered_json table = ordered_json::array();
    for (double s : sweep_speeds()) {
        auto run = switch_step(cfg, s, false);
        table.push_back({{"speed_deg_s", s},
                         {"overshoot", run.metrics["overshoot"]},
                         {"rise_time_s", run.metrics["rise_time_s"]},
                         {"peak_MPa", run.metrics["peak_MPa"]},
                         {"closure", run.ledger.closure()}});
        if (r.rows.empty()) {
            r.columns = run.columns;
            r.rows = run.rows;
            r.ledger = run.ledger;
        }
        run.rows.clear();
        r.runs.push_back(std::move(run));
    }
    bool mono_os = true, mono_rt = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
        mono_os = mono_os && table[i]["overshoot"].get<double>() <= table[i - 1]["overshoot"].get<double>() + 1e-9;
        mono_rt = mono_rt && table[i]["rise_time_s"].get<double>() >= table[i - 1]["rise_time_s"].get<double>() - 1e-9;
    }
    r.metrics["sweep"] = table;
    r.metrics["overshoot_monotone"] = mono_os;
    r.metrics["rise_time_monotone"] = mono_rt;
    attach_ledger(r);
    return r;
}

SimResult switch_sweep_variable(const SimConfig& cfg) {
    auto r = switch_step(cfg, cfg.valves.max_speed, true);
    r.scenario = "switch_sweep_variable";
    return r;
}

SimResult switch_moving_output(const SimConfig& cfg_in, const std::string& direction, double speed) {
    if (direction != "down" && direction != "up") throw InvalidInput("direction must be up or down");
    if (!(speed > 0.0)) throw InvalidInput("speed must be positive");
    SimConfig cfg = cfg_in;
    Plant probe(cfg);
    const double Pt = cfg.tank_pressure;
    const double p_hold = 1.5e6;
    const double sign = direction == "down" ? -1.0 : 1.0;
    // Ramp the output speed in so the lines reach steady flow before the switch.
    const double t_ramp = 0.03, t_sw = 0.1, t_end = t_sw + 0.2;
    const double travel = speed * (t_end - 0.5 * t_ramp);
    const double leg0 = direction == "down" ? 0.02 + travel : 0.40 - travel;
    PlantState init = standing_state(probe, leg0, p_hold, Pt + p_hold * cfg.cylinders.A_r / cfg.cylinders.A, {true, false});
    init.z = 0.0;
    init.y = cfg.exo.rest_length + leg0;
    Simulation sim(cfg, init, "switch_moving_output");
    sim.run_until(t_end, [&](double t, const PlantState&) {
        TickCommand c;
        c.refs.accumulator_enable = false;
        c.refs.current_override = 0.0;
        c.refs.valve_targets = t >= t_sw ? std::array<double, 2>{0.0, 180.0} : std::array<double, 2>{180.0, 0.0};
        c.mode = OutputMode::Prescribed;
        c.leg_rate = sign * speed * std::min(1.0, t / t_ramp);
        return c;
    });
    SimResult r = sim.finish();
    const auto t = r.column("t_s");
    const auto p1 = r.column("P_line1_MPa");
    const auto F = r.column("leg_force_N");
    const auto th1 = r.column("theta_v1_deg");
    const std::size_t is = index_at(t, t_sw);
    const double p_pre = p1[is] - Pt / units::MPa;
    const double F_pre = F[is];
    double p_max = -1e300, p_min = 1e300, F_blocked = 0.0;
    for (std::size_t i = is; i < t.size(); ++i) {
        p_max = std::max(p_max, p1[i]);
        p_min = std::min(p_min, p1[i]);
        if (th1[i] >= cfg.valves.band_lo && th1[i] <= cfg.valves.band_hi) F_blocked = std::max(F_blocked, std::abs(F[i]));
    }
    r.metrics["direction"] = direction;
    r.metrics["speed_m_s"] = speed;
    r.metrics["check_valves"] = cfg.sim.check_valves;
    r.metrics["pre_switch_MPa"] = p_pre;
    r.metrics["overshoot"] = std::max(0.0, (p_max - Pt / units::MPa - p_pre) / p_pre);
    r.metrics["min_line_MPa_abs"] = p_min;
    r.metrics["pre_switch_force_N"] = F_pre;
    r.metrics["blocked_force_max_N"] = F_blocked;
    attach_ledger(r);
    return r;
}

SimResult check_valve_bypass(const SimConfig& cfg) {
    SimResult r;
    r.scenario = "check_valve_bypass";
    ordered_json table = ordered_json::array();
    const std::vector<double> speeds{0.25, 0.5, 1.0};
    std::vector<double> without, with;
    for (bool cv : {false, true}) {
        for (double v : speeds) {
            SimConfig c = cfg;
            c.sim.check_valves = cv;
            auto run = switch_moving_output(c, "down", v);
            const double os = run.metrics["overshoot"].get<double>();
            (cv ? with : without).push_back(os);
            table.push_back({{"speed_m_s", v}, {"check_valves", cv}, {"overshoot", os}, {"closure", run.ledger.closure()}});
            if (r.rows.empty()) {
                r.columns = run.columns;
                r.rows = run.rows;
                r.ledger = run.ledger;
            }
            run.rows.clear();
            r.runs.push_back(std::move(run));
        }
    }
    bool grows = true;
    for (std::size_t i = 1; i < without.size(); ++i) grows = grows && without[i] > without[i - 1];
    const double worst_with = *std::max_element(with.begin(), with.end());
    r.metrics["table"] = table;
    r.metrics["overshoot_grows_with_speed"] = grows;
    r.metrics["overshoot_removed"] = worst_with < without.front();
    attach_ledger(r);
    return r;
}

SimResult pump_step(const SimConfig& cfg, double step_pressure) {
    Plant probe(cfg);
    const double Pt = cfg.tank_pressure;
    const double A = cfg.cylinders.A, Ar = cfg.cylinders.A_r;
    // Start balanced at precharge; step the static leader target by step_pressure.
    PlantState init = standing_state(probe, 0.30, 0.0, cfg.accumulator.P_a0, {false, false});
    init.z = 0.0;
    init.P_L = probe.balanced_leader_pressure(init);
    const double p_start = (cfg.accumulator.P_a0 - Pt) * A / Ar;
    const double target = p_start + step_pressure;
    const double m = cfg.exo.proto_mass;
    const double f_stat = target * cfg.exo.knee_ratio * A / m;
    Simulation sim(cfg, init, "pump_step");
    const double T = 40.0;
    sim.run_until(T, [&](double, const PlantState&) {
        TickCommand c;
        c.refs.f_stat = f_stat;
        c.refs.mass = m;
        c.mode = OutputMode::Blocked;
        return c;
    });
    SimResult r = sim.finish();
    const auto t = r.column("t_s");
    const auto Pa = r.column("P_a_MPa");
    double peak = 0.0;
    double settle = -1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double pl = (Pa[i] * units::MPa - Pt) * A / Ar;
        peak = std::max(peak, pl);
        if (settle < 0.0 && std::abs(pl - target) < 0.02 * target) settle = t[i];
    }
    const double final_pl = (Pa.back() * units::MPa - Pt) * A / Ar;
    r.metrics["step_MPa"] = step_pressure / units::MPa;
    r.metrics["target_MPa"] = target / units::MPa;
    r.metrics["final_MPa"] = final_pl / units::MPa;
    r.metrics["steady_state_error"] = std::abs(final_pl - target) / target;
    r.metrics["overshoot"] = std::max(0.0, (peak - target) / step_pressure);
    r.metrics["settling_time_s"] = settle;
    attach_ledger(r);
    return r;
}

SimResult backdrive(const SimConfig& cfg_in, bool compensation) {
    SimConfig cfg = cfg_in;
    cfg.controller.friction_compensation = compensation;
    cfg.sim.accumulator_connected = false;
    Plant probe(cfg);
    const double m = cfg.exo.proto_mass;
    const double f0 = kGravity / 4.0, f1 = kGravity / 2.0, T = 4.0;
    const double p0 = gauge_leader(cfg, m, f0);
    PlantState init = standing_state(probe, 0.21, p0, cfg.accumulator.P_a0, {true, true});
    init.z = 0.0;
    init.y = cfg.exo.rest_length + 0.21;
    Simulation sim(cfg, init, compensation ? "backdrive_compensated" : "backdrive_uncompensated");
    sim.controller().set_leg_mode(0, LegMode::Leader);
    sim.controller().set_leg_mode(1, LegMode::Leader);
    const double v = 0.3, w = 2.0 * kPi;
    sim.run_until(T, [&](double t, const PlantState&) {
        TickCommand c;
        const double f = f0 + (f1 - f0) * t / T;
        c.refs.f = {f, f};
        c.refs.f_ahead = {f, f};
        c.refs.mass = m;
        c.refs.accumulator_enable = false;
        c.mode = OutputMode::Prescribed;
        c.leg_rate = v * std::sin(w * t);
        return c;
    });
    SimResult r = sim.finish();
    const auto t = r.column("t_s");
    const auto P1 = r.column("P_line1_MPa");
    const auto Pd = r.column("P_L_d_MPa");
    const std::size_t i0 = index_at(t, 0.5);
    double acc = 0.0;
    for (std::size_t i = i0; i < t.size(); ++i) {
        const double e = P1[i] - cfg.tank_pressure / units::MPa - Pd[i];
        acc += e * e;
    }
    r.metrics["friction_compensation"] = compensation;
    r.metrics["tracking_rms_MPa"] = std::sqrt(acc / static_cast<double>(t.size() - i0));
    attach_ledger(r);
    return r;
}

SimResult accumulator_charge(const SimConfig& cfg_in, double n) {
    SimConfig cfg = cfg_in;
    cfg.sim.polytropic = n > 1.2 ? PolytropicMode::Adiabatic : PolytropicMode::Isothermal;
    cfg.accumulator.n = n;
    Plant probe(cfg);
    PlantState init = standing_state(probe, 0.30, 0.0, cfg.accumulator.P_a0, {false, false});
    init.z = 0.0;
    init.x_L = 0.0;
    init.P_L = probe.balanced_leader_pressure(init);
    // Slow, model-matched charge toward 3 MPa on the leader side.
    const double m = cfg.exo.proto_mass;
    const double f_stat = 3.0e6 * cfg.exo.knee_ratio * cfg.cylinders.A / m;
    Simulation sim(cfg, init, "accumulator_charge");
    sim.run_until(20.0, [&](double, const PlantState&) {
        TickCommand c;
        c.refs.f_stat = f_stat;
        c.refs.mass = m;
        c.mode = OutputMode::Blocked;
        return c;
    });
    SimResult r = sim.finish();
    const auto V = r.column("V_a_mL");
    const auto P = r.column("P_a_MPa");
    AccumulatorParams ap = cfg.accumulator;
    double worst = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (V[i] < 0.0) continue;
        const double closed = accumulator_pressure(ap, V[i] * units::mL) / units::MPa;
        worst = std::max(worst, std::abs(P[i] - closed) / closed);
    }
    r.metrics["n"] = n;
    r.metrics["max_relative_error"] = worst;
    r.metrics["final_volume_mL"] = V.back();
    r.metrics["final_pressure_MPa"] = P.back();
    attach_ledger(r);
    return r;
}

// ---------------------------------------------------------------------------
// Dispatch

std::vector<std::string> scenario_names() {
    return {"squat_varying_payload", "jump",
            "walk_track",            "run_track",
            "energy_comparison",     "switch_sweep_fixed",
            "switch_sweep_variable", "switch_moving_output",
            "check_valve_bypass",    "pump_step",
            "backdrive",             "accumulator_charge"};
}

SimResult run_scenario(const std::string& spec, const SimConfig& cfg) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto p = spec.find(':', start);
        parts.push_back(spec.substr(start, p == std::string::npos ? std::string::npos : p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    const std::string& name = parts[0];
    auto arg = [&](std::size_t i, const std::string& def) { return parts.size() > i ? parts[i] : def; };
    auto num = [&](std::size_t i, double def) {
        if (parts.size() <= i) return def;
        try {
            std::size_t used = 0;
            const double v = std::stod(parts[i], &used);
            if (used != parts[i].size()) throw InvalidInput("");
            return v;
        } catch (...) {
            throw InvalidInput("bad numeric scenario argument '" + parts[i] + "' in " + spec);
        }
    };
    SimResult r;
    if (name == "squat_varying_payload") r = squat_varying_payload(cfg);
    else if (name == "jump") r = jump(cfg, num(1, 0.12));
    else if (name == "walk_track") r = walk_track(cfg, static_cast<int>(num(1, 12)));
    else if (name == "run_track") r = run_track(cfg, static_cast<int>(num(1, 12)));
    else if (name == "energy_comparison") {
        const std::string v = arg(1, "D");
        if (v.size() != 1) throw InvalidInput("energy_comparison variant must be one of A-D");
        r = energy_comparison(cfg, v[0]);
    } else if (name == "switch_sweep_fixed") r = switch_sweep_fixed(cfg);
    else if (name == "switch_sweep_variable") r = switch_sweep_variable(cfg);
    else if (name == "switch_moving_output") r = switch_moving_output(cfg, arg(1, "down"), num(2, 1.0));
    else if (name == "check_valve_bypass") r = check_valve_bypass(cfg);
    else if (name == "pump_step") r = pump_step(cfg, num(1, 1.0) * units::MPa);
    else if (name == "backdrive") r = backdrive(cfg, arg(1, "on") != "off");
    else if (name == "accumulator_charge") r = accumulator_charge(cfg, num(1, 1.0));
    else throw InvalidInput("unknown scenario '" + name + "'");
    r.metrics["scenario_spec"] = spec;
    return r;
}

}  // namespace hydrostat
