#include "hydrostat/config.hpp"

#include <cmath>
#include <fstream>

#include "hydrostat/errors.hpp"

namespace hydrostat {

using nlohmann::json;
using nlohmann::ordered_json;

DoubleSupportPolicy policy_from_string(const std::string& s) {
    if (s == "both") return DoubleSupportPolicy::BothConnected;
    if (s == "leading") return DoubleSupportPolicy::LeadingLegOnly;
    if (s == "release") return DoubleSupportPolicy::ReleaseBeforeSwitch;
    throw InvalidInput("unknown double-support policy '" + s + "' (both|leading|release)");
}

std::string to_string(DoubleSupportPolicy p) {
    switch (p) {
        case DoubleSupportPolicy::BothConnected: return "both";
        case DoubleSupportPolicy::LeadingLegOnly: return "leading";
        case DoubleSupportPolicy::ReleaseBeforeSwitch: return "release";
    }
    return "both";
}

namespace {

std::string to_string(PolytropicMode m) {
    switch (m) {
        case PolytropicMode::Auto: return "auto";
        case PolytropicMode::Isothermal: return "1.0";
        case PolytropicMode::Adiabatic: return "1.4";
    }
    return "auto";
}

PolytropicMode polytropic_from_string(const std::string& s) {
    if (s == "auto") return PolytropicMode::Auto;
    if (s == "1.0" || s == "1" || s == "isothermal") return PolytropicMode::Isothermal;
    if (s == "1.4" || s == "adiabatic") return PolytropicMode::Adiabatic;
    throw InvalidInput("polytropic mode must be auto, 1.0 or 1.4");
}

// Read helper: missing keys keep the current value.
template <class T>
void get(const json& sec, const char* key, T& dst, double scale = 1.0) {
    if (!sec.contains(key)) return;
    const auto& v = sec.at(key);
    if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw InvalidInput(std::string("config key '") + key + "' must be a number");
        dst = v.get<double>() * scale;
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw InvalidInput(std::string("config key '") + key + "' must be a boolean");
        dst = v.get<bool>();
    } else {
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw InvalidInput(std::string("config key '") + key + "' must be an integer");
        dst = v.get<T>();
    }
}

const json& section(const json& j, const char* name) {
    static const json empty = json::object();
    if (!j.contains(name)) return empty;
    if (!j.at(name).is_object()) throw InvalidInput(std::string("config section '") + name + "' must be an object");
    return j.at(name);
}

}  // namespace

double SimConfig::leader_inertance() const {
    return motor.reflected_mass / (cylinders.A_r * cylinders.A_r);
}

LineParams SimConfig::line_params() const {
    // Resonance is specified for the blocked-output loop: leader mass plus hose.
    const auto total = LineParams::from_resonance(line.compliance, line.natural_hz, line.zeta);
    LineParams l = total;
    l.inertance = total.inertance - leader_inertance();
    if (l.inertance <= 0.0) throw InvalidInput("line natural frequency too high for the leader reflected mass");
    return l;
}

void SimConfig::validate() const {
    auto pos = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive");
    };
    pos(accumulator.V_a0, "accumulator.V_a0");
    pos(accumulator.P_a0, "accumulator.P_a0");
    if (accumulator.P_a0 >= accumulator.P_max) throw InvalidInput("precharge must be below P_max");
    if (accumulator.P_a0 <= tank_pressure) throw InvalidInput("precharge must exceed tank pressure");
    pos(cylinders.A, "cylinders.A");
    pos(cylinders.A_r, "cylinders.A_r");
    if (cylinders.A_r >= cylinders.A) throw InvalidInput("rod-side area must be below piston area");
    pos(cylinders.leader_stroke, "cylinders.leader_stroke");
    pos(cylinders.follower_stroke, "cylinders.follower_stroke");
    pos(exo.knee_ratio, "exo.knee_ratio");
    pos(exo.proto_mass, "exo.proto_mass");
    pos(exo.foot_mass, "exo.foot_mass");
    pos(motor.torque_constant, "motor.torque_constant");
    if (motor.winding_resistance < 0.0) throw InvalidInput("winding resistance must be >= 0");
    pos(motor.peak_torque, "motor.peak_torque");
    if (friction.eta_bs <= 0.0 || friction.eta_bs > 1.0) throw InvalidInput("friction.eta_bs must be in (0, 1]");
    if (friction.mu_seal < 0.0 || friction.b < 0.0 || friction.gamma < 0.0) throw InvalidInput("friction terms must be >= 0");
    pos(valves.cv_max, "valves.cv_max");
    pos(valves.max_speed, "valves.max_speed");
    pos(valves.tau, "valves.tau");
    if (!(valves.band_lo > 0.0 && valves.band_lo <= valves.band_hi && valves.band_hi < 180.0))
        throw InvalidInput("valve blocked band must satisfy 0 < lo <= hi < 180");
    if (check_valve.cv < 0.0 || check_valve.cracking < 0.0) throw InvalidInput("check valve terms must be >= 0");
    pos(line.leader_compliance, "line.leader_compliance");
    pos(sim.dt_plant, "sim.dt_plant");
    pos(sim.dt_control, "sim.dt_control");
    const double ratio = sim.dt_control / sim.dt_plant;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
        throw InvalidInput("control period must be an integer multiple of the plant step");
    if (controller.k_p < 0.0) throw InvalidInput("controller.k_p must be >= 0");
    if (!(controller.deadband_close > 0.0 && controller.deadband_close < controller.deadband_open))
        throw InvalidInput("pump dead-band must satisfy 0 < close < open");
    pos(pump.max_speed, "pump.max_speed");
    (void)pump.params();
    (void)line_params();
}

ordered_json config_to_json(const SimConfig& c) {
    ordered_json j;
    j["accumulator"] = {{"V_a0_mL", c.accumulator.V_a0 / units::mL},
                        {"P_a0_MPa", c.accumulator.P_a0 / units::MPa},
                        {"n", c.accumulator.n},
                        {"P_max_MPa", c.accumulator.P_max / units::MPa}};
    j["pump"] = {{"V_displ_mL_per_rad", c.pump.V_displ / units::mL},
                 {"m_P_Pa_s", c.pump.m_P},
                 {"m_Q_rad_per_mL", c.pump.m_Q * units::mL},
                 {"max_speed_rad_s", c.pump.max_speed}};
    j["friction"] = {{"mu_seal_Pa", c.friction.mu_seal},
                     {"eta_bs", c.friction.eta_bs},
                     {"b_Pa_s_per_m", c.friction.b},
                     {"gamma_s_per_m", c.friction.gamma}};
    j["motor"] = {{"torque_constant_Nm_per_A", c.motor.torque_constant},
                  {"winding_resistance_ohm", c.motor.winding_resistance},
                  {"continuous_torque_Nm", c.motor.continuous_torque},
                  {"peak_torque_Nm", c.motor.peak_torque},
                  {"reflected_mass_kg", c.motor.reflected_mass}};
    j["ballscrew"] = {{"lead_mm_per_turn", c.ballscrew.lead * 2.0 * kPi / units::mm},
                      {"efficiency", c.ballscrew.efficiency}};
    j["cylinders"] = {{"A_mm2", c.cylinders.A / units::mm2},
                      {"A_r_mm2", c.cylinders.A_r / units::mm2},
                      {"leader_stroke_mm", c.cylinders.leader_stroke / units::mm},
                      {"follower_stroke_mm", c.cylinders.follower_stroke / units::mm}};
    j["line"] = {{"compliance_mL_per_MPa", c.line.compliance / units::mL * units::MPa},
                 {"natural_hz", c.line.natural_hz},
                 {"zeta", c.line.zeta},
                 {"leader_compliance_mL_per_MPa", c.line.leader_compliance / units::mL * units::MPa}};
    j["valves"] = {{"cv_max", c.valves.cv_max},         {"band_lo_deg", c.valves.band_lo},
                   {"band_hi_deg", c.valves.band_hi},   {"max_speed_deg_s", c.valves.max_speed},
                   {"tau_s", c.valves.tau},             {"slow_ratio", c.valves.slow_ratio},
                   {"slow_margin_deg", c.valves.slow_margin}, {"ramp_deg", c.valves.ramp}};
    j["check_valve"] = {{"cv", c.check_valve.cv}, {"cracking_kPa", c.check_valve.cracking / units::kPa}};
    j["exo"] = {{"proto_mass_kg", c.exo.proto_mass},
                {"foot_mass_kg", c.exo.foot_mass},
                {"knee_ratio", c.exo.knee_ratio},
                {"rest_length_m", c.exo.rest_length},
                {"leg_stroke_m", c.exo.leg_stroke},
                {"standing_height_m", c.exo.standing_height},
                {"ground_stiffness", c.exo.ground_stiffness},
                {"ground_damping", c.exo.ground_damping},
                {"stop_stiffness", c.exo.stop_stiffness},
                {"stop_damping", c.exo.stop_damping}};
    j["controller"] = {{"k_p_mL_s_per_bar", c.controller.k_p / units::mL * units::bar},
                       {"deadband_close", c.controller.deadband_close},
                       {"deadband_open", c.controller.deadband_open},
                       {"valve_lead_ms", c.controller.valve_lead / units::ms},
                       {"double_support_policy", to_string(c.controller.policy)},
                       {"release_pressure_kPa", c.controller.release_pressure / units::kPa},
                       {"release_timeout_ms", c.controller.release_timeout / units::ms},
                       {"friction_compensation", c.controller.friction_compensation},
                       {"variable_speed_valves", c.controller.variable_speed_valves},
                       {"max_transmission_pressure_MPa", c.controller.max_transmission_pressure / units::MPa},
                       {"trim_kp", c.controller.trim_kp},
                       {"trim_kd", c.controller.trim_kd},
                       {"trim_limit", c.controller.trim_limit}};
    j["sim"] = {{"dt_plant_ms", c.sim.dt_plant / units::ms},
                {"dt_control_ms", c.sim.dt_control / units::ms},
                {"seed", c.sim.seed},
                {"pressure_noise_kPa", c.sim.pressure_noise / units::kPa},
                {"accumulator_connected", c.sim.accumulator_connected},
                {"check_valves", c.sim.check_valves},
                {"polytropic", to_string(c.sim.polytropic)},
                {"valve_energy_J_per_deg", c.sim.valve_energy_per_deg}};
    j["tank_pressure_MPa"] = c.tank_pressure / units::MPa;
    return j;
}

SimConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("config root must be an object");
    SimConfig c;
    {
        const auto& s = section(j, "accumulator");
        get(s, "V_a0_mL", c.accumulator.V_a0, units::mL);
        get(s, "P_a0_MPa", c.accumulator.P_a0, units::MPa);
        get(s, "n", c.accumulator.n);
        get(s, "P_max_MPa", c.accumulator.P_max, units::MPa);
    }
    {
        const auto& s = section(j, "pump");
        get(s, "V_displ_mL_per_rad", c.pump.V_displ, units::mL);
        get(s, "m_P_Pa_s", c.pump.m_P);
        get(s, "m_Q_rad_per_mL", c.pump.m_Q, 1.0 / units::mL);
        get(s, "max_speed_rad_s", c.pump.max_speed);
    }
    {
        const auto& s = section(j, "friction");
        get(s, "mu_seal_Pa", c.friction.mu_seal);
        get(s, "eta_bs", c.friction.eta_bs);
        get(s, "b_Pa_s_per_m", c.friction.b);
        get(s, "gamma_s_per_m", c.friction.gamma);
    }
    {
        const auto& s = section(j, "motor");
        get(s, "torque_constant_Nm_per_A", c.motor.torque_constant);
        get(s, "winding_resistance_ohm", c.motor.winding_resistance);
        get(s, "continuous_torque_Nm", c.motor.continuous_torque);
        get(s, "peak_torque_Nm", c.motor.peak_torque);
        get(s, "reflected_mass_kg", c.motor.reflected_mass);
    }
    {
        const auto& s = section(j, "ballscrew");
        double lead_mm = c.ballscrew.lead * 2.0 * kPi / units::mm;
        get(s, "lead_mm_per_turn", lead_mm);
        c.ballscrew.lead = lead_mm * units::mm / (2.0 * kPi);
        get(s, "efficiency", c.ballscrew.efficiency);
    }
    {
        const auto& s = section(j, "cylinders");
        get(s, "A_mm2", c.cylinders.A, units::mm2);
        get(s, "A_r_mm2", c.cylinders.A_r, units::mm2);
        get(s, "leader_stroke_mm", c.cylinders.leader_stroke, units::mm);
        get(s, "follower_stroke_mm", c.cylinders.follower_stroke, units::mm);
    }
    {
        const auto& s = section(j, "line");
        get(s, "compliance_mL_per_MPa", c.line.compliance, units::mL / units::MPa);
        get(s, "natural_hz", c.line.natural_hz);
        get(s, "zeta", c.line.zeta);
        get(s, "leader_compliance_mL_per_MPa", c.line.leader_compliance, units::mL / units::MPa);
    }
    {
        const auto& s = section(j, "valves");
        get(s, "cv_max", c.valves.cv_max);
        get(s, "band_lo_deg", c.valves.band_lo);
        get(s, "band_hi_deg", c.valves.band_hi);
        get(s, "max_speed_deg_s", c.valves.max_speed);
        get(s, "tau_s", c.valves.tau);
        get(s, "slow_ratio", c.valves.slow_ratio);
        get(s, "slow_margin_deg", c.valves.slow_margin);
        get(s, "ramp_deg", c.valves.ramp);
    }
    {
        const auto& s = section(j, "check_valve");
        get(s, "cv", c.check_valve.cv);
        get(s, "cracking_kPa", c.check_valve.cracking, units::kPa);
    }
    {
        const auto& s = section(j, "exo");
        get(s, "proto_mass_kg", c.exo.proto_mass);
        get(s, "foot_mass_kg", c.exo.foot_mass);
        get(s, "knee_ratio", c.exo.knee_ratio);
        get(s, "rest_length_m", c.exo.rest_length);
        get(s, "leg_stroke_m", c.exo.leg_stroke);
        get(s, "standing_height_m", c.exo.standing_height);
        get(s, "ground_stiffness", c.exo.ground_stiffness);
        get(s, "ground_damping", c.exo.ground_damping);
        get(s, "stop_stiffness", c.exo.stop_stiffness);
        get(s, "stop_damping", c.exo.stop_damping);
    }
    {
        const auto& s = section(j, "controller");
        get(s, "k_p_mL_s_per_bar", c.controller.k_p, units::mL / units::bar);
        get(s, "deadband_close", c.controller.deadband_close);
        get(s, "deadband_open", c.controller.deadband_open);
        get(s, "valve_lead_ms", c.controller.valve_lead, units::ms);
        if (s.contains("double_support_policy")) {
            if (!s.at("double_support_policy").is_string()) throw InvalidInput("double_support_policy must be a string");
            c.controller.policy = policy_from_string(s.at("double_support_policy").get<std::string>());
        }
        get(s, "release_pressure_kPa", c.controller.release_pressure, units::kPa);
        get(s, "release_timeout_ms", c.controller.release_timeout, units::ms);
        get(s, "friction_compensation", c.controller.friction_compensation);
        get(s, "variable_speed_valves", c.controller.variable_speed_valves);
        get(s, "max_transmission_pressure_MPa", c.controller.max_transmission_pressure, units::MPa);
        get(s, "trim_kp", c.controller.trim_kp);
        get(s, "trim_kd", c.controller.trim_kd);
        get(s, "trim_limit", c.controller.trim_limit);
    }
    {
        const auto& s = section(j, "sim");
        get(s, "dt_plant_ms", c.sim.dt_plant, units::ms);
        get(s, "dt_control_ms", c.sim.dt_control, units::ms);
        get(s, "seed", c.sim.seed);
        get(s, "pressure_noise_kPa", c.sim.pressure_noise, units::kPa);
        get(s, "accumulator_connected", c.sim.accumulator_connected);
        get(s, "check_valves", c.sim.check_valves);
        if (s.contains("polytropic")) {
            const auto& v = s.at("polytropic");
            c.sim.polytropic = polytropic_from_string(v.is_string() ? v.get<std::string>() : v.dump());
        }
        get(s, "valve_energy_J_per_deg", c.sim.valve_energy_per_deg);
    }
    if (j.contains("tank_pressure_MPa")) {
        if (!j.at("tank_pressure_MPa").is_number()) throw InvalidInput("tank_pressure_MPa must be a number");
        c.tank_pressure = j.at("tank_pressure_MPa").get<double>() * units::MPa;
    }
    c.validate();
    return c;
}

void apply_override(ordered_json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("override must look like section.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    ordered_json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw InvalidInput("empty key in override: " + assignment);
        if (dot == std::string::npos) {
            if (!node->contains(key)) throw InvalidInput("unknown config key: " + path);
            ordered_json value = ordered_json::parse(raw, nullptr, false);
            if (value.is_discarded()) value = raw;  // bare word -> string
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) throw InvalidInput("unknown config section: " + key);
        node = &(*node)[key];
        start = dot + 1;
    }
}

SimConfig default_config() {
    SimConfig c;
    c.motor.winding_resistance = 0.836;
    return c;
}

std::filesystem::path bundled_config_path() {
#ifdef HYDROSTAT_CONFIG_DIR
    return std::filesystem::path(HYDROSTAT_CONFIG_DIR) / "prototype.json";
#else
    return std::filesystem::path("config") / "prototype.json";
#endif
}

SimConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    const auto file = path.empty() ? bundled_config_path() : path;
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot open config: " + file.string());
    ordered_json doc = ordered_json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw InvalidInput("config is not valid JSON: " + file.string());
    if (!doc.is_object()) throw InvalidInput("config root must be an object");
    // No built-in winding resistance: the file has to state it.
    if (!doc.contains("motor") || !doc["motor"].is_object() || !doc["motor"].contains("winding_resistance_ohm"))
        throw InvalidInput("config must set motor.winding_resistance_ohm");
    // Fill unspecified keys so overrides can target them.
    ordered_json full = config_to_json(default_config());
    full.merge_patch(doc);
    doc = std::move(full);
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_json(doc);
}

}  // namespace hydrostat
