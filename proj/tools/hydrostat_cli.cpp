// hydrostat command-line front end.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hydrostat/analysis.hpp"
#include "hydrostat/config.hpp"
#include "hydrostat/errors.hpp"
#include "hydrostat/optimizer.hpp"
#include "hydrostat/profiles.hpp"
#include "hydrostat/scenarios.hpp"
#include "hydrostat/sim_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hydrostat;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kFault = 3, kInfeasible = 4 };

struct Common {
    std::string config;
    std::string out = "out";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
};

class Infeasible : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

SimConfig resolve_config(const Common& c) {
    std::vector<std::string> ov = c.overrides;
    if (c.seed_set) ov.push_back("sim.seed=" + std::to_string(c.seed));
    return load_config(c.config.empty() ? bundled_config_path() : fs::path(c.config), ov);
}

void write_manifest(const Common& c, const std::string& command, const std::string& scenario, const SimConfig& cfg) {
    auto m = make_manifest(command, scenario, cfg, c.overrides).to_json();
    m["config_path"] = c.config.empty() ? bundled_config_path().string() : c.config;
    m["output_dir"] = c.out;
    m["format"] = c.format;
    write_text(fs::path(c.out) / "manifest.json", m.dump(2) + "\n");
}

std::string mask_csv(const TaskScenario& sc) {
    std::string s = "t_s,right_contact,left_contact,legs_in_contact\n";
    for (std::size_t i = 0; i < sc.size(); ++i) {
        s += fmt::format("{:.6f},{},{},{}\n", static_cast<double>(i) * sc.dt(), sc.in_contact(0, i) ? 1 : 0,
                         sc.in_contact(1, i) ? 1 : 0, sc.legs_in_contact(i));
    }
    return s;
}

int cmd_profiles(const Common& c, const std::string& task_name) {
    const Task task = task_from_string(task_name);
    const auto sc = make_scenario(synth_profile(task));
    const fs::path out(c.out);
    const std::string base = std::string(to_string(task));
    write_text(out / (base + "_right.csv"), profile_csv(sc.right));
    write_text(out / (base + "_left.csv"), profile_csv(sc.left));
    write_text(out / (base + "_contacts.csv"), mask_csv(sc));
    write_manifest(c, "profiles", base, default_config());
    return kOk;
}

std::vector<TaskScenario> analysis_set() {
    return {make_scenario(synth_profile(Task::Walk)), make_scenario(synth_profile(Task::Run)),
            make_scenario(synth_profile(Task::Jump)), make_scenario(synth_profile(Task::SitToStand))};
}

int cmd_analyze(const Common& c) {
    const auto set = analysis_set();
    OffsetMap off;
    for (const auto& sc : set) off[sc.right.task] = optimal_offsets(sc);
    const auto table = design_table(set, off);
    const fs::path out(c.out);
    if (c.format == "json") write_text(out / "design_table.json", design_table_json(table) + "\n");
    else write_text(out / "design_table.csv", design_table_csv(table));
    std::cout << design_table_csv(table);
    write_manifest(c, "analyze", "design_table", default_config());
    return kOk;
}

int cmd_optimize(const Common& c, const std::string& task_name, char variant_label, const std::string& profile_path,
                 bool periodic) {
    const Task task = task_from_string(task_name);
    const auto v = DesignVariant::from_label(variant_label);
    if (!v.passive_offset) throw InvalidInput("variants A and C have no static offset to optimise");
    GrfProfile profile;
    if (!profile_path.empty()) {
        if (task != Task::Custom) throw InvalidInput("--profile requires task 'custom'");
        ColumnSpec spec;
        spec.periodic = periodic;
        profile = load_profile_csv(profile_path, spec).profile;
    } else {
        profile = synth_profile(task);
    }
    // A measured periodic cycle is mirrored half a cycle later onto the other leg.
    const auto sc = make_scenario(profile, profile_path.empty() ? -1.0 : (profile.periodic() ? 0.5 : 0.0));
    const auto res = optimal_offset(make_offset_problem(sc, v));
    ordered_json j{{"task", std::string(to_string(task))},
                   {"variant", std::string(1, variant_label)},
                   {"f_stat", res.f_stat},
                   {"rms", res.rms},
                   {"peak", res.peak},
                   {"constraint_active", res.constraint_active},
                   {"feasible", res.feasible}};
    const fs::path out(c.out);
    if (c.format == "json") {
        write_text(out / "offset.json", j.dump(2) + "\n");
    } else {
        write_text(out / "offset.csv",
                   fmt::format("task,variant,f_stat,rms,peak,constraint_active,feasible\n{},{},{:.6f},{:.6f},{:.6f},{},{}\n",
                               to_string(task), variant_label, res.f_stat, res.rms, res.peak,
                               res.constraint_active ? 1 : 0, res.feasible ? 1 : 0));
    }
    std::cout << j.dump(2) << "\n";
    write_manifest(c, "optimize", std::string(to_string(task)) + ":" + variant_label, default_config());
    if (!res.feasible) throw Infeasible("no offset satisfies the peak constraint");
    return kOk;
}

void emit_result(const Common& c, const SimResult& r) {
    const fs::path out(c.out);
    auto summary = result_summary(r);
    write_text(out / (r.scenario + "_summary.json"), summary.dump(2) + "\n");
    if (c.format == "csv" && !r.rows.empty()) write_csv(r, out / (r.scenario + ".csv"));
    if (c.format == "json") {
        ordered_json j = summary;
        j["columns"] = r.columns;
        j["rows"] = r.rows;
        write_text(out / (r.scenario + ".json"), j.dump() + "\n");
    }
}

int cmd_simulate(const Common& c, const std::string& scenario) {
    const SimConfig cfg = resolve_config(c);
    const auto r = run_scenario(scenario, cfg);
    emit_result(c, r);
    write_manifest(c, "simulate", scenario, cfg);
    std::cout << r.metrics.dump(2) << "\n";
    return kOk;
}

int cmd_compare_energy(const Common& c, int strides) {
    const SimConfig cfg = resolve_config(c);
    ordered_json table = ordered_json::array();
    std::string csv = "variant,f_stat,mean_electrical_power_W,mean_square_current_A2,ratio_A_over\n";
    std::map<char, double> power;
    for (char v : {'A', 'B', 'C', 'D'}) {
        const auto r = energy_comparison(cfg, v, strides);
        emit_result(c, r);
        power[v] = r.metrics["mean_electrical_power_W"].get<double>();
        table.push_back({{"variant", std::string(1, v)},
                         {"f_stat", r.metrics["f_stat"]},
                         {"mean_electrical_power_W", power[v]},
                         {"mean_square_current_A2", r.metrics["mean_square_current_A2"]},
                         {"closure", r.ledger.closure()}});
    }
    for (auto& row : table) {
        const char v = row["variant"].get<std::string>()[0];
        row["ratio_A_over"] = power['A'] / power[v];
        csv += fmt::format("{},{:.4f},{:.6g},{:.6g},{:.4f}\n", v, row["f_stat"].get<double>(), power[v],
                           row["mean_square_current_A2"].get<double>(), power['A'] / power[v]);
    }
    const bool ordered = power['A'] > power['C'] && power['C'] > power['D'] && power['D'] > power['B'];
    ordered_json j{{"variants", table}, {"ordering_A_C_D_B", ordered}};
    const fs::path out(c.out);
    write_text(out / "energy_comparison.csv", csv);
    write_text(out / "energy_comparison.json", j.dump(2) + "\n");
    write_manifest(c, "compare-energy", "energy_comparison", cfg);
    std::cout << csv;
    return kOk;
}

int cmd_sweep_valves(const Common& c, const std::string& mode) {
    const SimConfig cfg = resolve_config(c);
    const fs::path out(c.out);
    std::string csv = "mode,speed_deg_s,overshoot,rise_time_s,peak_MPa\n";
    ordered_json j;
    if (mode == "fixed" || mode == "all") {
        const auto r = switch_sweep_fixed(cfg);
        for (const auto& row : r.metrics["sweep"]) {
            csv += fmt::format("fixed,{},{:.6f},{:.6f},{:.6f}\n", row["speed_deg_s"].get<double>(),
                               row["overshoot"].get<double>(), row["rise_time_s"].get<double>(),
                               row["peak_MPa"].get<double>());
        }
        j["fixed"] = r.metrics;
    }
    if (mode == "variable" || mode == "all") {
        const auto r = switch_sweep_variable(cfg);
        csv += fmt::format("variable,{},{:.6f},{:.6f},{:.6f}\n", cfg.valves.max_speed,
                           r.metrics["overshoot"].get<double>(), r.metrics["rise_time_s"].get<double>(),
                           r.metrics["peak_MPa"].get<double>());
        j["variable"] = r.metrics;
    }
    if (mode == "check-valve" || mode == "all") {
        const auto r = check_valve_bypass(cfg);
        for (const auto& row : r.metrics["table"]) {
            csv += fmt::format("{},{},{:.6f},,\n", row["check_valves"].get<bool>() ? "check_valve" : "no_bypass",
                               row["speed_m_s"].get<double>(), row["overshoot"].get<double>());
        }
        j["check_valve"] = r.metrics;
        if (r.metrics["overshoot_removed"].get<bool>()) std::cout << "check valves: overshoot removed\n";
    }
    if (j.is_null()) throw InvalidInput("mode must be fixed, variable, check-valve or all");
    write_text(out / "valve_sweep.csv", csv);
    write_text(out / "valve_sweep.json", j.dump(2) + "\n");
    write_manifest(c, "sweep-valves", mode, cfg);
    std::cout << csv;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hydrostatic exoskeleton actuation toolkit"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub, bool sim) {
        sub->add_option("--out", common.out, "Output directory");
        sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        if (sim) {
            sub->add_option("--config", common.config, "Configuration JSON")->check(CLI::ExistingFile);
            sub->add_option("--seed", common.seed, "RNG seed")->each([&](const std::string&) { common.seed_set = true; });
            sub->add_option("--override", common.overrides, "section.key=value")->allow_extra_args(false);
        }
    };

    std::string task = "walk";
    auto* profiles = app.add_subcommand("profiles", "Write synthesized GRF profiles and contact masks");
    profiles->add_option("task", task, "walk|run|jump|sit_to_stand|constant")->required();
    add_common(profiles, false);

    auto* analyze = app.add_subcommand("analyze", "Per-task, per-design motor demand table");
    add_common(analyze, false);

    std::string variant = "D";
    auto* optimize = app.add_subcommand("optimize", "Optimal static offset for one task and design");
    optimize->add_option("task", task)->required();
    optimize->add_option("variant", variant, "B or D")->check(CLI::IsMember({"B", "D"}));
    std::string profile_path;
    bool periodic = false;
    optimize->add_option("--profile", profile_path, "time,force CSV for task 'custom'")->check(CLI::ExistingFile);
    optimize->add_flag("--periodic", periodic, "Treat the --profile series as one gait cycle");
    add_common(optimize, false);

    std::string scenario;
    auto* simulate = app.add_subcommand("simulate", "Run one simulator scenario (name[:arg[:arg]])");
    simulate->add_option("scenario", scenario)->required();
    add_common(simulate, true);
    simulate->footer("Scenarios: " + [] {
        std::string s;
        for (const auto& n : scenario_names()) s += n + " ";
        return s;
    }());

    int strides = 10;
    auto* energy = app.add_subcommand("compare-energy", "Walking motor power for designs A-D");
    energy->add_option("--strides", strides)->check(CLI::Range(3, 200));
    add_common(energy, true);

    std::string mode = "all";
    auto* sweep = app.add_subcommand("sweep-valves", "Valve switching sweeps");
    sweep->add_option("mode", mode, "fixed|variable|check-valve|all");
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*profiles) return cmd_profiles(common, task);
        if (*analyze) return cmd_analyze(common);
        if (*optimize) return cmd_optimize(common, task, variant[0], profile_path, periodic);
        if (*simulate) return cmd_simulate(common, scenario);
        if (*energy) return cmd_compare_energy(common, strides);
        if (*sweep) return cmd_sweep_valves(common, mode);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return kFault;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    }
    return kOk;
}
