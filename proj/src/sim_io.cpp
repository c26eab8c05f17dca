#include "hydrostat/sim_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "hydrostat/errors.hpp"

namespace hydrostat {

using nlohmann::ordered_json;

std::string result_csv(const SimResult& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) out += ',';
        out += r.columns[i];
    }
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt::format("{:.9g}", row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path.string());
    f << text;
    if (!f) throw InvalidInput("write failed for " + path.string());
}

void write_csv(const SimResult& r, const std::filesystem::path& path) { write_text(path, result_csv(r)); }

ordered_json result_summary(const SimResult& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["ticks"] = r.rows.size();
    j["metrics"] = r.metrics;
    j["worst_closure"] = r.worst_closure();
    ordered_json ev = ordered_json::array();
    for (const auto& e : r.events) ev.push_back({{"t_s", e.t}, {"kind", e.kind}, {"leg", e.leg}, {"value", e.value}});
    j["events"] = ev;
    if (!r.runs.empty()) {
        ordered_json runs = ordered_json::array();
        for (const auto& s : r.runs) runs.push_back({{"scenario", s.scenario}, {"metrics", s.metrics}});
        j["runs"] = runs;
    }
    return j;
}

ordered_json RunManifest::to_json() const {
    return {{"tool", "hydrostat"},     {"version", version}, {"command", command}, {"scenario", scenario},
            {"seed", seed},            {"overrides", overrides}, {"config", config}};
}

RunManifest make_manifest(const std::string& command, const std::string& scenario, const SimConfig& cfg,
                          const std::vector<std::string>& overrides) {
    RunManifest m;
    m.command = command;
    m.scenario = scenario;
    m.seed = cfg.sim.seed;
    m.config = config_to_json(cfg);
    m.overrides = overrides;
    return m;
}

}  // namespace hydrostat
