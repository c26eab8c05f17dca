#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hydrostat/config.hpp"
#include "hydrostat/scenarios.hpp"

namespace hydrostat {

/// Time series, one row per control tick, header from SimResult::columns.
std::string result_csv(const SimResult& r);
void write_csv(const SimResult& r, const std::filesystem::path& path);

/// Metrics, ledger and events; sub-runs are summarised by their metrics only.
nlohmann::ordered_json result_summary(const SimResult& r);

/// Everything needed to reproduce a run.
struct RunManifest {
    std::string command;
    std::string scenario;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config;
    std::vector<std::string> overrides;
    std::string version = "0.1.0";

    nlohmann::ordered_json to_json() const;
};

RunManifest make_manifest(const std::string& command, const std::string& scenario, const SimConfig& cfg,
                          const std::vector<std::string>& overrides);

/// Write text atomically enough for our purposes; creates parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hydrostat
