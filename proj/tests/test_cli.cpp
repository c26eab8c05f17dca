#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "hydrostat_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(HYDROSTAT_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string out_dir(const std::string& name) {
    const auto p = kRoot / name;
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) m[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return m;
}

std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> v;
    std::istringstream s(slurp(p));
    for (std::string l; std::getline(s, l);) v.push_back(l);
    return v;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("profiles writes both legs, contacts and a manifest") {
    const auto d = out_dir("prof");
    REQUIRE(run("profiles walk --out " + d) == 0);
    for (const char* f : {"walk_right.csv", "walk_left.csv", "walk_contacts.csv", "manifest.json"}) {
        CAPTURE(f);
        CHECK(fs::exists(fs::path(d) / f));
    }
    const auto m = read_json(fs::path(d) / "manifest.json");
    CHECK(m["command"] == "profiles");
    CHECK(m.contains("config"));
    CHECK(m.contains("overrides"));

    REQUIRE(run("profiles run --out " + d) == 0);
    bool aerial = false;
    const auto rows = lines(fs::path(d) / "run_contacts.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) aerial = aerial || rows[i].back() == '0';
    CHECK(aerial);

    REQUIRE(run("profiles constant --out " + d) == 0);
    const auto flat = lines(fs::path(d) / "constant_right.csv");
    REQUIRE(flat.size() > 2);
    const auto value = [](const std::string& l) { return l.substr(l.find(',') + 1); };
    for (std::size_t i = 2; i < flat.size(); ++i) CHECK(value(flat[i]) == value(flat[1]));
}

TEST_CASE("analyze emits the design table with fixed columns") {
    const auto d = out_dir("analyze");
    REQUIRE(run("analyze --out " + d) == 0);
    const auto rows = lines(fs::path(d) / "design_table.csv");
    REQUIRE(!rows.empty());
    CHECK(rows[0].rfind("task,variant,f_dyn_rms,f_dyn_peak,mean_abs_P,v_max,f_stat", 0) == 0);
    REQUIRE(run("analyze --format json --out " + d) == 0);
    CHECK(fs::exists(fs::path(d) / "design_table.json"));
}

TEST_CASE("optimize reports offsets") {
    const auto d = out_dir("opt");
    REQUIRE(run("optimize walk D --format json --out " + d) == 0);
    const auto j = read_json(fs::path(d) / "offset.json");
    CHECK(j["f_stat"].get<double>() == doctest::Approx(8.2).epsilon(0.05));
    REQUIRE(run("optimize constant B --format json --out " + d) == 0);
    CHECK(read_json(fs::path(d) / "offset.json")["f_stat"].get<double>() == doctest::Approx(9.8).epsilon(1e-9));
}

TEST_CASE("exit codes") {
    const auto d = out_dir("codes");
    CHECK(run("simulate switch_sweep_variable --out " + d) == 0);
    CHECK(run("simulate no_such_scenario --out " + d) == 2);
    CHECK(run("simulate walk_track --override line.bogus=1 --out " + d) == 2);
    CHECK(run("simulate walk_track --format xml --out " + d) == 2);
    CHECK(run("simulate walk_track --config /nonexistent.json --out " + d) == 2);
    CHECK(run("optimize walk A --out " + d) == 2);
    CHECK(run("bogus") == 2);
    CHECK(run("simulate pump_step:1 --override accumulator.P_max_MPa=1.5 --out " + d) == 3);

    // Two isolated loads in a long unloaded cycle: peak exceeds 3 rms at every offset.
    const auto csv = kRoot / "sparse.csv";
    {
        std::ofstream f(csv);
        f << "t,f\n";
        for (int i = 0; i < 100; ++i) f << i * 0.001 << "," << (i == 10 ? 40.0 : i == 60 ? 20.0 : 0.0) << "\n";
    }
    CHECK(run("optimize custom B --profile " + csv.string() + " --out " + d) == 4);
    CHECK(run("optimize walk B --profile " + csv.string() + " --out " + d) == 2);
}

TEST_CASE("reruns are byte-identical") {
    const auto a = out_dir("rerun_a");
    REQUIRE(run("simulate walk_track:3 --seed 11 --override sim.pressure_noise_kPa=2 --out " + a) == 0);
    const auto first = snapshot(a);
    REQUIRE(run("simulate walk_track:3 --seed 11 --override sim.pressure_noise_kPa=2 --out " + a) == 0);
    CHECK(snapshot(a) == first);
    CHECK(first.count("manifest.json") == 1);
    const auto m = read_json(fs::path(a) / "manifest.json");
    CHECK(m["seed"] == 11);
    CHECK(m["overrides"][0] == "sim.pressure_noise_kPa=2");
}

TEST_CASE("sweep-valves tables") {
    const auto d = out_dir("sweep");
    REQUIRE(run("sweep-valves fixed --out " + d) == 0);
    const auto rows = lines(fs::path(d) / "valve_sweep.csv");
    REQUIRE(rows.size() == 10);
    REQUIRE(run("sweep-valves check-valve --format json --out " + d) == 0);
    CHECK(read_json(fs::path(d) / "valve_sweep.json")["check_valve"]["overshoot_removed"] == true);
    CHECK(run("sweep-valves sideways --out " + d) == 2);
}

TEST_CASE("compare-energy writes one row per design") {
    const auto d = out_dir("energy");
    REQUIRE(run("compare-energy --strides 4 --out " + d) == 0);
    const auto rows = lines(fs::path(d) / "energy_comparison.csv");
    REQUIRE(rows.size() == 5);
    for (int i = 0; i < 4; ++i) CHECK(rows[i + 1][0] == "ABCD"[i]);
}
