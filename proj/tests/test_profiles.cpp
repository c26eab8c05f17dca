#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "hydrostat/errors.hpp"
#include "hydrostat/profiles.hpp"

using namespace hydrostat;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "hydrostat_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

double mean_total(const TaskScenario& sc) {
    const auto t = sc.total();
    return std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
}

std::vector<bool> mask_where(const std::vector<int>& counts, int value) {
    std::vector<bool> m(counts.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = counts[i] == value;
    return m;
}

}  // namespace

TEST_CASE("constant profile is flat at the requested level") {
    const auto p = synth_profile(Task::Constant, {.dt = 1e-3, .peak = kGravity, .period = 0.0});
    REQUIRE(p.size() == 1000);
    for (double v : p.samples) CHECK(v == kGravity);
}

TEST_CASE("walk calibration: peak and mean load") {
    const auto p = synth_profile(Task::Walk);
    CHECK(std::abs(p.peak() - 13.4) <= 0.1);
    const auto sc = make_scenario(p);
    CHECK(sc.phase_offset == 0.5);
    CHECK(std::abs(mean_total(sc) - 9.8) <= 0.2);
}

TEST_CASE("synthesis errors") {
    CHECK_THROWS_AS(synth_profile(Task::Walk, {.dt = 0.0}), InvalidInput);
    CHECK_THROWS_AS(synth_profile(Task::Walk, {.dt = -1e-3}), InvalidInput);
    CHECK_THROWS_AS(synth_profile(Task::Custom), InvalidInput);
    CHECK_THROWS_AS(task_from_string("crawl"), InvalidInput);
    CHECK(task_from_string("sit_to_stand") == Task::SitToStand);
}

TEST_CASE("periodic profiles satisfy the type invariants") {
    for (Task t : {Task::Walk, Task::Run, Task::SitToStand, Task::Constant}) {
        const auto p = synth_profile(t);
        CAPTURE(to_string(t));
        CHECK(std::abs(static_cast<double>(p.size()) * p.dt - p.period) <= p.dt);
        CHECK(std::abs(p.samples.front() - p.samples.back()) < 1e-9);
        for (double v : p.samples) REQUIRE(v >= 0.0);
        const auto same = shifted(p.samples, static_cast<long>(p.size()), true);
        double diff = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) diff = std::max(diff, std::abs(same[i] - p.samples[i]));
        CHECK(diff < 1e-12);
    }
}

TEST_CASE("mean-load property for periodic tasks") {
    for (Task t : {Task::Walk, Task::Run, Task::SitToStand}) {
        const auto sc = make_scenario(synth_profile(t));
        CAPTURE(to_string(t));
        const double m = mean_total(sc);
        CHECK(m >= 0.95 * kGravity);
        CHECK(m <= 1.05 * kGravity);
    }
}

TEST_CASE("walk duty structure: single/double support and two double-support windows") {
    const auto sc = make_scenario(synth_profile(Task::Walk));
    const auto counts = sc.contact_counts();
    for (int c : counts) REQUIRE((c == 1 || c == 2));
    const auto dbl = mask_where(counts, 2);
    CHECK(count_windows(dbl, true) == 2);
    const double frac = static_cast<double>(std::count(dbl.begin(), dbl.end(), true)) / static_cast<double>(dbl.size());
    CHECK(frac == doctest::Approx(0.15).epsilon(0.2));
    // Mid-swing of the left leg: right leg alone.
    CHECK(contact_count(sc, 0.30) == 1);
}

TEST_CASE("run has aerial phases and no double support") {
    const auto sc = make_scenario(synth_profile(Task::Run));
    const auto counts = sc.contact_counts();
    for (int c : counts) REQUIRE((c == 0 || c == 1));
    CHECK(count_windows(mask_where(counts, 0), true) == 2);
}

TEST_CASE("jump aerial segment has no contact") {
    const auto p = synth_profile(Task::Jump);
    CHECK_FALSE(p.periodic());
    CHECK(std::abs(p.peak() - 9.9) < 0.05);
    const auto sc = make_scenario(p);
    CHECK(contact_count(sc, 0.2 + 0.25 + 0.2) == 0);
    CHECK(contact_count(sc, 0.1) == 2);
    CHECK_THROWS_AS(make_scenario(p, 0.5), InvalidInput);
}

TEST_CASE("constant scenario is loaded on both legs everywhere") {
    const auto sc = make_scenario(synth_profile(Task::Constant), 0.5);
    CHECK(sc.left.samples == sc.right.samples);
    for (int c : sc.contact_counts()) REQUIRE(c == 2);
    CHECK_THROWS_AS(make_scenario(synth_profile(Task::Constant), 1.0), InvalidInput);
}

TEST_CASE("contact mask is exactly sample > threshold") {
    GrfProfile p;
    p.samples = {0.0, 0.1, 0.1000001, 5.0};
    p.period = 0.004;
    const auto sc = make_scenario(p, 0.0);
    CHECK_FALSE(sc.in_contact(0, 0));
    CHECK_FALSE(sc.in_contact(0, 1));
    CHECK(sc.in_contact(0, 2));
    CHECK(sc.in_contact(0, 3));
}

TEST_CASE("csv load: constant series and negative clamping") {
    const auto f = temp_file("const.csv");
    std::string s = "t_s,f_n_per_kg\n";
    for (int i = 0; i < 10; ++i) s += std::to_string(i * 0.001) + ",9.8\n";
    write_text(f, s);
    const auto lp = load_profile_csv(f);
    CHECK(lp.clamped == 0);
    REQUIRE(lp.profile.size() == 10);
    for (double v : lp.profile.samples) CHECK(v == 9.8);

    const auto g = temp_file("neg.csv");
    write_text(g, "t_s,f_n_per_kg\n0,1.0\n0.001,-0.2\n0.002,3.0\n");
    const auto ln = load_profile_csv(g);
    CHECK(ln.clamped == 1);
    CHECK(ln.profile.samples == std::vector<double>{1.0, 0.0, 3.0});
}

TEST_CASE("csv load resamples non-uniform input") {
    const auto f = temp_file("ramp.csv");
    write_text(f, "t_s,f_n_per_kg\n0,0\n0.0035,3.5\n0.01,10\n");
    const auto lp = load_profile_csv(f);
    REQUIRE(lp.profile.size() == 11);
    for (std::size_t i = 0; i < lp.profile.size(); ++i) CHECK(lp.profile.samples[i] == doctest::Approx(double(i)));
}

TEST_CASE("csv load errors") {
    const auto a = temp_file("bad_order.csv");
    write_text(a, "t_s,f_n_per_kg\n0,1\n0.002,1\n0.001,1\n");
    CHECK_THROWS_AS(load_profile_csv(a), InvalidInput);
    const auto b = temp_file("empty.csv");
    write_text(b, "t_s,f_n_per_kg\n");
    CHECK_THROWS_AS(load_profile_csv(b), InvalidInput);
    const auto c = temp_file("garbage.csv");
    write_text(c, "t_s,f_n_per_kg\n0,1\nfoo,bar\n");
    CHECK_THROWS_AS(load_profile_csv(c), InvalidInput);
    CHECK_THROWS_AS(load_profile_csv(temp_file("missing.csv")), InvalidInput);
}

TEST_CASE("csv round trip is byte identical") {
    const auto p = synth_profile(Task::Walk);
    const auto f1 = temp_file("walk1.csv");
    save_profile_csv(p, f1);
    const auto lp = load_profile_csv(f1, {.periodic = true, .task = Task::Walk});
    CHECK(lp.profile.samples == p.samples);
    CHECK(profile_csv(lp.profile) == profile_csv(p));
}
