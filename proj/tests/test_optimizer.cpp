#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrostat/errors.hpp"
#include "hydrostat/optimizer.hpp"

using namespace hydrostat;

namespace {

// Exhaustive scan, independent of the library evaluation path.
struct Oracle {
    double f_stat = 0.0;
    double rms = 0.0;
    bool found = false;
};

Oracle brute_force(const std::vector<double>& base, const std::vector<bool>& loaded, double hi, double step) {
    Oracle best;
    const int n = static_cast<int>(std::floor(hi / step + 1e-9));
    for (int k = 0; k <= n + 1; ++k) {
        const double s = k <= n ? k * step : hi;
        double acc = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double v = loaded[i] ? base[i] - s : 0.0;
            acc += v * v;
            peak = std::max(peak, std::abs(v));
        }
        const double r = std::sqrt(acc / base.size());
        if (peak > 3.0 * r + 1e-12) continue;
        if (!best.found || r < best.rms) best = {s, r, true};
    }
    return best;
}

std::vector<double> random_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 200 + rng() % 400;
    const double duty = 0.3 + 0.6 * u(rng);
    const int bumps = 1 + static_cast<int>(rng() % 3);
    const double amp = 2.0 + 25.0 * u(rng);
    std::vector<double> f(n, 0.0);
    for (int b = 0; b < bumps; ++b) {
        const double a = amp * (0.3 + 0.7 * u(rng));
        const double c = duty * u(rng);
        const double w = 0.05 + 0.3 * u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / n;
            if (x < duty && std::abs(x - c) < w) f[i] += a * 0.5 * (1 + std::cos(kPi * (x - c) / w));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<double>(i) / n < duty) f[i] += 0.5 + 3.0 * u(rng);
    }
    return f;
}

std::vector<bool> contact(const std::vector<double>& f) {
    std::vector<bool> m(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) m[i] = f[i] > kDefaultContactThreshold;
    return m;
}

}  // namespace

TEST_CASE("constant load is cancelled exactly") {
    const auto r = optimal_offset(make_offset_problem(std::vector<double>(500, kGravity), std::vector<bool>(500, true)));
    CHECK(r.f_stat == doctest::Approx(kGravity).epsilon(1e-12));
    CHECK(r.rms == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(r.feasible);
}

TEST_CASE("degenerate and malformed problems") {
    CHECK_THROWS_AS(optimal_offset(make_offset_problem(std::vector<double>(10, 0.0), std::vector<bool>(10, true))),
                    InvalidInput);
    auto p = make_offset_problem(std::vector<double>(10, 1.0), std::vector<bool>(10, true));
    p.peak_factor = 0.0;
    CHECK_THROWS_AS(optimal_offset(p), InvalidInput);
}

TEST_CASE("walk offsets") {
    const auto sc = make_scenario(synth_profile(Task::Walk));
    const auto d = optimal_offset(make_offset_problem(sc, DesignVariant::D()));
    CHECK(d.f_stat == doctest::Approx(8.2).epsilon(0.05));
    CHECK_FALSE(d.constraint_active);
    const auto b = optimal_offset(make_offset_problem(sc, DesignVariant::B()));
    CHECK(b.constraint_active);
    CHECK(b.peak <= 3.0 * b.rms + 1e-9);
}

TEST_CASE("randomized oracle equivalence") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_profile(rng);
        const auto m = contact(f);
        const auto res = optimal_offset(make_offset_problem(f, m));
        const double hi = *std::max_element(f.begin(), f.end());
        const auto o = brute_force(f, m, hi, 0.001);
        CAPTURE(trial);
        REQUIRE(o.found);
        CHECK(res.feasible);
        CHECK(res.peak <= 3.0 * res.rms + 1e-9);
        CHECK(res.rms <= o.rms + 1e-12);
        CHECK(std::abs(res.f_stat - o.f_stat) <= 0.001 + 1e-9);
    }
}

TEST_CASE("parallel and serial grid scans agree") {
    const auto sc = make_scenario(synth_profile(Task::Run));
    const auto p = make_offset_problem(sc, DesignVariant::B());
    const auto a = grid_scan(p, 0.01);
    const auto b = grid_scan_serial(p, 0.01);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].rms == b[i].rms);
        REQUIRE(a[i].peak == b[i].peak);
        REQUIRE(a[i].feasible == b[i].feasible);
    }
}

TEST_CASE("sweep brackets the optimum and matches the optimizer") {
    const auto sc = make_scenario(synth_profile(Task::Walk));
    const auto p = make_offset_problem(sc, DesignVariant::D());
    const auto r = optimal_offset(p);
    const std::vector<double> around{r.f_stat - 0.01, r.f_stat, r.f_stat + 0.01};
    const auto s = offset_sweep(p, around);
    CHECK(s[0].rms >= r.rms);
    CHECK(s[2].rms >= r.rms);

    // Argmin of a dense sweep lies within one step of the optimizer.
    std::vector<double> grid;
    for (double x = 0.0; x <= 13.4; x += 0.01) grid.push_back(x);
    const auto sw = offset_sweep(p, grid);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < sw.size(); ++i) if (sw[i].feasible && sw[i].rms < sw[arg].rms) arg = i;
    CHECK(std::abs(sw[arg].f_stat - r.f_stat) <= 0.01);
}

TEST_CASE("gravity is a near-optimal but not optimal per-leg offset for walking") {
    const auto p = make_offset_problem(make_scenario(synth_profile(Task::Walk)), DesignVariant::B());
    const auto r = optimal_offset(p);
    const double at_g = evaluate_offset(p, kGravity).rms;
    CHECK(at_g > r.rms);
    CHECK(at_g <= 1.1 * r.rms);
}

TEST_CASE("constant-load sweep is V shaped") {
    const auto p = make_offset_problem(std::vector<double>(100, 6.0), std::vector<bool>(100, true));
    const std::vector<double> s{2.0, 4.0, 6.0, 8.0, 10.0};
    const auto sw = offset_sweep(p, s);
    CHECK(sw[0].rms == doctest::Approx(4.0));
    CHECK(sw[1].rms == doctest::Approx(2.0));
    CHECK(sw[2].rms == 0.0);
    CHECK(sw[3].rms == doctest::Approx(2.0));
    CHECK(sw[4].rms == doctest::Approx(4.0));
}

TEST_CASE("objective is continuous") {
    const auto p = make_offset_problem(make_scenario(synth_profile(Task::Walk)), DesignVariant::B());
    for (double s = 0.0; s < 13.0; s += 0.37) {
        CHECK(std::abs(evaluate_offset(p, s + 1e-6).rms - evaluate_offset(p, s).rms) < 1e-4);
    }
}

TEST_CASE("amplitude equivariance") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_profile(rng);
        const auto m = contact(f);
        const auto r1 = optimal_offset(make_offset_problem(f, m));
        for (auto& v : f) v *= 2.5;
        const auto r2 = optimal_offset(make_offset_problem(f, m));
        CHECK(r2.f_stat == doctest::Approx(2.5 * r1.f_stat).epsilon(1e-6));
        CHECK(r2.rms == doctest::Approx(2.5 * r1.rms).epsilon(1e-8));
    }
}

TEST_CASE("infeasible problems are flagged, not relaxed") {
    // One tall spike: peak/rms is far above 3 for every admissible offset.
    std::vector<double> f(1000, 0.0);
    f[0] = 100.0;
    auto p = make_offset_problem(f, contact(f));
    p.upper = 50.0;
    const auto r = optimal_offset(p);
    CHECK_FALSE(r.feasible);
    CHECK(r.peak > 3.0 * r.rms);
}
