#include "hydrostat/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "hydrostat/errors.hpp"
#include "hydrostat/parallel.hpp"

namespace hydrostat {

namespace {

constexpr double kFeasTol = 1e-12;
constexpr double kInvPhi = 0.6180339887498949;

double resolved_upper(const OffsetProblem& p) {
    if (p.upper > 0.0) return p.upper;
    double m = 0.0;
    for (std::size_t i = 0; i < p.base.size(); ++i) {
        if (p.loaded[i]) m = std::max(m, p.base[i]);
    }
    return m;
}

void validate(const OffsetProblem& p) {
    if (p.base.empty() || p.base.size() != p.loaded.size()) throw InvalidInput("offset problem has no samples");
    if (!(p.peak_factor > 0.0)) throw InvalidInput("peak factor must be positive");
    if (!(p.grid_resolution > 0.0)) throw InvalidInput("grid resolution must be positive");
    bool any = false;
    for (std::size_t i = 0; i < p.base.size(); ++i) any = any || (p.loaded[i] && p.base[i] != 0.0);
    if (!any) throw InvalidInput("degenerate all-zero profile");
    if (p.lower < 0.0 || resolved_upper(p) < p.lower) throw InvalidInput("offset bounds are not ordered");
}

std::vector<double> grid_points(double lo, double hi, double res) {
    const auto k = static_cast<std::size_t>(std::ceil((hi - lo) / res - 1e-9));
    std::vector<double> s(k + 1);
    for (std::size_t i = 0; i < k; ++i) s[i] = lo + static_cast<double>(i) * res;
    s[k] = hi;
    return s;
}

bool better(const OffsetPoint& a, const OffsetPoint& b) {
    return a.rms < b.rms || (a.rms == b.rms && a.f_stat < b.f_stat);
}

OffsetPoint golden(const OffsetProblem& p, double a, double b) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = evaluate_offset(p, c).rms;
    double fd = evaluate_offset(p, d).rms;
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = evaluate_offset(p, c).rms;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = evaluate_offset(p, d).rms;
        }
    }
    return evaluate_offset(p, 0.5 * (a + b));
}

// Feasible end of the bracket [feasible_s, infeasible_s] after bisection.
OffsetPoint boundary(const OffsetProblem& p, double feasible_s, double infeasible_s) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (feasible_s + infeasible_s);
        if (mid == feasible_s || mid == infeasible_s) break;
        if (evaluate_offset(p, mid).feasible) feasible_s = mid;
        else infeasible_s = mid;
    }
    return evaluate_offset(p, feasible_s);
}

}  // namespace

std::vector<double> OffsetProblem::series(double f_stat) const {
    return offset_branch(base, loaded, f_stat);
}

OffsetProblem make_offset_problem(std::vector<double> base, std::vector<bool> loaded) {
    OffsetProblem p;
    p.base = std::move(base);
    p.loaded = std::move(loaded);
    return p;
}

OffsetProblem make_offset_problem(const TaskScenario& scenario, DesignVariant variant) {
    if (variant.sharing) return make_offset_problem(shared_series(scenario), loaded_mask(scenario, true));
    return make_offset_problem(scenario.right.samples, loaded_mask(scenario, false, 0));
}

OffsetPoint evaluate_offset(const OffsetProblem& p, double f_stat) {
    double acc = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < p.base.size(); ++i) {
        if (!p.loaded[i]) continue;
        const double v = p.base[i] - f_stat;
        acc += v * v;
        peak = std::max(peak, std::abs(v));
    }
    OffsetPoint pt;
    pt.f_stat = f_stat;
    pt.rms = std::sqrt(acc / static_cast<double>(p.base.size()));
    pt.peak = peak;
    pt.feasible = peak <= p.peak_factor * pt.rms + kFeasTol;
    return pt;
}

std::vector<OffsetPoint> grid_scan_serial(const OffsetProblem& problem, double resolution) {
    validate(problem);
    const auto s = grid_points(problem.lower, resolved_upper(problem), resolution);
    std::vector<OffsetPoint> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = evaluate_offset(problem, s[i]);
    return out;
}

std::vector<OffsetPoint> grid_scan(const OffsetProblem& problem, double resolution) {
    validate(problem);
    const auto s = grid_points(problem.lower, resolved_upper(problem), resolution);
    std::vector<OffsetPoint> out(s.size());
    const long n = static_cast<long>(s.size());
    HYDROSTAT_PRAGMA("omp parallel for schedule(static)")
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = evaluate_offset(problem, s[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<OffsetPoint> offset_sweep(const OffsetProblem& problem, std::span<const double> offsets) {
    std::vector<OffsetPoint> out;
    out.reserve(offsets.size());
    for (double s : offsets) out.push_back(evaluate_offset(problem, s));
    return out;
}

OffsetResult optimal_offset(const OffsetProblem& problem) {
    const auto pts = grid_scan(problem, problem.grid_resolution);
    const std::size_t n = pts.size();
    const double lo = pts.front().f_stat, hi = pts.back().f_stat;

    // Unconstrained minimiser of the convex objective.
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < problem.base.size(); ++i) {
        if (problem.loaded[i]) {
            sum += problem.base[i];
            ++cnt;
        }
    }
    const double s_unc = std::clamp(sum / static_cast<double>(cnt), lo, hi);

    OffsetResult res;
    const bool any_feasible = std::any_of(pts.begin(), pts.end(), [](const OffsetPoint& p) { return p.feasible; });
    if (!any_feasible) {
        OffsetPoint best = pts.front();
        for (const auto& p : pts) if (better(p, best)) best = p;
        const OffsetPoint g = golden(problem, best.f_stat > lo ? best.f_stat - problem.grid_resolution : lo,
                                     std::min(hi, best.f_stat + problem.grid_resolution));
        if (better(g, best)) best = g;
        res = {best.f_stat, best.rms, best.peak, true, best.feasible};
        return res;
    }

    OffsetPoint best;
    bool have = false;
    auto consider = [&](const OffsetPoint& p) {
        if (!p.feasible) return;
        if (!have || better(p, best)) {
            best = p;
            have = true;
        }
    };
    for (std::size_t k = 0; k < n; ++k) {
        if (!pts[k].feasible) continue;
        const bool left_inf = k > 0 && !pts[k - 1].feasible;
        const bool right_inf = k + 1 < n && !pts[k + 1].feasible;
        const bool local_min = (k == 0 || pts[k].rms <= pts[k - 1].rms) && (k + 1 == n || pts[k].rms <= pts[k + 1].rms);
        consider(pts[k]);
        if (local_min) {
            const OffsetPoint g = golden(problem, k > 0 ? pts[k - 1].f_stat : lo, k + 1 < n ? pts[k + 1].f_stat : hi);
            if (g.feasible) consider(g);
            else consider(boundary(problem, pts[k].f_stat, g.f_stat));
        }
        if (left_inf) consider(boundary(problem, pts[k].f_stat, pts[k - 1].f_stat));
        if (right_inf) consider(boundary(problem, pts[k].f_stat, pts[k + 1].f_stat));
    }
    res.f_stat = best.f_stat;
    res.rms = best.rms;
    res.peak = best.peak;
    res.feasible = true;
    res.constraint_active = !evaluate_offset(problem, s_unc).feasible;
    return res;
}

std::map<char, double> optimal_offsets(const TaskScenario& scenario) {
    return {{'B', optimal_offset(make_offset_problem(scenario, DesignVariant::B())).f_stat},
            {'D', optimal_offset(make_offset_problem(scenario, DesignVariant::D())).f_stat}};
}

}  // namespace hydrostat
