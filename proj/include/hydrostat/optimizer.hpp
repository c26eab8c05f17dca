#pragma once

#include <span>
#include <vector>

#include "hydrostat/analysis.hpp"

namespace hydrostat {

/// Static-offset problem: dynamic force is (base - f_stat) where `loaded`, else 0.
/// Minimise its rms subject to max|f_dyn| <= peak_factor * rms.
struct OffsetProblem {
    std::vector<double> base;
    std::vector<bool> loaded;
    double peak_factor = 3.0;
    double lower = 0.0;
    double upper = 0.0;  // 0 selects max(base)
    double grid_resolution = 0.01;

    std::vector<double> series(double f_stat) const;
};

OffsetProblem make_offset_problem(const TaskScenario& scenario, DesignVariant variant);
OffsetProblem make_offset_problem(std::vector<double> base, std::vector<bool> loaded);

struct OffsetPoint {
    double f_stat = 0.0;
    double rms = 0.0;
    double peak = 0.0;
    bool feasible = false;
};

/// Objective and constraint at one offset, O(n).
OffsetPoint evaluate_offset(const OffsetProblem& problem, double f_stat);

struct OffsetResult {
    double f_stat = 0.0;
    double rms = 0.0;
    double peak = 0.0;
    bool constraint_active = false;
    bool feasible = true;
};

/// Grid scan followed by golden-section or boundary bisection. Throws on an all-zero profile.
OffsetResult optimal_offset(const OffsetProblem& problem);

std::vector<OffsetPoint> offset_sweep(const OffsetProblem& problem, std::span<const double> offsets);

/// Grid evaluation kernels; both return identical points.
std::vector<OffsetPoint> grid_scan(const OffsetProblem& problem, double resolution);
std::vector<OffsetPoint> grid_scan_serial(const OffsetProblem& problem, double resolution);

/// Offsets for 'B' and 'D' of one scenario.
std::map<char, double> optimal_offsets(const TaskScenario& scenario);

}  // namespace hydrostat
