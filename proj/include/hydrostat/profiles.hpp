#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrostat/units.hpp"

namespace hydrostat {

enum class Task { Walk, Run, Jump, SitToStand, Constant, Custom };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);  // throws InvalidInput

/// Normalized vertical ground reaction force of one leg, N/kg, on a uniform grid.
struct GrfProfile {
    Task task = Task::Custom;
    double dt = 1e-3;
    std::vector<double> samples;
    double period = 0.0;  // 0 for aperiodic tasks
    std::string meta;

    bool periodic() const { return period > 0.0; }
    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) * dt; }
    double peak() const;
    double mean() const;
};

/// Shape knobs for the synthetic profiles. Zero means "use the task default".
struct SynthParams {
    double dt = 1e-3;
    double peak = 0.0;    // per-leg peak, N/kg (level for Constant)
    double period = 0.0;  // s
};

/// Per-task defaults used when SynthParams leaves a field at zero.
struct TaskDefaults {
    double peak;
    double period;
    double phase_offset;
    std::string meta;
};
TaskDefaults task_defaults(Task task);

GrfProfile synth_profile(Task task, const SynthParams& params = {});

struct ColumnSpec {
    std::size_t time_column = 0;
    std::size_t force_column = 1;
    double dt = 1e-3;
    bool periodic = false;
    Task task = Task::Custom;
};

struct LoadedProfile {
    GrfProfile profile;
    std::size_t clamped = 0;  // negative samples set to zero
};

LoadedProfile load_profile_csv(const std::filesystem::path& path, const ColumnSpec& spec = {});
void save_profile_csv(const GrfProfile& profile, const std::filesystem::path& path);
std::string profile_csv(const GrfProfile& profile);

/// Circular shift by `shift` samples (periodic) or zero-padded delay (aperiodic).
std::vector<double> shifted(std::span<const double> series, long shift, bool periodic);

inline constexpr double kDefaultContactThreshold = 0.1;  // N/kg

/// Right and left leg profiles with their phase relationship.
struct TaskScenario {
    GrfProfile right;
    GrfProfile left;
    double phase_offset = 0.0;  // fraction of period
    double contact_threshold = kDefaultContactThreshold;
    double g = kGravity;

    double dt() const { return right.dt; }
    std::size_t size() const { return right.samples.size(); }
    bool in_contact(int leg, std::size_t index) const;
    int legs_in_contact(std::size_t index) const;
    std::vector<int> contact_counts() const;
    std::vector<double> total() const;
};

/// Left = right shifted by phase_offset * period. Negative phase selects the task default.
TaskScenario make_scenario(const GrfProfile& profile, double phase_offset = -1.0,
                           double contact_threshold = kDefaultContactThreshold);

/// Number of legs loaded above the contact threshold at time t (wrapped for periodic tasks).
int contact_count(const TaskScenario& scenario, double t);

/// Contiguous windows where `mask` is true, counted cyclically for periodic series.
std::size_t count_windows(const std::vector<bool>& mask, bool periodic);

}  // namespace hydrostat
