#include "hydrostat/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hydrostat/errors.hpp"

namespace hydrostat {

namespace {

// Raised-cosine half-bumps: rising over `rise` to the crest at `center`,
// then falling over `fall`. Zero outside [center - rise, center + fall].
double asym_bump(double t, double center, double rise, double fall) {
    if (t < center - rise || t >= center + fall) return 0.0;
    const double w = t < center ? rise : fall;
    return 0.5 * (1.0 + std::cos(kPi * (t - center) / w));
}

double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

double hann(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 0.5 * (1.0 - std::cos(2.0 * kPi * x));
}

std::size_t sample_count(double duration, double dt) {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void rescale_peak(std::vector<double>& s, double peak) {
    const double m = *std::max_element(s.begin(), s.end());
    if (m <= 0.0) return;
    for (double& v : s) v *= peak / m;
}

// Walk stance as fractions of the stride: a heel-strike bump with a fast rise,
// a push-off bump with a fast fall, crests 0.49 apart. Stance spans 0.58.
struct WalkShape {
    double rise1 = 0.05, fall1 = 0.33;
    double separation = 0.49;
    double rise2 = 0.40, fall2 = 0.04;
    double second_ratio = 0.78;
};

constexpr double kRunDuty = 0.37;

std::vector<double> synth_walk(std::size_t n, double dt, double period, double peak) {
    const WalkShape w;
    std::vector<double> s(n);
    const double c1 = w.rise1 * period;
    const double c2 = c1 + w.separation * period;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        s[i] = asym_bump(t, c1, w.rise1 * period, w.fall1 * period) +
               w.second_ratio * asym_bump(t, c2, w.rise2 * period, w.fall2 * period);
    }
    rescale_peak(s, peak);
    return s;
}

std::vector<double> synth_run(std::size_t n, double dt, double period, double peak) {
    std::vector<double> s(n);
    const double stance = kRunDuty * period;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        s[i] = t < stance ? peak * hann(t / stance) : 0.0;
    }
    return s;
}

// Stand, quadratic launch ramp, aerial zero, landing bump, stand.
std::vector<double> synth_jump(double dt, double peak, double g) {
    constexpr double stand = 0.2, launch = 0.25, aerial = 0.45, land = 0.3, settle = 0.3;
    const double half = 0.5 * g;
    const std::size_t n = sample_count(stand + launch + aerial + land + settle, dt);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double v;
        if (t < stand) {
            v = half;
        } else if (t < stand + launch) {
            const double x = (t - stand) / launch;
            v = half + (peak - half) * x * x;
        } else if (t < stand + launch + aerial) {
            v = 0.0;
        } else if (t < stand + launch + aerial + land) {
            const double x = (t - stand - launch - aerial) / land;
            v = half * smoothstep(2.0 * x) + (peak - half) * hann(x);
        } else {
            v = half;
        }
        s[i] = v;
    }
    return s;
}

// Seated base, smooth rise to the peak, plateau, smooth fall. Base is set so the
// per-leg cycle mean is g/2.
std::vector<double> synth_sit_to_stand(std::size_t n, double dt, double period, double peak,
                                       double g) {
    const double base = std::max(0.0, g - peak);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * dt / period;
        double w;
        if (x < 0.3) w = smoothstep(x / 0.3);
        else if (x < 0.5) w = 1.0;
        else if (x < 0.8) w = 1.0 - smoothstep((x - 0.5) / 0.3);
        else w = 0.0;
        s[i] = base + (peak - base) * w;
    }
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& text, double& value) {
    const char* begin = text.c_str();
    while (*begin == ' ' || *begin == '\t') ++begin;
    char* end = nullptr;
    value = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0' && std::isfinite(value);
}

}  // namespace

std::string_view to_string(Task task) {
    switch (task) {
        case Task::Walk: return "walk";
        case Task::Run: return "run";
        case Task::Jump: return "jump";
        case Task::SitToStand: return "sit_to_stand";
        case Task::Constant: return "constant";
        case Task::Custom: return "custom";
    }
    return "custom";
}

Task task_from_string(std::string_view name) {
    for (Task t : {Task::Walk, Task::Run, Task::Jump, Task::SitToStand, Task::Constant, Task::Custom}) {
        if (to_string(t) == name) return t;
    }
    if (name == "sit-to-stand" || name == "sittostand") return Task::SitToStand;
    throw InvalidInput("unknown task '" + std::string(name) + "'");
}

double GrfProfile::peak() const {
    return samples.empty() ? 0.0 : *std::max_element(samples.begin(), samples.end());
}

double GrfProfile::mean() const {
    if (samples.empty()) return 0.0;
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

TaskDefaults task_defaults(Task task) {
    switch (task) {
        case Task::Walk: return {13.4, 1.0, 0.5, "walk 1.8 m/s"};
        case Task::Run: return {26.6, 0.7, 0.5, "run 4.5 m/s"};
        case Task::Jump: return {9.9, 0.0, 0.0, "countermovement jump"};
        case Task::SitToStand: return {6.0, 3.0, 0.0, "sit-to-stand"};
        case Task::Constant: return {kGravity, 1.0, 0.0, "constant"};
        case Task::Custom: break;
    }
    throw InvalidInput("no synthesis defaults for task 'custom'");
}

GrfProfile synth_profile(Task task, const SynthParams& params) {
    if (!(params.dt > 0.0)) throw InvalidInput("dt must be positive");
    if (params.peak < 0.0 || params.period < 0.0) throw InvalidInput("amplitude parameters must be positive");
    const TaskDefaults d = task_defaults(task);
    const double peak = params.peak > 0.0 ? params.peak : d.peak;
    const double period = params.period > 0.0 ? params.period : d.period;

    GrfProfile p;
    p.task = task;
    p.dt = params.dt;
    p.meta = d.meta;
    if (task == Task::Jump) {
        p.samples = synth_jump(params.dt, peak, kGravity);
        p.period = 0.0;
        return p;
    }
    const std::size_t n = sample_count(period, params.dt);
    if (n < 4) throw InvalidInput("period too short for dt");
    p.period = static_cast<double>(n) * params.dt;
    switch (task) {
        case Task::Walk: p.samples = synth_walk(n, params.dt, p.period, peak); break;
        case Task::Run: p.samples = synth_run(n, params.dt, p.period, peak); break;
        case Task::SitToStand: p.samples = synth_sit_to_stand(n, params.dt, p.period, peak, kGravity); break;
        case Task::Constant: p.samples.assign(n, peak); break;
        default: throw InvalidInput("unsupported task for synthesis");
    }
    return p;
}

LoadedProfile load_profile_csv(const std::filesystem::path& path, const ColumnSpec& spec) {
    if (!(spec.dt > 0.0)) throw InvalidInput("dt must be positive");
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());

    std::vector<double> t, f;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const std::size_t need = std::max(spec.time_column, spec.force_column);
        double tv = 0.0, fv = 0.0;
        const bool ok = cells.size() > need && parse_double(cells[spec.time_column], tv) &&
                        parse_double(cells[spec.force_column], fv);
        if (!ok) {
            if (t.empty() && line_no == 1) continue;  // header row
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        if (!t.empty() && !(tv > t.back())) {
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": time is not increasing");
        }
        t.push_back(tv);
        f.push_back(fv);
    }
    if (t.empty()) throw InvalidInput(path.string() + ": empty series");

    LoadedProfile out;
    out.profile.task = spec.task;
    out.profile.dt = spec.dt;
    out.profile.meta = path.filename().string();

    // Source already on the target grid: copy, so save/load round-trips exactly.
    bool on_grid = true;
    for (std::size_t i = 0; i < t.size() && on_grid; ++i) {
        on_grid = std::abs(t[i] - t[0] - static_cast<double>(i) * spec.dt) < 1e-9 * spec.dt;
    }
    std::vector<double>& s = out.profile.samples;
    if (on_grid) {
        s = f;
    } else {
        const std::size_t n = static_cast<std::size_t>(std::floor((t.back() - t.front()) / spec.dt + 1e-9)) + 1;
        s.resize(n);
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ti = t.front() + static_cast<double>(i) * spec.dt;
            while (j + 1 < t.size() && t[j + 1] < ti) ++j;
            if (j + 1 >= t.size()) {
                s[i] = f.back();
            } else {
                const double w = (ti - t[j]) / (t[j + 1] - t[j]);
                s[i] = f[j] + std::clamp(w, 0.0, 1.0) * (f[j + 1] - f[j]);
            }
        }
    }
    for (double& v : s) {
        if (v < 0.0) {
            v = 0.0;
            ++out.clamped;
        }
    }
    out.profile.period = spec.periodic ? static_cast<double>(s.size()) * spec.dt : 0.0;
    return out;
}

std::string profile_csv(const GrfProfile& profile) {
    std::string out = "t_s,f_n_per_kg\n";
    char buf[64];
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", static_cast<double>(i) * profile.dt, profile.samples[i]);
        out += buf;
    }
    return out;
}

void save_profile_csv(const GrfProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << profile_csv(profile);
}

std::vector<double> shifted(std::span<const double> series, long shift, bool periodic) {
    const long n = static_cast<long>(series.size());
    std::vector<double> out(series.size(), 0.0);
    if (n == 0) return out;
    for (long i = 0; i < n; ++i) {
        long src = i - shift;
        if (periodic) {
            src %= n;
            if (src < 0) src += n;
            out[static_cast<std::size_t>(i)] = series[static_cast<std::size_t>(src)];
        } else if (src >= 0 && src < n) {
            out[static_cast<std::size_t>(i)] = series[static_cast<std::size_t>(src)];
        }
    }
    return out;
}

bool TaskScenario::in_contact(int leg, std::size_t index) const {
    const auto& s = leg == 0 ? right.samples : left.samples;
    return s[index] > contact_threshold;
}

int TaskScenario::legs_in_contact(std::size_t index) const {
    return static_cast<int>(in_contact(0, index)) + static_cast<int>(in_contact(1, index));
}

std::vector<int> TaskScenario::contact_counts() const {
    std::vector<int> n(size());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = legs_in_contact(i);
    return n;
}

std::vector<double> TaskScenario::total() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = right.samples[i] + left.samples[i];
    return out;
}

TaskScenario make_scenario(const GrfProfile& profile, double phase_offset, double contact_threshold) {
    if (profile.samples.empty()) throw InvalidInput("empty profile");
    if (phase_offset < 0.0) {
        phase_offset = profile.task == Task::Custom || profile.task == Task::Constant
                           ? 0.0
                           : task_defaults(profile.task).phase_offset;
    }
    if (phase_offset >= 1.0) throw InvalidInput("phase offset must lie in [0, 1)");
    if (!profile.periodic() && phase_offset != 0.0) {
        throw InvalidInput("aperiodic profile cannot be phase shifted");
    }
    TaskScenario sc;
    sc.right = profile;
    sc.left = profile;
    sc.phase_offset = phase_offset;
    sc.contact_threshold = contact_threshold;
    const long shift = std::lround(phase_offset * static_cast<double>(profile.size()));
    if (shift != 0) sc.left.samples = shifted(profile.samples, shift, true);
    return sc;
}

int contact_count(const TaskScenario& scenario, double t) {
    const long n = static_cast<long>(scenario.size());
    long i = std::lround(t / scenario.dt());
    if (scenario.right.periodic()) {
        i %= n;
        if (i < 0) i += n;
    } else {
        i = std::clamp(i, 0L, n - 1);
    }
    return scenario.legs_in_contact(static_cast<std::size_t>(i));
}

std::size_t count_windows(const std::vector<bool>& mask, bool periodic) {
    const std::size_t n = mask.size();
    if (n == 0) return 0;
    std::size_t rises = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool prev = i == 0 ? (periodic ? mask[n - 1] : false) : mask[i - 1];
        if (mask[i] && !prev) ++rises;
    }
    if (rises == 0 && mask[0]) return 1;  // all true
    return rises;
}

}  // namespace hydrostat
