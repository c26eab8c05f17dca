#include "hydrostat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "hydrostat/errors.hpp"

namespace hydrostat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

DesignVariant DesignVariant::from_label(char label) {
    switch (label) {
        case 'A': case 'a': return A();
        case 'B': case 'b': return B();
        case 'C': case 'c': return C();
        case 'D': case 'd': return D();
        default: throw InvalidInput(std::string("unknown design variant '") + label + "'");
    }
}

std::vector<DesignVariant> all_variants() {
    return {DesignVariant::A(), DesignVariant::B(), DesignVariant::C(), DesignVariant::D()};
}

SpeedModel default_speed_model(Task task) {
    switch (task) {
        case Task::Walk: return {0.4, 2};
        case Task::Run: return {1.0, 2};
        case Task::Jump: return {2.7, 1};
        case Task::SitToStand: return {0.7, 1};
        default: return {0.0, 1};
    }
}

std::vector<std::vector<double>> leg_speeds(const TaskScenario& scenario, const SpeedModel& model) {
    const std::size_t n = scenario.size();
    std::vector<double> right(n);
    // Integer phase index keeps the series exactly periodic in samples.
    const std::size_t k = static_cast<std::size_t>(std::max(1, model.cycles_per_period));
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = static_cast<double>((k * j) % n) / static_cast<double>(n);
        right[j] = model.v_max * std::sin(2.0 * kPi * phase);
    }
    std::vector<double> left = right;
    const long shift = std::lround(scenario.phase_offset * static_cast<double>(n));
    if (shift != 0) left = shifted(right, shift, true);
    return {right, left};
}

double rms(std::span<const double> series) {
    if (series.empty()) throw InvalidInput("rms of empty series");
    double acc = 0.0;
    for (double v : series) acc += v * v;
    return std::sqrt(acc / static_cast<double>(series.size()));
}

double peak_abs(std::span<const double> series) {
    double m = 0.0;
    for (double v : series) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> offset_branch(std::span<const double> f, const std::vector<bool>& loaded, double f_stat) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = loaded[i] ? f[i] - f_stat : 0.0;
    return out;
}

std::vector<double> shared_series(const TaskScenario& scenario) {
    std::vector<double> out(scenario.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int nl = scenario.legs_in_contact(i);
        out[i] = nl > 0 ? (scenario.right.samples[i] + scenario.left.samples[i]) / nl : 0.0;
    }
    return out;
}

std::vector<bool> loaded_mask(const TaskScenario& scenario, bool sharing, int leg) {
    std::vector<bool> m(scenario.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = sharing ? scenario.legs_in_contact(i) > 0 : scenario.in_contact(leg, i);
    }
    return m;
}

MotorDemand demand(const TaskScenario& scenario, DesignVariant variant, double f_stat,
                   const SpeedModel& speed_model) {
    if (f_stat < 0.0) throw InvalidInput("negative static offset");
    if (f_stat > 0.0 && !variant.passive_offset) {
        throw InvalidInput(std::string("design ") + variant.label() + " has no passive offset");
    }
    MotorDemand d;
    d.f_stat = f_stat;
    d.dt = scenario.dt();
    d.periodic = scenario.right.periodic();
    const auto v = leg_speeds(scenario, speed_model);

    auto apply_offset = [&](std::vector<double> series, const std::vector<bool>& mask) {
        for (std::size_t i = 0; i < series.size(); ++i) series[i] = mask[i] ? series[i] - f_stat : 0.0;
        return series;
    };

    if (variant.sharing) {
        d.motor_count = 1;
        d.force.push_back(apply_offset(shared_series(scenario), loaded_mask(scenario, true)));
        std::vector<double> vs(v[0].size());
        for (std::size_t i = 0; i < vs.size(); ++i) vs[i] = v[0][i] + v[1][i];
        d.speed.push_back(std::move(vs));
    } else {
        d.motor_count = 2;
        d.force.push_back(apply_offset(scenario.right.samples, loaded_mask(scenario, false, 0)));
        d.force.push_back(apply_offset(scenario.left.samples, loaded_mask(scenario, false, 1)));
        d.speed = v;
    }
    return d;
}

MotorDemand demand(const TaskScenario& scenario, DesignVariant variant, double f_stat) {
    return demand(scenario, variant, f_stat, default_speed_model(scenario.right.task));
}

std::vector<DemandMetrics> metrics(const MotorDemand& demand) {
    std::vector<DemandMetrics> out;
    for (std::size_t m = 0; m < demand.force.size(); ++m) {
        const auto& f = demand.force[m];
        const auto& v = demand.speed[m];
        DemandMetrics dm;
        dm.f_dyn_rms = rms(f);
        dm.f_dyn_peak = peak_abs(f);
        double p = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) p += std::abs(f[i] * v[i]);
        dm.mean_abs_power = p / static_cast<double>(f.size());
        dm.v_max = peak_abs(v);
        out.push_back(dm);
    }
    return out;
}

double loss_fraction(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("efficiency must lie in (0, 1]");
    return 1.0 / eta - eta;
}

double battery_power(const MotorDemand& demand, const EfficiencyParams& eff, double body_mass) {
    if (!(eff.torque_constant > 0.0) || !(eff.motor_to_output_ratio > 0.0)) {
        throw InvalidInput("torque constant and motor ratio must be positive");
    }
    if (!(eff.eta_gen > 0.0 && eff.eta_gen <= 1.0 && eff.eta_regen > 0.0 && eff.eta_regen <= 1.0)) {
        throw InvalidInput("efficiencies must lie in (0, 1]");
    }
    if (eff.winding_resistance < 0.0 || body_mass < 0.0) throw InvalidInput("negative resistance or mass");
    const double amps_per_nkg = body_mass / (eff.motor_to_output_ratio * eff.torque_constant);
    double total = 0.0;
    for (std::size_t m = 0; m < demand.force.size(); ++m) {
        const auto& f = demand.force[m];
        const auto& v = demand.speed[m];
        const double n = static_cast<double>(f.size());
        const double i_rms = rms(f) * amps_per_nkg;
        total += eff.winding_resistance * i_rms * i_rms;
        if (demand.periodic) {
            double abs_p = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) abs_p += std::abs(f[i] * v[i]);
            total += (1.0 / eff.eta_gen - eff.eta_regen) * body_mass * abs_p / n / 2.0;
        } else {
            double acc = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double p = body_mass * f[i] * v[i];
                acc += p > 0.0 ? p / eff.eta_gen : eff.eta_regen * p;
            }
            total += acc / n;
        }
    }
    return total;
}

DesignTable design_table(const std::vector<TaskScenario>& scenarios, const OffsetMap& offsets) {
    DesignTable table;
    for (const auto& sc : scenarios) {
        const Task task = sc.right.task;
        const std::string name(to_string(task));
        const bool periodic = sc.right.periodic();
        TableRow rows[4];
        for (DesignVariant var : all_variants()) {
            double f_stat = 0.0;
            if (var.passive_offset) {
                auto it = offsets.find(task);
                if (it == offsets.end() || !it->second.count(var.label())) {
                    throw InvalidInput("missing offset for " + name + "/" + var.label());
                }
                f_stat = it->second.at(var.label());
            }
            const auto d = demand(sc, var, f_stat);
            const auto ms = metrics(d);
            TableRow r;
            r.task = name;
            r.variant = var.label();
            r.f_stat = f_stat;
            r.motor_count = d.motor_count;
            for (const auto& m : ms) {
                r.f_dyn_peak = std::max(r.f_dyn_peak, m.f_dyn_peak);
                r.v_max = std::max(r.v_max, m.v_max);
                r.f_dyn_rms_total += m.f_dyn_rms;
                r.mean_abs_P_total += m.mean_abs_power;
            }
            r.f_dyn_rms = ms.front().f_dyn_rms;
            r.mean_abs_P = ms.front().mean_abs_power;
            if (!periodic) {
                r.f_dyn_rms = r.f_dyn_rms_total = kNaN;
                r.mean_abs_P = r.mean_abs_P_total = kNaN;
            }
            rows[var.label() - 'A'] = r;
            table.rows.push_back(r);
        }
        RatioRow ratio;
        ratio.task = name;
        ratio.rms_ratio_per_motor = rows[0].f_dyn_rms / rows[3].f_dyn_rms;
        ratio.rms_ratio_total = rows[0].f_dyn_rms_total / rows[3].f_dyn_rms_total;
        ratio.peak_ratio_per_motor = rows[0].f_dyn_peak / rows[3].f_dyn_peak;
        table.ratios.push_back(ratio);
    }
    return table;
}

std::string design_table_csv(const DesignTable& table) {
    std::string out = "task,variant,f_dyn_rms,f_dyn_peak,mean_abs_P,v_max,f_stat\n";
    for (const auto& r : table.rows) {
        out += r.task + "," + r.variant + "," + fmt_num(r.f_dyn_rms) + "," + fmt_num(r.f_dyn_peak) + "," +
               fmt_num(r.mean_abs_P) + "," + fmt_num(r.v_max) + "," + fmt_num(r.f_stat) + "\n";
    }
    return out;
}

std::string design_table_json(const DesignTable& table) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["task"] = r.task;
        row["variant"] = std::string(1, r.variant);
        row["f_dyn_rms"] = r.f_dyn_rms;
        row["f_dyn_peak"] = r.f_dyn_peak;
        row["mean_abs_P"] = r.mean_abs_P;
        row["v_max"] = r.v_max;
        row["f_stat"] = r.f_stat;
        row["motor_count"] = r.motor_count;
        row["f_dyn_rms_total"] = r.f_dyn_rms_total;
        row["mean_abs_P_total"] = r.mean_abs_P_total;
        j["rows"].push_back(row);
    }
    j["ratios"] = nlohmann::ordered_json::array();
    for (const auto& r : table.ratios) {
        j["ratios"].push_back({{"task", r.task},
                               {"rms_A_over_D_per_motor", r.rms_ratio_per_motor},
                               {"rms_A_over_D_total", r.rms_ratio_total},
                               {"peak_A_over_D_per_motor", r.peak_ratio_per_motor}});
    }
    return j.dump(2) + "\n";
}

}  // namespace hydrostat
