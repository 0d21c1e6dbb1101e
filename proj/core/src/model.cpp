#include <uavmec/model.hpp>

#include <uavmec/energy.hpp>

#include <cmath>
#include <sstream>

namespace uavmec {

std::string_view to_string(TaskKind kind) {
    switch (kind) {
    case TaskKind::FD: return "FD";
    case TaskKind::PD: return "PD";
    case TaskKind::GM: return "GM";
    }
    return "?";
}

TaskKind parse_task_kind(std::string_view name) {
    if (name == "FD") return TaskKind::FD;
    if (name == "PD") return TaskKind::PD;
    if (name == "GM") return TaskKind::GM;
    throw ConfigError("unknown task type '" + std::string(name) + "' (expected FD, PD or GM)");
}

double SimConfig::processing_time(std::size_t type, CpuId cpu) const {
    const TaskType& row = task_catalog.at(type);
    return is_mec(cpu) ? row.proc_time_mec : row.proc_time_uav;
}

double SimConfig::effective_hover_power() const {
    return hover_model ? hover_power(*hover_model) : energy.hover_power;
}

SimConfig default_paper_config() {
    SimConfig cfg;
    cfg.n_uavs = 4;
    cfg.n_mec = 1;
    cfg.horizon = 4.0;
    cfg.interval_len = 0.05;
    cfg.offload_latency = 0.0;
    cfg.energy = EnergyParams{570.0, 211.0, 17.0, 4320.0, 12960.0, 1.0 / 3600.0};
    cfg.task_catalog = {
        TaskType{TaskKind::FD, 0.25, 0.3, 0.1, 0.05},
        TaskType{TaskKind::PD, 0.25, 0.8, 0.5, 0.25},
        TaskType{TaskKind::GM, 0.5, 5.0, 0.1, 0.05},
    };
    cfg.weight = 0.5;
    cfg.epsilon_batt = 0.01 * cfg.energy.battery_capacity;
    cfg.seed = 1;
    return cfg;
}

bool is_integer_multiple(double value, double step) {
    if (!(step > 0.0)) return false;
    const double ratio = value / step;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

namespace {

template <typename T>
std::string describe(std::string_view field, T value, std::string_view rule) {
    std::ostringstream out;
    out << field << " = " << value << ": " << rule;
    return out.str();
}

}  // namespace

std::vector<std::string> validate_config(const SimConfig& cfg, ValidationOptions options) {
    std::vector<std::string> errors;
    auto check = [&errors](bool ok, std::string message) {
        if (!ok) errors.push_back(std::move(message));
    };

    check(cfg.n_uavs >= 1, describe("n_uavs", cfg.n_uavs, "must be at least 1"));
    check(cfg.n_mec >= 0, describe("n_mec", cfg.n_mec, "must be non-negative"));
    check(std::isfinite(cfg.horizon) && cfg.horizon >= 0.0,
          describe("horizon", cfg.horizon, "must be finite and non-negative"));
    check(cfg.interval_len > 0.0, describe("interval_len", cfg.interval_len, "must be positive"));
    check(cfg.offload_latency >= 0.0,
          describe("offload_latency", cfg.offload_latency, "must be non-negative"));

    const EnergyParams& e = cfg.energy;
    check(e.battery_capacity >= 0.0,
          describe("energy.battery_capacity", e.battery_capacity, "must be non-negative"));
    check(e.hover_power >= 0.0, describe("energy.hover_power", e.hover_power, "must be non-negative"));
    check(e.antenna_power >= 0.0,
          describe("energy.antenna_power", e.antenna_power, "must be non-negative"));
    check(e.cpu_idle_power >= 0.0,
          describe("energy.cpu_idle_power", e.cpu_idle_power, "must be non-negative"));
    check(e.cpu_active_power >= e.cpu_idle_power,
          describe("energy.cpu_active_power", e.cpu_active_power,
                   "must be at least energy.cpu_idle_power"));
    check(e.time_scale > 0.0, describe("energy.time_scale", e.time_scale, "must be positive"));

    if (cfg.hover_model) {
        const HoverModelParams& h = *cfg.hover_model;
        check(h.frame_mass > 0.0, describe("hover_model.frame_mass", h.frame_mass, "must be positive"));
        check(h.payload_mass > 0.0,
              describe("hover_model.payload_mass", h.payload_mass, "must be positive"));
        check(h.gravity > 0.0, describe("hover_model.gravity", h.gravity, "must be positive"));
        check(h.fluid_density > 0.0,
              describe("hover_model.fluid_density", h.fluid_density, "must be positive"));
        check(h.rotor_disc_area > 0.0,
              describe("hover_model.rotor_disc_area", h.rotor_disc_area, "must be positive"));
        check(h.rotor_count >= 1, describe("hover_model.rotor_count", h.rotor_count, "must be at least 1"));
    }

    check(!cfg.task_catalog.empty(), "task_catalog: must contain at least one task type");
    for (std::size_t k = 0; k < cfg.task_catalog.size(); ++k) {
        const TaskType& t = cfg.task_catalog[k];
        const std::string prefix = "task_catalog[" + std::string(to_string(t.id)) + "].";
        check(t.mean_interarrival > 0.0,
              describe(prefix + "mean_interarrival", t.mean_interarrival, "must be positive"));
        check(t.deadline > 0.0, describe(prefix + "deadline", t.deadline, "must be positive"));
        check(t.proc_time_mec > 0.0, describe(prefix + "proc_time_mec", t.proc_time_mec, "must be positive"));
        check(t.proc_time_mec <= t.proc_time_uav,
              describe(prefix + "proc_time_mec", t.proc_time_mec, "must not exceed proc_time_uav"));
        if (options.exact && cfg.interval_len > 0.0) {
            check(is_integer_multiple(t.proc_time_uav, cfg.interval_len),
                  describe(prefix + "proc_time_uav", t.proc_time_uav,
                           "not an integer multiple of interval_len (divisibility)"));
            check(is_integer_multiple(t.proc_time_mec, cfg.interval_len),
                  describe(prefix + "proc_time_mec", t.proc_time_mec,
                           "not an integer multiple of interval_len (divisibility)"));
        }
        for (std::size_t other = 0; other < k; ++other) {
            check(cfg.task_catalog[other].id != t.id, prefix + "id: duplicate task type");
        }
    }

    check(cfg.weight >= 0.0 && cfg.weight <= 1.0, describe("weight", cfg.weight, "must lie in [0, 1]"));
    if (cfg.theta) {
        check(*cfg.theta > 0.0, describe("theta", *cfg.theta, "must be positive"));
    }
    check(cfg.epsilon_batt > 0.0, describe("epsilon_batt", cfg.epsilon_batt, "must be positive"));
    for (int penalty : cfg.violation_penalties) {
        check(penalty <= 0, describe("violation_penalties", penalty, "entries must be non-positive"));
    }
    return errors;
}

}  // namespace uavmec
