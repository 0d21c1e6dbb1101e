#include <uavmec/model.hpp>

#include <uavmec/io.hpp>

#include <json.hpp>

#include <set>

namespace uavmec {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Rejects keys outside `allowed`, naming the offending key and its parent object.
void require_known_keys(const json& object, const std::set<std::string>& allowed, std::string_view where) {
    if (!object.is_object()) {
        throw ConfigError(std::string(where) + ": expected a JSON object");
    }
    for (const auto& item : object.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read_field(const json& object, const char* key, T& out, std::string_view where) {
    auto it = object.find(key);
    if (it == object.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

ordered_json energy_to_json(const EnergyParams& e) {
    ordered_json out;
    out["battery_capacity"] = e.battery_capacity;
    out["hover_power"] = e.hover_power;
    out["antenna_power"] = e.antenna_power;
    out["cpu_idle_power"] = e.cpu_idle_power;
    out["cpu_active_power"] = e.cpu_active_power;
    out["time_scale"] = e.time_scale;
    return out;
}

ordered_json catalog_to_json(const std::vector<TaskType>& catalog) {
    ordered_json rows = ordered_json::array();
    for (const TaskType& t : catalog) {
        ordered_json row;
        row["id"] = std::string(to_string(t.id));
        row["mean_interarrival"] = t.mean_interarrival;
        row["deadline"] = t.deadline;
        row["proc_time_uav"] = t.proc_time_uav;
        row["proc_time_mec"] = t.proc_time_mec;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string config_to_json(const SimConfig& cfg) {
    ordered_json out;
    out["n_uavs"] = cfg.n_uavs;
    out["n_mec"] = cfg.n_mec;
    out["horizon"] = cfg.horizon;
    out["interval_len"] = cfg.interval_len;
    out["offload_latency"] = cfg.offload_latency;
    out["energy"] = energy_to_json(cfg.energy);
    if (cfg.hover_model) {
        const HoverModelParams& h = *cfg.hover_model;
        out["hover_model"] = {
            {"frame_mass", h.frame_mass},           {"payload_mass", h.payload_mass},
            {"gravity", h.gravity},                 {"fluid_density", h.fluid_density},
            {"rotor_disc_area", h.rotor_disc_area}, {"rotor_count", h.rotor_count},
        };
    } else {
        out["hover_model"] = nullptr;
    }
    out["task_catalog"] = catalog_to_json(cfg.task_catalog);
    out["weight"] = cfg.weight;
    out["theta"] = cfg.theta ? ordered_json(*cfg.theta) : ordered_json(nullptr);
    out["epsilon_batt"] = cfg.epsilon_batt;
    out["seed"] = cfg.seed;
    out["violation_penalties"] = cfg.violation_penalties;
    return out.dump(2) + "\n";
}

SimConfig config_from_json(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_known_keys(root,
                       {"n_uavs", "n_mec", "horizon", "interval_len", "offload_latency", "energy",
                        "hover_model", "task_catalog", "weight", "theta", "epsilon_batt", "seed",
                        "violation_penalties"},
                       "config");

    // Absent keys keep their default values.
    SimConfig cfg = default_paper_config();
    read_field(root, "n_uavs", cfg.n_uavs, "config");
    read_field(root, "n_mec", cfg.n_mec, "config");
    read_field(root, "horizon", cfg.horizon, "config");
    read_field(root, "interval_len", cfg.interval_len, "config");
    read_field(root, "offload_latency", cfg.offload_latency, "config");
    read_field(root, "weight", cfg.weight, "config");
    read_field(root, "epsilon_batt", cfg.epsilon_batt, "config");
    read_field(root, "seed", cfg.seed, "config");
    read_field(root, "violation_penalties", cfg.violation_penalties, "config");

    if (auto it = root.find("energy"); it != root.end()) {
        require_known_keys(*it,
                           {"battery_capacity", "hover_power", "antenna_power", "cpu_idle_power",
                            "cpu_active_power", "time_scale"},
                           "config.energy");
        read_field(*it, "battery_capacity", cfg.energy.battery_capacity, "config.energy");
        read_field(*it, "hover_power", cfg.energy.hover_power, "config.energy");
        read_field(*it, "antenna_power", cfg.energy.antenna_power, "config.energy");
        read_field(*it, "cpu_idle_power", cfg.energy.cpu_idle_power, "config.energy");
        read_field(*it, "cpu_active_power", cfg.energy.cpu_active_power, "config.energy");
        read_field(*it, "time_scale", cfg.energy.time_scale, "config.energy");
    }

    if (auto it = root.find("hover_model"); it != root.end()) {
        if (it->is_null()) {
            cfg.hover_model.reset();
        } else {
            require_known_keys(*it,
                               {"frame_mass", "payload_mass", "gravity", "fluid_density",
                                "rotor_disc_area", "rotor_count"},
                               "config.hover_model");
            HoverModelParams h;
            read_field(*it, "frame_mass", h.frame_mass, "config.hover_model");
            read_field(*it, "payload_mass", h.payload_mass, "config.hover_model");
            read_field(*it, "gravity", h.gravity, "config.hover_model");
            read_field(*it, "fluid_density", h.fluid_density, "config.hover_model");
            read_field(*it, "rotor_disc_area", h.rotor_disc_area, "config.hover_model");
            read_field(*it, "rotor_count", h.rotor_count, "config.hover_model");
            cfg.hover_model = h;
        }
    }

    if (auto it = root.find("theta"); it != root.end()) {
        if (it->is_null()) {
            cfg.theta.reset();
        } else {
            double theta = 0.0;
            read_field(root, "theta", theta, "config");
            cfg.theta = theta;
        }
    }

    if (auto it = root.find("task_catalog"); it != root.end()) {
        if (!it->is_array()) throw ConfigError("config.task_catalog: expected an array");
        cfg.task_catalog.clear();
        for (const json& row : *it) {
            require_known_keys(row, {"id", "mean_interarrival", "deadline", "proc_time_uav", "proc_time_mec"},
                               "config.task_catalog[]");
            TaskType t;
            std::string id;
            read_field(row, "id", id, "config.task_catalog[]");
            t.id = parse_task_kind(id);
            read_field(row, "mean_interarrival", t.mean_interarrival, "config.task_catalog[]");
            read_field(row, "deadline", t.deadline, "config.task_catalog[]");
            read_field(row, "proc_time_uav", t.proc_time_uav, "config.task_catalog[]");
            read_field(row, "proc_time_mec", t.proc_time_mec, "config.task_catalog[]");
            cfg.task_catalog.push_back(t);
        }
    }
    return cfg;
}

SimConfig load_config(const std::string& path) {
    return config_from_json(read_file(path));
}

std::uint64_t config_hash(const SimConfig& cfg) {
    ordered_json shape;
    shape["n_uavs"] = cfg.n_uavs;
    shape["n_mec"] = cfg.n_mec;
    shape["offload_latency"] = cfg.offload_latency;
    EnergyParams energy = cfg.energy;
    energy.hover_power = cfg.effective_hover_power();
    shape["energy"] = energy_to_json(energy);
    shape["task_catalog"] = catalog_to_json(cfg.task_catalog);
    shape["epsilon_batt"] = cfg.epsilon_batt;
    shape["violation_penalties"] = cfg.violation_penalties;
    return fnv1a64(shape.dump());
}

}  // namespace uavmec
