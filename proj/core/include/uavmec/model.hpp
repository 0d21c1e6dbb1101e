#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavmec {

/// Raised for malformed or invalid configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TaskKind : std::uint8_t { FD, PD, GM };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

/// One row of the task catalog. All times in seconds.
struct TaskType {
    TaskKind id = TaskKind::FD;
    double mean_interarrival = 0.0;
    double deadline = 0.0;
    double proc_time_uav = 0.0;
    double proc_time_mec = 0.0;

    bool operator==(const TaskType&) const = default;
};

/// Index of a processor. [0, n_uavs) are UAVs, [n_uavs, n_uavs + n_mec) are MEC servers.
struct CpuId {
    int index = 0;

    constexpr auto operator<=>(const CpuId&) const = default;
};

struct Task {
    std::int64_t id = 0;
    std::size_t type = 0;  // index into SimConfig::task_catalog
    CpuId source_uav{};
    double arrival_time = 0.0;
    bool offloaded = false;

    bool operator==(const Task&) const = default;
};

/// Powers are per second of simulated time; `time_scale` converts
/// power x seconds into battery units (1/3600 turns W*s into Wh).
struct EnergyParams {
    double battery_capacity = 0.0;
    double hover_power = 0.0;
    double antenna_power = 0.0;
    double cpu_idle_power = 0.0;
    double cpu_active_power = 0.0;
    double time_scale = 1.0 / 3600.0;

    bool operator==(const EnergyParams&) const = default;
};

struct HoverModelParams {
    double frame_mass = 0.0;
    double payload_mass = 0.0;
    double gravity = 0.0;
    double fluid_density = 0.0;
    double rotor_disc_area = 0.0;
    int rotor_count = 0;

    bool operator==(const HoverModelParams&) const = default;
};

struct SimConfig {
    int n_uavs = 0;
    int n_mec = 0;
    double horizon = 0.0;
    double interval_len = 0.0;
    double offload_latency = 0.0;
    EnergyParams energy{};
    std::optional<HoverModelParams> hover_model{};
    std::vector<TaskType> task_catalog{};
    double weight = 0.5;
    /// Empty means "derive from the instance" (see exact::default_theta).
    std::optional<double> theta{};
    double epsilon_batt = 0.0;
    std::uint64_t seed = 0;
    /// Penalties for a violating action: MEC-would-meet, receiver-would-meet,
    /// other-UAV-would-meet, nothing-would-meet.
    std::array<int, 4> violation_penalties{-40, -20, -10, -1};

    int n_cpus() const { return n_uavs + n_mec; }
    bool is_uav(CpuId cpu) const { return cpu.index >= 0 && cpu.index < n_uavs; }
    bool is_mec(CpuId cpu) const { return cpu.index >= n_uavs && cpu.index < n_cpus(); }
    bool is_valid_cpu(CpuId cpu) const { return cpu.index >= 0 && cpu.index < n_cpus(); }

    /// Processing time of a catalog entry on the given CPU's class.
    double processing_time(std::size_t type, CpuId cpu) const;

    /// Hover power actually used: derived from hover_model when present.
    double effective_hover_power() const;

    bool operator==(const SimConfig&) const = default;
};

/// Reference setup: stock energy constants, the FD/PD/GM catalog, J = 4, L = 1.
SimConfig default_paper_config();

struct ValidationOptions {
    /// Also enforce constraints that only the interval-indexed exact module needs.
    bool exact = false;
};

/// Every broken invariant as a human-readable message. Empty means valid.
std::vector<std::string> validate_config(const SimConfig& cfg, ValidationOptions options = {});

/// True when `value` is an integer multiple of `step` up to floating-point noise.
bool is_integer_multiple(double value, double step);

// JSON round trip; field names mirror SimConfig. Unknown keys throw ConfigError.
std::string config_to_json(const SimConfig& cfg);
SimConfig config_from_json(std::string_view text);
SimConfig load_config(const std::string& path);

/// Stable 64-bit fingerprint of every field that shapes learned tables (seed excluded).
std::uint64_t config_hash(const SimConfig& cfg);

}  // namespace uavmec
