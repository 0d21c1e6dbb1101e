#pragma once

#include <uavmec/energy.hpp>
#include <uavmec/model.hpp>
#include <uavmec/policy.hpp>

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavmec {

/// Slack used for every time comparison (seconds).
inline constexpr double kTimeTolerance = 1e-9;

// Declared in dispatch order for simultaneous events.
enum class EventKind : std::uint8_t { Completion, Delivery, Arrival, DecisionRequired, StartProcessing };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Arrival;
    std::size_t task = 0;  // index into the workload
    CpuId cpu{};
    std::uint64_t sequence = 0;
};

/// Strict weak order: time, kind, task id, then insertion sequence.
bool event_before(const Event& a, const Event& b, std::span<const Task> workload);

/// FIFO single-server queue of one CPU.
struct CpuQueue {
    CpuId cpu_id{};
    std::deque<std::size_t> pending;
    std::optional<std::size_t> in_service;
    double service_start = 0.0;
    double busy_until = 0.0;
    double pending_work = 0.0;
    double in_flight_work = 0.0;
    double busy_completed = 0.0;
    bool start_scheduled = false;

    double backlog(double now) const;
    double busy_seconds(double now) const;
};

struct TaskOutcome {
    std::int64_t task_id = 0;
    CpuId assigned_cpu{};
    double start_time = 0.0;
    double completion_time = 0.0;
    double total_delay = 0.0;
    bool violated = false;

    bool operator==(const TaskOutcome&) const = default;
};

struct RunMetrics {
    std::string policy;
    std::uint64_t seed = 0;
    std::size_t total_tasks = 0;
    std::size_t violations = 0;
    std::vector<std::size_t> violations_per_cpu;
    std::vector<std::size_t> tasks_per_cpu;
    std::size_t offloaded_tasks = 0;
    /// Indexed by UAV.
    std::vector<double> remaining_percentage;
    /// Indexed by CPU.
    std::vector<double> busy_seconds;
    /// max(horizon, last completion); the time at which energy is read.
    double end_time = 0.0;
    std::vector<TaskOutcome> outcomes;  // ordered by task id
    /// Per UAV: first instant the battery reached zero, if it did.
    std::vector<std::optional<double>> exhaustion_time;
    std::uint64_t workload_hash = 0;

    double min_remaining_percentage() const;
    double violation_percentage() const;
    bool battery_exhausted() const;

    bool operator==(const RunMetrics&) const = default;
};

/// Exponential inter-arrivals per (UAV, task type) stream; arrivals at or after
/// the horizon are dropped. Sorted by time, ids assigned in that order.
std::vector<Task> generate_workload(const SimConfig& cfg, std::uint64_t seed);

std::uint64_t workload_hash(std::span<const Task> workload);

/// Line-delimited `task_id,type,source_uav,arrival_time` records with a header line.
std::string write_trace(const SimConfig& cfg, std::span<const Task> workload);
std::vector<Task> parse_trace(const SimConfig& cfg, std::string_view text);

/// Predicted scheduling + processing delay if `task` were sent to `candidate` now.
double expected_delay(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate);

/// True when the predicted delay exceeds the deadline (equality meets it).
bool expected_violation(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate);

/// Event-driven execution of `workload` under `policy`. The policy's per-run
/// state is seeded from `run_seed`.
RunMetrics run(const SimConfig& cfg, std::span<const Task> workload, Policy& policy, std::uint64_t run_seed);

}  // namespace uavmec
