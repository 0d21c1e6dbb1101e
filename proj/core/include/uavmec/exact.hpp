#pragma once

#include <uavmec/model.hpp>
#include <uavmec/sim.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec::exact {

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleSchedule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One task of the interval model; all times in whole intervals.
struct IlpTask {
    std::int64_t task_id = 0;
    int source = 0;
    int arrival = 0;
    int proc_uav = 0;
    int proc_mec = 0;
    int deadline = 0;
};

struct IlpInstance {
    int intervals = 0;
    int n_uavs = 0;
    int n_mec = 0;
    std::vector<IlpTask> tasks;
    double weight = 0.5;
    double theta = 1.0;
    EnergyParams energy{};
    double interval_len = 1.0;
    /// Must exceed every achievable delay and every deadline so both violation rows can relax.
    int big_m = 1;

    int n_cpus() const { return n_uavs + n_mec; }
    bool is_mec(int cpu) const { return cpu >= n_uavs; }
    int proc(std::size_t task, int cpu) const {
        return is_mec(cpu) ? tasks[task].proc_mec : tasks[task].proc_uav;
    }
    /// Battery after the horizon with no processing at all.
    double idle_remaining() const;
    /// Extra drain of one busy interval on a UAV.
    double busy_interval_cost() const;
};

/// Normalizer that weighs one violation like a 1% battery swing spread over the tasks.
double default_theta(std::size_t task_count, const EnergyParams& energy);

struct BuildOptions {
    /// Overrides ceil(horizon / interval_len).
    std::optional<int> intervals;
};

/// Arrivals are floored to interval indices; processing times must divide
/// evenly into intervals. Throws InstanceError on divisibility problems or
/// two arrivals at one UAV in one interval.
IlpInstance build_instance(const SimConfig& cfg, std::span<const Task> trace, BuildOptions options = {});

/// Start of a task's contiguous block on one CPU.
struct Placement {
    int cpu = 0;
    int start = 0;

    bool operator==(const Placement&) const = default;
};

/// Dense binary decision variables of the interval model.
class Schedule {
public:
    Schedule() = default;
    Schedule(std::size_t tasks, int cpus, int intervals);

    std::size_t tasks() const { return tasks_; }
    int cpus() const { return cpus_; }
    int intervals() const { return intervals_; }

    std::uint8_t& x(std::size_t task, int cpu) { return x_[task * cpus_ + cpu]; }
    std::uint8_t x(std::size_t task, int cpu) const { return x_[task * cpus_ + cpu]; }
    std::uint8_t& p(std::size_t task, int cpu, int t) { return p_[index(task, cpu, t)]; }
    std::uint8_t p(std::size_t task, int cpu, int t) const { return p_[index(task, cpu, t)]; }
    std::uint8_t& p_start(std::size_t task, int cpu, int t) { return p_start_[index(task, cpu, t)]; }
    std::uint8_t p_start(std::size_t task, int cpu, int t) const { return p_start_[index(task, cpu, t)]; }
    std::uint8_t& p_end(std::size_t task, int cpu, int t) { return p_end_[index(task, cpu, t)]; }
    std::uint8_t p_end(std::size_t task, int cpu, int t) const { return p_end_[index(task, cpu, t)]; }
    std::uint8_t& v(std::size_t task) { return v_[task]; }
    std::uint8_t v(std::size_t task) const { return v_[task]; }

    bool operator==(const Schedule&) const = default;

private:
    std::size_t index(std::size_t task, int cpu, int t) const {
        return (task * static_cast<std::size_t>(cpus_) + static_cast<std::size_t>(cpu)) *
                   static_cast<std::size_t>(intervals_) + static_cast<std::size_t>(t);
    }

    std::size_t tasks_ = 0;
    int cpus_ = 0;
    int intervals_ = 0;
    std::vector<std::uint8_t> x_, p_, p_start_, p_end_, v_;
};

/// Binary form of a placement list. The end marker sits on the first interval
/// after the block (absent when the block reaches the horizon); v is set
/// exactly when the delay exceeds the deadline.
Schedule make_schedule(const IlpInstance& instance, std::span<const Placement> placements);

/// Interval form of a simulated execution whose start times lie on the interval grid.
Schedule schedule_from_outcomes(const IlpInstance& instance, std::span<const TaskOutcome> outcomes);

/// Delay (intervals) of each task read from the start markers.
std::vector<int> delays(const IlpInstance& instance, const Schedule& schedule);

struct ConstraintViolation {
    std::string family;  // e.g. "contiguity_chain"
    std::string where;

    bool operator==(const ConstraintViolation&) const = default;
};

/// Families: allocation, no_early_allocation, allocation_off_selected_cpu,
/// cpu_interval_capacity, single_cpu_per_interval, single_offload,
/// violation_lower, violation_upper, contiguity_chain, start_end_exclusive,
/// initial_interval, single_start, single_end.
std::vector<ConstraintViolation> validate(const IlpInstance& instance, const Schedule& schedule);

/// Remaining battery per UAV from the allocation variables.
std::vector<double> remaining_energy(const IlpInstance& instance, const Schedule& schedule);

int violation_count(const Schedule& schedule);

/// weight * min remaining energy - (1 - weight) / theta * violations.
/// Throws InfeasibleSchedule when validate() reports anything.
double objective(const IlpInstance& instance, const Schedule& schedule);

enum class SolveStatus { Optimal, Feasible, Infeasible, Unknown };

std::string_view to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    std::vector<Placement> placements;  // per task, empty unless a schedule was found
    Schedule schedule;
    double objective = 0.0;
    int violations = 0;
    std::vector<double> remaining_energy;
    std::uint64_t nodes = 0;
    std::string message;

    bool proven_optimal() const { return status == SolveStatus::Optimal; }
    bool has_schedule() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
};

/// Depth-first branch and bound over (task, CPU) choices with left-justified
/// starts. Status Feasible means the budget ran out with an incumbent.
SolveResult solve(const IlpInstance& instance,
                  std::chrono::milliseconds time_budget = std::chrono::milliseconds(60'000));

/// CPLEX-LP text of the full model with AND-linearized allocation products.
std::string export_lp(const IlpInstance& instance);

/// Plain-text solution listing: header lines then one CSV row per task.
std::string solution_dump(const IlpInstance& instance, const SolveResult& result);

}  // namespace uavmec::exact
