#pragma once

#include <uavmec/model.hpp>
#include <uavmec/policy.hpp>
#include <uavmec/rng.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

/// Delay bins per candidate CPU.
enum class DelayBin : std::uint8_t {
    Safe = 0,      // meets the deadline with at least half of it to spare
    Tight = 1,     // meets the deadline with less than half to spare
    Violating = 2  // expected to miss the deadline
};

struct AgentState {
    std::size_t task_type = 0;
    std::vector<std::uint8_t> delay_bins;      // per CPU, DelayBin values
    std::vector<std::uint8_t> battery_levels;  // per UAV, {0, 1, 2}

    bool operator==(const AgentState&) const = default;
};

/// Mixed-radix index space: task type x 3^(CPUs) x 3^(UAVs).
class StateSpace {
public:
    StateSpace(std::size_t task_types, int n_cpus, int n_uavs);
    explicit StateSpace(const SimConfig& cfg);

    std::size_t size() const { return size_; }
    std::size_t encode(const AgentState& state) const;
    AgentState decode(std::size_t index) const;

private:
    std::size_t task_types_;
    int n_cpus_;
    int n_uavs_;
    std::size_t size_;
};

DelayBin delay_bin(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate);

/// Battery reward level of every UAV, each judged at the time it would start a new task.
std::vector<std::uint8_t> battery_levels(const SimConfig& cfg, const NetworkSnapshot& snapshot);

AgentState encode_state(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot);

/// Graded penalty for an action expected to miss its deadline. Throws
/// std::invalid_argument when the action is not expected to violate.
int violation_reward_level(const SimConfig& cfg, CpuId action, const NetworkSnapshot& snapshot, const Task& task);

/// (battery_level - 1) + (1 - violates) + violation_level * violates.
double combine_reward(int battery_level, bool violates, int violation_level);

double reward(const SimConfig& cfg, CpuId action, const NetworkSnapshot& snapshot, const Task& task);

struct TrainSchedule {
    std::size_t episodes = 0;
    double learning_rate = 0.05;
    double discount = 0.85;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    /// Fraction of episodes over which epsilon decays linearly; fixed afterwards.
    double decay_fraction = 0.5;

    double epsilon_at(std::size_t episode) const;
    std::vector<std::string> validate() const;
};

class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }

    double value(std::size_t state, std::size_t action) const { return values_[state * actions_ + action]; }
    void set_value(std::size_t state, std::size_t action, double v) { values_[state * actions_ + action] = v; }
    std::uint32_t visits(std::size_t state, std::size_t action) const { return visits_[state * actions_ + action]; }
    void set_visits(std::size_t state, std::size_t action, std::uint32_t n) { visits_[state * actions_ + action] = n; }

    double max_value(std::size_t state) const;
    /// Greedy action, ties to the lowest CPU index.
    std::size_t best_action(std::size_t state) const;

    void update(std::size_t state, std::size_t action, double reward, std::optional<std::size_t> next_state,
                const TrainSchedule& schedule);

    bool operator==(const QTable&) const = default;

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
    std::vector<std::uint32_t> visits_;
};

/// One independent table per UAV.
using AgentTables = std::vector<QTable>;

AgentTables make_agent_tables(const SimConfig& cfg);

/// Epsilon-greedy learner that updates its tables while driving a simulation.
/// The reward of a decision is bootstrapped from the same agent's next decision.
class LearningPolicy final : public Policy {
public:
    LearningPolicy(AgentTables& tables, const TrainSchedule& schedule);

    std::string name() const override { return "qlearn-train"; }
    void begin_run(const SimConfig& cfg, std::uint64_t run_seed) override;
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override;
    void end_run() override;

    void set_epsilon(double epsilon) { epsilon_ = epsilon; }
    /// Reward accumulated per agent during the last run.
    const std::vector<double>& episode_rewards() const { return episode_rewards_; }

private:
    struct Pending {
        std::size_t state = 0;
        std::size_t action = 0;
        double reward = 0.0;
    };

    AgentTables& tables_;
    const TrainSchedule& schedule_;
    const SimConfig* cfg_ = nullptr;
    std::optional<StateSpace> space_;
    Rng rng_{0};
    double epsilon_ = 1.0;
    std::vector<std::optional<Pending>> pending_;
    std::vector<double> episode_rewards_;
};

/// Pure exploitation of trained tables.
class GreedyPolicy final : public Policy {
public:
    explicit GreedyPolicy(std::shared_ptr<const AgentTables> tables);

    std::string name() const override { return "qlearn"; }
    void begin_run(const SimConfig& cfg, std::uint64_t run_seed) override;
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override;

private:
    std::shared_ptr<const AgentTables> tables_;
    const SimConfig* cfg_ = nullptr;
    std::optional<StateSpace> space_;
};

PolicyFactory greedy_policy(std::shared_ptr<const AgentTables> tables);

struct TrainResult {
    AgentTables tables;
    /// rewards[episode][agent]: cumulative reward of that agent in that episode.
    std::vector<std::vector<double>> rewards;
    std::vector<std::size_t> exhausted_episodes;
};

using TrainProgress = std::function<void(std::size_t episode)>;

/// Each episode simulates a freshly sampled horizon; tables carry over.
TrainResult train(const SimConfig& cfg, const TrainSchedule& schedule, std::uint64_t seed,
                  const TrainProgress& progress = {});

/// Trailing-window means of one agent's reward trace, sampled every `stride` episodes.
std::vector<double> windowed_means(const std::vector<std::vector<double>>& rewards, std::size_t agent,
                                   std::size_t window, std::size_t stride);

std::string reward_trace_csv(const TrainResult& result);

class QTableFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text dump: header with version and config hash, then `agent state action value visits` rows.
std::string serialize_tables(const SimConfig& cfg, const AgentTables& tables);

/// Throws QTableFormatError on malformed input or when the embedded config hash differs.
AgentTables parse_tables(const SimConfig& cfg, std::string_view text);

}  // namespace uavmec
