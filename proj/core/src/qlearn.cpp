#include <uavmec/qlearn.hpp>

#include <uavmec/energy.hpp>
#include <uavmec/io.hpp>
#include <uavmec/sim.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uavmec {

namespace {

std::size_t pow3(int n) {
    std::size_t out = 1;
    for (int i = 0; i < n; ++i) out *= 3;
    return out;
}

}  // namespace

StateSpace::StateSpace(std::size_t task_types, int n_cpus, int n_uavs)
    : task_types_(task_types), n_cpus_(n_cpus), n_uavs_(n_uavs), size_(task_types * pow3(n_cpus) * pow3(n_uavs)) {}

StateSpace::StateSpace(const SimConfig& cfg) : StateSpace(cfg.task_catalog.size(), cfg.n_cpus(), cfg.n_uavs) {}

std::size_t StateSpace::encode(const AgentState& state) const {
    if (state.task_type >= task_types_ || state.delay_bins.size() != static_cast<std::size_t>(n_cpus_) ||
        state.battery_levels.size() != static_cast<std::size_t>(n_uavs_)) {
        throw std::invalid_argument("StateSpace::encode: state does not match the space dimensions");
    }
    std::size_t index = state.task_type;
    for (std::uint8_t bin : state.delay_bins) index = index * 3 + bin;
    for (std::uint8_t level : state.battery_levels) index = index * 3 + level;
    return index;
}

AgentState StateSpace::decode(std::size_t index) const {
    if (index >= size_) throw std::out_of_range("StateSpace::decode: index out of range");
    AgentState state;
    state.battery_levels.resize(static_cast<std::size_t>(n_uavs_));
    state.delay_bins.resize(static_cast<std::size_t>(n_cpus_));
    for (int j = n_uavs_ - 1; j >= 0; --j) {
        state.battery_levels[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(index % 3);
        index /= 3;
    }
    for (int c = n_cpus_ - 1; c >= 0; --c) {
        state.delay_bins[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(index % 3);
        index /= 3;
    }
    state.task_type = index;
    return state;
}

DelayBin delay_bin(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate) {
    const double deadline = cfg.task_catalog.at(task.type).deadline;
    const double slack = deadline - expected_delay(cfg, snapshot, task, candidate);
    if (slack < -kTimeTolerance) return DelayBin::Violating;
    if (slack >= 0.5 * deadline - kTimeTolerance) return DelayBin::Safe;
    return DelayBin::Tight;
}

namespace {

std::vector<double> expected_uav_energy(const SimConfig& cfg, const EnergyParams& energy,
                                        const NetworkSnapshot& snapshot) {
    std::vector<double> out(static_cast<std::size_t>(cfg.n_uavs));
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = expected_remaining_at_start(energy, snapshot.remaining_energy[j], snapshot.backlog[j]);
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> battery_levels(const SimConfig& cfg, const NetworkSnapshot& snapshot) {
    const std::vector<double> expected = expected_uav_energy(cfg, effective_energy(cfg), snapshot);
    std::vector<std::uint8_t> levels(expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j) {
        levels[j] = static_cast<std::uint8_t>(battery_reward_level(expected[j], expected, cfg.epsilon_batt, false));
    }
    return levels;
}

AgentState encode_state(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot) {
    AgentState state;
    state.task_type = task.type;
    state.delay_bins.reserve(static_cast<std::size_t>(cfg.n_cpus()));
    for (int c = 0; c < cfg.n_cpus(); ++c) {
        state.delay_bins.push_back(static_cast<std::uint8_t>(delay_bin(cfg, snapshot, task, CpuId{c})));
    }
    state.battery_levels = battery_levels(cfg, snapshot);
    return state;
}

int violation_reward_level(const SimConfig& cfg, CpuId action, const NetworkSnapshot& snapshot, const Task& task) {
    if (!expected_violation(cfg, snapshot, task, action)) {
        throw std::invalid_argument("violation_reward_level: the action is not expected to violate");
    }
    const auto& penalty = cfg.violation_penalties;
    for (int c = cfg.n_uavs; c < cfg.n_cpus(); ++c) {
        if (!expected_violation(cfg, snapshot, task, CpuId{c})) return penalty[0];
    }
    if (!expected_violation(cfg, snapshot, task, snapshot.receiver)) return penalty[1];
    for (int j = 0; j < cfg.n_uavs; ++j) {
        if (j == snapshot.receiver.index || j == action.index) continue;
        if (!expected_violation(cfg, snapshot, task, CpuId{j})) return penalty[2];
    }
    return penalty[3];
}

double combine_reward(int battery_level, bool violates, int violation_level) {
    const int v = violates ? 1 : 0;
    return static_cast<double>((battery_level - 1) + (1 - v) + violation_level * v);
}

double reward(const SimConfig& cfg, CpuId action, const NetworkSnapshot& snapshot, const Task& task) {
    int level = 2;
    if (cfg.is_uav(action)) {
        const std::vector<double> expected = expected_uav_energy(cfg, effective_energy(cfg), snapshot);
        level = battery_reward_level(expected[static_cast<std::size_t>(action.index)], expected, cfg.epsilon_batt,
                                     false);
    }
    const bool violates = expected_violation(cfg, snapshot, task, action);
    const int violation_level = violates ? violation_reward_level(cfg, action, snapshot, task) : 0;
    return combine_reward(level, violates, violation_level);
}

double TrainSchedule::epsilon_at(std::size_t episode) const {
    const double decay_episodes = decay_fraction * static_cast<double>(episodes);
    if (decay_episodes <= 0.0 || static_cast<double>(episode) >= decay_episodes) return epsilon_end;
    const double progress = static_cast<double>(episode) / decay_episodes;
    return epsilon_start + (epsilon_end - epsilon_start) * progress;
}

std::vector<std::string> TrainSchedule::validate() const {
    std::vector<std::string> errors;
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) errors.emplace_back("learning_rate must lie in (0, 1]");
    if (!(discount >= 0.0 && discount < 1.0)) errors.emplace_back("discount must lie in [0, 1)");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) errors.emplace_back("epsilon_start must lie in [0, 1]");
    if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) errors.emplace_back("epsilon_end must lie in [0, 1]");
    if (!(decay_fraction >= 0.0 && decay_fraction <= 1.0)) errors.emplace_back("decay_fraction must lie in [0, 1]");
    return errors;
}

QTable::QTable(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), values_(states * actions, 0.0), visits_(states * actions, 0) {}

double QTable::max_value(std::size_t state) const {
    const double* row = &values_[state * actions_];
    return *std::max_element(row, row + actions_);
}

std::size_t QTable::best_action(std::size_t state) const {
    const double* row = &values_[state * actions_];
    // max_element keeps the first maximum, which is the lowest index.
    return static_cast<std::size_t>(std::max_element(row, row + actions_) - row);
}

void QTable::update(std::size_t state, std::size_t action, double reward, std::optional<std::size_t> next_state,
                    const TrainSchedule& schedule) {
    double& q = values_[state * actions_ + action];
    const double target = reward + (next_state ? schedule.discount * max_value(*next_state) : 0.0);
    q += schedule.learning_rate * (target - q);
    ++visits_[state * actions_ + action];
}

AgentTables make_agent_tables(const SimConfig& cfg) {
    const StateSpace space(cfg);
    return AgentTables(static_cast<std::size_t>(cfg.n_uavs),
                       QTable(space.size(), static_cast<std::size_t>(cfg.n_cpus())));
}

LearningPolicy::LearningPolicy(AgentTables& tables, const TrainSchedule& schedule)
    : tables_(tables), schedule_(schedule) {}

void LearningPolicy::begin_run(const SimConfig& cfg, std::uint64_t run_seed) {
    cfg_ = &cfg;
    space_.emplace(cfg);
    rng_ = Rng(derive_seed(run_seed, "explore"));
    pending_.assign(static_cast<std::size_t>(cfg.n_uavs), std::nullopt);
    episode_rewards_.assign(static_cast<std::size_t>(cfg.n_uavs), 0.0);
}

CpuId LearningPolicy::decide(const Task& task, const NetworkSnapshot& snapshot) {
    const auto agent = static_cast<std::size_t>(snapshot.receiver.index);
    QTable& table = tables_[agent];
    const std::size_t state = space_->encode(encode_state(*cfg_, task, snapshot));
    if (auto& previous = pending_[agent]) {
        table.update(previous->state, previous->action, previous->reward, state, schedule_);
    }
    std::size_t action = 0;
    if (epsilon_ > 0.0 && rng_.uniform01() < epsilon_) {
        action = static_cast<std::size_t>(rng_.below(table.actions()));
    } else {
        action = table.best_action(state);
    }
    const CpuId target{static_cast<int>(action)};
    const double r = reward(*cfg_, target, snapshot, task);
    episode_rewards_[agent] += r;
    pending_[agent] = Pending{state, action, r};
    return target;
}

void LearningPolicy::end_run() {
    for (std::size_t agent = 0; agent < pending_.size(); ++agent) {
        if (auto& last = pending_[agent]) {
            tables_[agent].update(last->state, last->action, last->reward, std::nullopt, schedule_);
            last.reset();
        }
    }
}

GreedyPolicy::GreedyPolicy(std::shared_ptr<const AgentTables> tables) : tables_(std::move(tables)) {}

void GreedyPolicy::begin_run(const SimConfig& cfg, std::uint64_t) {
    cfg_ = &cfg;
    space_.emplace(cfg);
    if (tables_->size() != static_cast<std::size_t>(cfg.n_uavs)) {
        throw std::invalid_argument("GreedyPolicy: one table per UAV required");
    }
    for (const QTable& t : *tables_) {
        if (t.states() != space_->size() || t.actions() != static_cast<std::size_t>(cfg.n_cpus())) {
            throw std::invalid_argument("GreedyPolicy: table dimensions do not match the config");
        }
    }
}

CpuId GreedyPolicy::decide(const Task& task, const NetworkSnapshot& snapshot) {
    const QTable& table = (*tables_)[static_cast<std::size_t>(snapshot.receiver.index)];
    const std::size_t state = space_->encode(encode_state(*cfg_, task, snapshot));
    return CpuId{static_cast<int>(table.best_action(state))};
}

PolicyFactory greedy_policy(std::shared_ptr<const AgentTables> tables) {
    return [tables] { return std::make_unique<GreedyPolicy>(tables); };
}

TrainResult train(const SimConfig& cfg, const TrainSchedule& schedule, std::uint64_t seed,
                  const TrainProgress& progress) {
    if (auto errors = schedule.validate(); !errors.empty()) {
        throw std::invalid_argument("train: " + errors.front());
    }
    TrainResult result;
    result.tables = make_agent_tables(cfg);
    result.rewards.reserve(schedule.episodes);
    LearningPolicy learner(result.tables, schedule);
    for (std::size_t episode = 0; episode < schedule.episodes; ++episode) {
        const std::vector<Task> workload = generate_workload(cfg, derive_seed(seed, "train-workload", episode));
        learner.set_epsilon(schedule.epsilon_at(episode));
        const RunMetrics metrics = run(cfg, workload, learner, derive_seed(seed, "train-run", episode));
        result.rewards.push_back(learner.episode_rewards());
        if (metrics.battery_exhausted()) result.exhausted_episodes.push_back(episode);
        if (progress) progress(episode);
    }
    return result;
}

std::vector<double> windowed_means(const std::vector<std::vector<double>>& rewards, std::size_t agent,
                                   std::size_t window, std::size_t stride) {
    std::vector<double> means;
    if (window == 0 || stride == 0 || rewards.size() < window) return means;
    double sum = 0.0;
    for (std::size_t e = 0; e < window; ++e) sum += rewards[e][agent];
    std::size_t next_sample = window - 1;
    for (std::size_t end = window - 1; end < rewards.size(); ++end) {
        if (end >= window) sum += rewards[end][agent] - rewards[end - window][agent];
        if (end == next_sample) {
            means.push_back(sum / static_cast<double>(window));
            next_sample += stride;
        }
    }
    return means;
}

std::string reward_trace_csv(const TrainResult& result) {
    std::ostringstream out;
    out << "episode,agent,cumulative_reward\n";
    for (std::size_t e = 0; e < result.rewards.size(); ++e) {
        for (std::size_t a = 0; a < result.rewards[e].size(); ++a) {
            out << e << ',' << a << ',' << format_double(result.rewards[e][a]) << '\n';
        }
    }
    return out.str();
}

}  // namespace uavmec
