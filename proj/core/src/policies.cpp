#include <uavmec/policies.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uavmec {

namespace {

// Lowest-backlog MEC server, ties to the lowest index.
CpuId least_loaded_mec(const SimConfig& cfg, const NetworkSnapshot& snapshot) {
    CpuId best{cfg.n_uavs};
    for (int c = cfg.n_uavs + 1; c < cfg.n_cpus(); ++c) {
        if (snapshot.backlog[static_cast<std::size_t>(c)] < snapshot.backlog[static_cast<std::size_t>(best.index)]) {
            best = CpuId{c};
        }
    }
    return best;
}

}  // namespace

CpuId round_robin_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot,
                         RoundRobinState& state) {
    const int receiver = snapshot.receiver.index;
    const auto cycle_length = static_cast<std::size_t>(cfg.n_cpus() - 1);
    if (cycle_length == 0) return task.source_uav;
    if (state.cursor.size() < static_cast<std::size_t>(cfg.n_uavs)) {
        state.cursor.resize(static_cast<std::size_t>(cfg.n_uavs), 0);
    }
    std::size_t& cursor = state.cursor[static_cast<std::size_t>(receiver)];
    // Position p of the cycle skips the receiver's own index.
    const int position = static_cast<int>(cursor % cycle_length);
    cursor = (cursor + 1) % cycle_length;
    return CpuId{position < receiver ? position : position + 1};
}

CpuId hef_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot, MecGate& gate) {
    if (cfg.n_mec > 0 && gate.rng.bernoulli(gate.probability)) {
        return least_loaded_mec(cfg, snapshot);
    }
    const auto& energy = snapshot.remaining_energy;
    const auto best = static_cast<int>(std::max_element(energy.begin(), energy.end()) - energy.begin());
    const double margin = energy[static_cast<std::size_t>(best)] -
                          energy[static_cast<std::size_t>(snapshot.receiver.index)];
    if (margin > kEnergyMarginFraction * cfg.energy.battery_capacity) {
        return CpuId{best};
    }
    return task.source_uav;
}

CpuId qhef_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot) {
    const int receiver = snapshot.receiver.index;
    const double own_backlog = snapshot.backlog[static_cast<std::size_t>(receiver)];
    const double own_energy = snapshot.remaining_energy[static_cast<std::size_t>(receiver)];

    std::vector<int> candidates;
    for (int c = 0; c < cfg.n_cpus(); ++c) {
        if (c == receiver) continue;
        if (own_backlog - snapshot.backlog[static_cast<std::size_t>(c)] > kQueueMarginSeconds) {
            candidates.push_back(c);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&snapshot](int a, int b) {
        return snapshot.backlog[static_cast<std::size_t>(a)] < snapshot.backlog[static_cast<std::size_t>(b)];
    });
    for (int c : candidates) {
        if (cfg.is_mec(CpuId{c})) return CpuId{c};
        const double margin = snapshot.remaining_energy[static_cast<std::size_t>(c)] - own_energy;
        if (margin > kEnergyMarginFraction * cfg.energy.battery_capacity) return CpuId{c};
    }
    return task.source_uav;
}

void RoundRobinPolicy::begin_run(const SimConfig& cfg, std::uint64_t) {
    cfg_ = &cfg;
    state_.cursor.assign(static_cast<std::size_t>(cfg.n_uavs), 0);
}

CpuId RoundRobinPolicy::decide(const Task& task, const NetworkSnapshot& snapshot) {
    return round_robin_decide(*cfg_, task, snapshot, state_);
}

void HefPolicy::begin_run(const SimConfig& cfg, std::uint64_t run_seed) {
    cfg_ = &cfg;
    gate_ = MecGate{Rng(derive_seed(run_seed, "hef-gate")), kHefMecShare};
}

CpuId HefPolicy::decide(const Task& task, const NetworkSnapshot& snapshot) {
    return hef_decide(*cfg_, task, snapshot, gate_);
}

void QhefPolicy::begin_run(const SimConfig& cfg, std::uint64_t) { cfg_ = &cfg; }

CpuId QhefPolicy::decide(const Task& task, const NetworkSnapshot& snapshot) {
    return qhef_decide(*cfg_, task, snapshot);
}

PolicyFactory heuristic_policy(std::string_view name) {
    if (name == "local") return [] { return std::make_unique<LocalPolicy>(); };
    if (name == "rr") return [] { return std::make_unique<RoundRobinPolicy>(); };
    if (name == "hef") return [] { return std::make_unique<HefPolicy>(); };
    if (name == "qhef") return [] { return std::make_unique<QhefPolicy>(); };
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

}  // namespace uavmec
