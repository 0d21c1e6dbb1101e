#pragma once

#include <uavmec/policy.hpp>
#include <uavmec/rng.hpp>

#include <memory>
#include <string_view>
#include <vector>

namespace uavmec {

/// Share of decisions HEF sends straight to the MEC.
inline constexpr double kHefMecShare = 0.2;
/// Minimum energy advantage, as a fraction of battery capacity, that justifies offloading.
inline constexpr double kEnergyMarginFraction = 0.01;
/// Minimum backlog advantage (seconds) before QHEF considers another CPU.
inline constexpr double kQueueMarginSeconds = 0.5;

/// Per-UAV cursor into the cycle [other UAVs in index order, then MEC servers].
struct RoundRobinState {
    std::vector<std::size_t> cursor;
};

CpuId round_robin_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot,
                         RoundRobinState& state);

/// Seeded Bernoulli gate deciding when HEF bypasses the energy rule for the MEC.
struct MecGate {
    Rng rng{0};
    double probability = kHefMecShare;
};

CpuId hef_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot, MecGate& gate);

CpuId qhef_decide(const SimConfig& cfg, const Task& task, const NetworkSnapshot& snapshot);

class LocalPolicy final : public Policy {
public:
    std::string name() const override { return "local"; }
    void begin_run(const SimConfig&, std::uint64_t) override {}
    CpuId decide(const Task& task, const NetworkSnapshot&) override { return task.source_uav; }
};

class RoundRobinPolicy final : public Policy {
public:
    std::string name() const override { return "rr"; }
    void begin_run(const SimConfig& cfg, std::uint64_t run_seed) override;
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override;

private:
    const SimConfig* cfg_ = nullptr;
    RoundRobinState state_;
};

class HefPolicy final : public Policy {
public:
    std::string name() const override { return "hef"; }
    void begin_run(const SimConfig& cfg, std::uint64_t run_seed) override;
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override;

private:
    const SimConfig* cfg_ = nullptr;
    MecGate gate_;
};

class QhefPolicy final : public Policy {
public:
    std::string name() const override { return "qhef"; }
    void begin_run(const SimConfig& cfg, std::uint64_t run_seed) override;
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override;

private:
    const SimConfig* cfg_ = nullptr;
};

/// Factory for "local", "rr", "hef" and "qhef". Throws std::invalid_argument otherwise.
PolicyFactory heuristic_policy(std::string_view name);

}  // namespace uavmec
