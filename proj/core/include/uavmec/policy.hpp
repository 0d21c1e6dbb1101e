#pragma once

#include <uavmec/model.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace uavmec {

/// Read-only view of the network handed to a deciding UAV.
struct NetworkSnapshot {
    double now = 0.0;
    CpuId receiver{};
    /// Seconds of committed work per CPU: residual service, queued and in-flight tasks.
    std::vector<double> backlog;
    /// Current battery level per UAV, in energy units.
    std::vector<double> remaining_energy;
};

/// Offloading rule invoked once per task by the receiving UAV.
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string name() const = 0;

    /// Called before the first decision of a run; resets per-run state.
    virtual void begin_run(const SimConfig& cfg, std::uint64_t run_seed) = 0;

    virtual CpuId decide(const Task& task, const NetworkSnapshot& snapshot) = 0;

    /// Called after the last event of a run.
    virtual void end_run() {}
};

/// Builds a fresh policy instance, one per run.
using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

}  // namespace uavmec
