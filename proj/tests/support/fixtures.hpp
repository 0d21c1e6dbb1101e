#pragma once

#include <uavmec/exact.hpp>
#include <uavmec/model.hpp>
#include <uavmec/policy.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace uavmec::testing {

/// Two UAVs and one MEC server over one second, paper energy and catalog.
SimConfig small_config();

Task make_task(std::int64_t id, std::size_t type, int source, double arrival);

/// Policy driven by a callback; records every snapshot it was shown.
class ScriptedPolicy final : public Policy {
public:
    using Rule = std::function<CpuId(const Task&, const NetworkSnapshot&)>;

    explicit ScriptedPolicy(Rule rule, std::string name = "scripted") : rule_(std::move(rule)), name_(std::move(name)) {}

    std::string name() const override { return name_; }
    void begin_run(const SimConfig&, std::uint64_t) override { seen.clear(); }
    CpuId decide(const Task& task, const NetworkSnapshot& snapshot) override {
        seen.push_back(snapshot);
        return rule_(task, snapshot);
    }

    std::vector<NetworkSnapshot> seen;

private:
    Rule rule_;
    std::string name_;
};

/// Random exact-model instance: at most `max_tasks` tasks, at most `max_cpus`
/// CPUs and at most `max_intervals` intervals, paper energy constants.
exact::IlpInstance random_instance(std::uint64_t seed, int max_tasks = 5, int max_cpus = 3, int max_intervals = 12);

std::string data_path(const std::string& name);

}  // namespace uavmec::testing
