#include "support/fixtures.hpp"

#include <uavmec/rng.hpp>

#include <set>

namespace uavmec::testing {

SimConfig small_config() {
    SimConfig cfg = default_paper_config();
    cfg.n_uavs = 2;
    cfg.n_mec = 1;
    cfg.horizon = 1.0;
    return cfg;
}

Task make_task(std::int64_t id, std::size_t type, int source, double arrival) {
    Task t;
    t.id = id;
    t.type = type;
    t.source_uav = CpuId{source};
    t.arrival_time = arrival;
    return t;
}

exact::IlpInstance random_instance(std::uint64_t seed, int max_tasks, int max_cpus, int max_intervals) {
    Rng rng(derive_seed(seed, "random-instance"));
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };

    exact::IlpInstance inst;
    const int cpus = pick(1, max_cpus);
    inst.n_mec = cpus > 1 ? pick(0, 1) : 0;
    inst.n_uavs = cpus - inst.n_mec;
    inst.intervals = pick(4, max_intervals);
    inst.interval_len = 0.05;
    inst.energy = default_paper_config().energy;
    const int n = pick(1, max_tasks);
    std::set<std::pair<int, int>> taken;
    int max_proc = 0;
    for (int i = 0; i < n; ++i) {
        exact::IlpTask t;
        t.task_id = i;
        t.source = pick(0, inst.n_uavs - 1);
        t.arrival = pick(0, inst.intervals - 1);
        if (!taken.emplace(t.source, t.arrival).second) continue;
        t.proc_uav = pick(1, 3);
        t.proc_mec = pick(1, t.proc_uav);
        t.deadline = pick(1, 6);
        max_proc = std::max({max_proc, t.proc_uav, t.proc_mec});
        inst.tasks.push_back(t);
    }
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) inst.tasks[i].task_id = static_cast<std::int64_t>(i);
    inst.theta = exact::default_theta(inst.tasks.size(), inst.energy);
    int max_deadline = 0;
    for (const exact::IlpTask& t : inst.tasks) max_deadline = std::max(max_deadline, t.deadline);
    inst.big_m = std::max(inst.intervals + max_proc, max_deadline) + 1;
    return inst;
}

std::string data_path(const std::string& name) { return std::string(UAVMEC_TEST_DATA_DIR) + "/" + name; }

}  // namespace uavmec::testing
