#include <uavmec/exact.hpp>
#include <uavmec/policies.hpp>
#include <uavmec/qlearn.hpp>
#include <uavmec/sim.hpp>

#include <benchmark/benchmark.h>

using namespace uavmec;

namespace {

void BM_SimulateHorizon(benchmark::State& state, const char* policy_name) {
    const SimConfig cfg = default_paper_config();
    const auto workload = generate_workload(cfg, 1);
    auto policy = heuristic_policy(policy_name)();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(cfg, workload, *policy, ++seed));
    }
    state.counters["tasks"] = static_cast<double>(workload.size());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(workload.size()));
}
BENCHMARK_CAPTURE(BM_SimulateHorizon, rr, "rr");
BENCHMARK_CAPTURE(BM_SimulateHorizon, qhef, "qhef");

void BM_TrainingEpisodes(benchmark::State& state) {
    const SimConfig cfg = default_paper_config();
    TrainSchedule schedule;
    schedule.episodes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(cfg, schedule, 7));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainingEpisodes)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GreedyEvaluation(benchmark::State& state) {
    const SimConfig cfg = default_paper_config();
    auto tables = std::make_shared<const AgentTables>(train(cfg, TrainSchedule{200}, 3).tables);
    const auto workload = generate_workload(cfg, 2);
    GreedyPolicy policy(tables);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(cfg, workload, policy, 1));
    }
}
BENCHMARK(BM_GreedyEvaluation);

void BM_BranchAndBound(benchmark::State& state) {
    SimConfig cfg = default_paper_config();
    cfg.n_uavs = 2;
    cfg.horizon = 0.5;
    std::vector<Task> trace;
    const int tasks = static_cast<int>(state.range(0));
    for (int k = 0; k < tasks; ++k) {
        Task t;
        t.id = k;
        t.type = static_cast<std::size_t>(k % 3);
        t.source_uav = CpuId{k % 2};
        t.arrival_time = 0.05 * (k / 2);
        trace.push_back(t);
    }
    const auto inst = exact::build_instance(cfg, trace);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact::solve(inst));
    }
}
BENCHMARK(BM_BranchAndBound)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_ExportLp(benchmark::State& state) {
    SimConfig cfg = default_paper_config();
    cfg.horizon = 1.0;
    std::vector<Task> trace;
    for (int k = 0; k < 8; ++k) {
        Task t;
        t.id = k;
        t.type = static_cast<std::size_t>(k % 3);
        t.source_uav = CpuId{k % 4};
        t.arrival_time = 0.1 * k;
        trace.push_back(t);
    }
    const auto full = exact::build_instance(cfg, trace);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact::export_lp(full));
    }
}
BENCHMARK(BM_ExportLp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
