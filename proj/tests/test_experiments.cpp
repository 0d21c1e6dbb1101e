#include <uavmec/experiments.hpp>
#include <uavmec/io.hpp>
#include <uavmec/policies.hpp>
#include <uavmec/rng.hpp>

#include "support/fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

using namespace uavmec;

namespace {

const std::vector<std::uint64_t> kSeeds{3, 1, 2};

RunMetrics fake_run(const std::string& policy, std::uint64_t seed, double min_pct, std::size_t violations,
                    std::size_t tasks = 100) {
    RunMetrics m;
    m.policy = policy;
    m.seed = seed;
    m.total_tasks = tasks;
    m.violations = violations;
    m.remaining_percentage = {min_pct, min_pct + 1.0};
    m.exhaustion_time = {std::nullopt, std::nullopt};
    m.workload_hash = seed * 17;
    return m;
}

PolicyBatch fake_batch(const std::string& policy, double min_pct, std::size_t violations) {
    PolicyBatch b{policy, {}};
    for (std::uint64_t seed : {1, 2}) b.runs.push_back(fake_run(policy, seed, min_pct, violations));
    return b;
}

}  // namespace

TEST(RunBatch, SeedOrderAndWorkloadFromSeed) {
    const SimConfig cfg = uavmec::testing::small_config();
    const auto runs = run_batch(cfg, heuristic_policy("rr"), kSeeds);
    ASSERT_EQ(runs.size(), 3u);
    for (std::size_t i = 0; i < kSeeds.size(); ++i) {
        EXPECT_EQ(runs[i].seed, kSeeds[i]);
        const auto workload = generate_workload(cfg, kSeeds[i]);
        EXPECT_EQ(runs[i].workload_hash, workload_hash(workload));
        auto policy = heuristic_policy("rr")();
        RunMetrics direct = run(cfg, workload, *policy, run_seed_for(kSeeds[i]));
        direct.seed = kSeeds[i];
        EXPECT_EQ(runs[i], direct);
    }
}

TEST(RunBatch, ThreadCountDoesNotChangeResults) {
    const SimConfig cfg = default_paper_config();
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(run_batch(cfg, heuristic_policy("hef"), seeds, 1), run_batch(cfg, heuristic_policy("hef"), seeds, 4));
}

TEST(RunBatch, RejectsRepeatedSeedsAndPropagatesFailures) {
    const SimConfig cfg = uavmec::testing::small_config();
    const std::vector<std::uint64_t> repeated{1, 2, 1};
    EXPECT_THROW(run_batch(cfg, heuristic_policy("rr"), repeated), std::invalid_argument);
    const std::vector<std::uint64_t> seeds{1, 2};
    const PolicyFactory broken = [] {
        return std::make_unique<uavmec::testing::ScriptedPolicy>(
            [](const Task&, const NetworkSnapshot&) { return CpuId{99}; });
    };
    EXPECT_ANY_THROW(run_batch(cfg, broken, seeds, 2));
    EXPECT_TRUE(run_batch(cfg, heuristic_policy("rr"), std::vector<std::uint64_t>{}).empty());
}

TEST(Summarize, SampleStandardDeviation) {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const KpiSummary s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 5.0);
    EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7.0), 1e-12);
    EXPECT_EQ(summarize(std::vector<double>{3.0}).stddev, 0.0);
    EXPECT_EQ(summarize(std::vector<double>{}).mean, 0.0);
}

TEST(Compare, OrderingsFollowMeans) {
    const std::vector<PolicyBatch> batches{fake_batch("rr", 90, 30), fake_batch("hef", 91, 25),
                                           fake_batch("qhef", 92, 20), fake_batch("qlearn", 93, 10)};
    const ComparisonReport r = compare(batches);
    EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{1, 2}));
    ASSERT_EQ(r.orderings.size(), 3u);
    EXPECT_TRUE(r.all_orderings_hold());
    ASSERT_NE(r.find("qlearn"), nullptr);
    EXPECT_DOUBLE_EQ(r.find("qlearn")->min_remaining_pct.mean, 93.0);
    EXPECT_DOUBLE_EQ(r.find("qlearn")->violation_pct.mean, 10.0);
    ASSERT_EQ(r.find("rr")->remaining_pct_per_uav.size(), 2u);
    EXPECT_DOUBLE_EQ(r.find("rr")->remaining_pct_per_uav[1].mean, 91.0);
    EXPECT_EQ(r.find("local"), nullptr);
}

TEST(Compare, FailingOrderingsAreReported) {
    const std::vector<PolicyBatch> batches{fake_batch("rr", 90, 10), fake_batch("hef", 91, 25),
                                           fake_batch("qhef", 95, 20), fake_batch("qlearn", 93, 15)};
    const ComparisonReport r = compare(batches);
    EXPECT_FALSE(r.all_orderings_hold());
    for (const OrderingCheck& c : r.orderings) EXPECT_FALSE(c.holds) << c.name;
    EXPECT_NE(r.orderings[0].detail.find("qhef 95"), std::string::npos);
}

TEST(Compare, OrderingsNeedTheirPolicies) {
    const std::vector<PolicyBatch> only_baselines{fake_batch("rr", 90, 10), fake_batch("hef", 91, 25)};
    EXPECT_TRUE(compare(only_baselines).orderings.empty());
    EXPECT_TRUE(compare(std::vector<PolicyBatch>{}).policies.empty());
}

TEST(Compare, RejectsMismatchedRuns) {
    std::vector<PolicyBatch> batches{fake_batch("rr", 90, 10), fake_batch("hef", 91, 25)};
    batches[1].runs[1].seed = 5;
    EXPECT_THROW(compare(batches), std::invalid_argument);
    batches = {fake_batch("rr", 90, 10), fake_batch("hef", 91, 25)};
    batches[1].runs[0].workload_hash = 1;
    EXPECT_THROW(compare(batches), std::invalid_argument);
    batches = {fake_batch("rr", 90, 10), PolicyBatch{"hef", {}}};
    EXPECT_THROW(compare(batches), std::invalid_argument);
}

TEST(Compare, RealBatchesShareWorkloads) {
    const SimConfig cfg = default_paper_config();
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<PolicyBatch> batches;
    for (const std::string name : {"local", "rr", "hef", "qhef"}) {
        batches.push_back({name, run_batch(cfg, heuristic_policy(name), seeds)});
    }
    const ComparisonReport r = compare(batches);
    EXPECT_EQ(r.policies.size(), 4u);
    EXPECT_EQ(r.find("local")->total_tasks.mean, r.find("qhef")->total_tasks.mean);
    EXPECT_EQ(r.orderings.size(), 1u);
}

TEST(Csv, RunMetricsLayout) {
    RunMetrics m = fake_run("rr", 4, 97.5, 3, 12);
    m.offloaded_tasks = 5;
    m.end_time = 4.25;
    const std::vector<RunMetrics> runs{m};
    EXPECT_EQ(run_metrics_csv(runs),
              "policy,seed,total_tasks,violations,violation_pct,offloaded,end_time,min_remaining_pct,uav0_pct,uav1_pct,"
              "exhausted\nrr,4,12,3,25,5,4.25,97.5,97.5,98.5,0\n");
}

TEST(Csv, EnergyAndViolationsSortedBySeed) {
    PolicyBatch b{"hef", {fake_run("hef", 2, 90, 1), fake_run("hef", 1, 80, 4, 8)}};
    const std::vector<PolicyBatch> batches{b};
    EXPECT_EQ(energy_csv(batches), "policy,seed,uav,remaining_pct\nhef,1,0,80\nhef,1,1,81\nhef,2,0,90\nhef,2,1,91\n");
    EXPECT_EQ(violations_csv(batches),
              "policy,seed,total_tasks,violations,violation_pct,offloaded\nhef,1,8,4,50,0\nhef,2,100,1,1,0\n");
}

TEST(Json, ReportStructure) {
    const std::vector<PolicyBatch> batches{fake_batch("rr", 90, 30), fake_batch("hef", 91, 25),
                                           fake_batch("qhef", 92, 20), fake_batch("qlearn", 93, 10)};
    const auto j = nlohmann::json::parse(report_json(compare(batches)));
    EXPECT_EQ(j["seeds"], nlohmann::json::array({1, 2}));
    ASSERT_EQ(j["policies"].size(), 4u);
    EXPECT_EQ(j["policies"][3]["policy"], "qlearn");
    EXPECT_DOUBLE_EQ(j["policies"][3]["min_remaining_pct"]["mean"].get<double>(), 93.0);
    EXPECT_EQ(j["orderings"][0]["name"], "learned_max_min_energy");
    EXPECT_EQ(j["orderings"][0]["holds"], true);
}

TEST(IlpComparison, ExactRowsThenLearnedRow) {
    const SimConfig cfg = config_from_json(read_file(uavmec::testing::data_path("tiny_config.json")));
    const auto trace = parse_trace(cfg, read_file(uavmec::testing::data_path("tiny_trace.csv")));
    auto tables = std::make_shared<const AgentTables>(make_agent_tables(cfg));
    const std::vector<double> weights{0.0, 1.0};
    const auto rows = ilp_comparison(cfg, trace, tables, weights, std::chrono::milliseconds(10'000));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].label, "exact W=0");
    EXPECT_EQ(rows[1].label, "exact W=1");
    EXPECT_EQ(rows[2].label, "qlearn");
    EXPECT_EQ(rows[0].status, "optimal");
    EXPECT_TRUE(rows[1].optimal);
    EXPECT_EQ(rows[2].status, "simulated");
    EXPECT_FALSE(rows[2].weight.has_value());
    // W = 0 only counts violations, W = 1 only energy.
    EXPECT_LE(rows[0].violations, rows[1].violations);
    const double min0 = *std::min_element(rows[0].remaining_pct.begin(), rows[0].remaining_pct.end());
    const double min1 = *std::min_element(rows[1].remaining_pct.begin(), rows[1].remaining_pct.end());
    EXPECT_GE(min1, min0 - 1e-9);

    const std::string csv = ilp_comparison_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "row,status,optimal,uav0_pct,uav1_pct,violations");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
