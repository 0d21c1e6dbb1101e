#pragma once

#include <uavmec/exact.hpp>
#include <uavmec/model.hpp>
#include <uavmec/policy.hpp>
#include <uavmec/qlearn.hpp>
#include <uavmec/sim.hpp>

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavmec {

/// Seed of the policy's per-run state for a batch seed; the workload uses the seed itself.
std::uint64_t run_seed_for(std::uint64_t seed);

/// One simulation per seed on the workload generated from that seed. Results
/// are in seed order and do not depend on `threads`. Throws
/// std::invalid_argument on repeated seeds.
std::vector<RunMetrics> run_batch(const SimConfig& cfg, const PolicyFactory& factory,
                                  std::span<const std::uint64_t> seeds, unsigned threads = 1);

struct KpiSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

KpiSummary summarize(std::span<const double> values);

struct PolicySummary {
    std::string policy;
    std::size_t runs = 0;
    KpiSummary min_remaining_pct;
    KpiSummary violation_pct;
    KpiSummary violations;
    KpiSummary total_tasks;
    std::vector<KpiSummary> remaining_pct_per_uav;
    std::size_t exhausted_runs = 0;
};

struct OrderingCheck {
    std::string name;
    bool holds = false;
    std::string detail;
};

struct ComparisonReport {
    std::vector<std::uint64_t> seeds;  // ascending
    std::vector<PolicySummary> policies;
    std::vector<OrderingCheck> orderings;

    const PolicySummary* find(std::string_view policy) const;
    bool all_orderings_hold() const;
};

struct PolicyBatch {
    std::string policy;
    std::vector<RunMetrics> runs;
};

/// Aggregates batches and evaluates which policy wins each KPI. The learned
/// policy is looked up by name ("qlearn"); orderings whose policies are absent
/// are skipped. Throws std::invalid_argument when seed sets or workloads differ.
ComparisonReport compare(std::span<const PolicyBatch> batches, std::string_view learned_policy = "qlearn");

/// One row per run: counts, end time, minimum and per-UAV remaining percentage.
std::string run_metrics_csv(std::span<const RunMetrics> runs);

/// `policy,seed,uav,remaining_pct` rows.
std::string energy_csv(std::span<const PolicyBatch> batches);

/// `policy,seed,total_tasks,violations,violation_pct,offloaded` rows.
std::string violations_csv(std::span<const PolicyBatch> batches);

std::string report_json(const ComparisonReport& report);

struct IlpComparisonRow {
    std::string label;
    std::optional<double> weight;  // empty for the learned policy
    std::vector<double> remaining_pct;
    int violations = 0;
    std::string status;
    bool optimal = true;
};

/// Exact rows for each weight, then the greedy learned policy on the same trace.
std::vector<IlpComparisonRow> ilp_comparison(const SimConfig& cfg, std::span<const Task> trace,
                                             std::shared_ptr<const AgentTables> tables,
                                             std::span<const double> weights,
                                             std::chrono::milliseconds budget_per_solve);

std::string ilp_comparison_csv(std::span<const IlpComparisonRow> rows);

}  // namespace uavmec
