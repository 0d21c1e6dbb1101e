#include <uavmec/experiments.hpp>

#include <uavmec/io.hpp>
#include <uavmec/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace uavmec {

namespace {

constexpr double kOrderingTolerance = 1e-9;

std::vector<std::uint64_t> sorted_seeds(const std::vector<RunMetrics>& runs) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(runs.size());
    for (const RunMetrics& m : runs) seeds.push_back(m.seed);
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

std::vector<const RunMetrics*> by_seed(const std::vector<RunMetrics>& runs) {
    std::vector<const RunMetrics*> out;
    for (const RunMetrics& m : runs) out.push_back(&m);
    std::sort(out.begin(), out.end(), [](const RunMetrics* a, const RunMetrics* b) { return a->seed < b->seed; });
    return out;
}

PolicySummary summarize_batch(const PolicyBatch& batch) {
    PolicySummary s;
    s.policy = batch.policy;
    s.runs = batch.runs.size();
    const auto runs = by_seed(batch.runs);
    std::vector<double> min_pct, viol_pct, viol, tasks;
    std::size_t uavs = 0;
    for (const RunMetrics* m : runs) {
        min_pct.push_back(m->min_remaining_percentage());
        viol_pct.push_back(m->violation_percentage());
        viol.push_back(static_cast<double>(m->violations));
        tasks.push_back(static_cast<double>(m->total_tasks));
        uavs = std::max(uavs, m->remaining_percentage.size());
        if (m->battery_exhausted()) ++s.exhausted_runs;
    }
    s.min_remaining_pct = summarize(min_pct);
    s.violation_pct = summarize(viol_pct);
    s.violations = summarize(viol);
    s.total_tasks = summarize(tasks);
    for (std::size_t j = 0; j < uavs; ++j) {
        std::vector<double> values;
        for (const RunMetrics* m : runs) {
            if (j < m->remaining_percentage.size()) values.push_back(m->remaining_percentage[j]);
        }
        s.remaining_pct_per_uav.push_back(summarize(values));
    }
    return s;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::uint64_t run_seed_for(std::uint64_t seed) { return derive_seed(seed, "run"); }

std::vector<RunMetrics> run_batch(const SimConfig& cfg, const PolicyFactory& factory,
                                  std::span<const std::uint64_t> seeds, unsigned threads) {
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw std::invalid_argument("run_batch: seeds must be distinct");

    std::vector<RunMetrics> results(seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                const auto workload = generate_workload(cfg, seeds[i]);
                auto policy = factory();
                RunMetrics m = run(cfg, workload, *policy, run_seed_for(seeds[i]));
                m.seed = seeds[i];
                results[i] = std::move(m);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

KpiSummary summarize(std::span<const double> values) {
    KpiSummary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

const PolicySummary* ComparisonReport::find(std::string_view policy) const {
    for (const PolicySummary& p : policies) {
        if (p.policy == policy) return &p;
    }
    return nullptr;
}

bool ComparisonReport::all_orderings_hold() const {
    return std::all_of(orderings.begin(), orderings.end(), [](const OrderingCheck& c) { return c.holds; });
}

ComparisonReport compare(std::span<const PolicyBatch> batches, std::string_view learned_policy) {
    ComparisonReport report;
    if (batches.empty()) return report;
    for (const PolicyBatch& b : batches) {
        if (b.runs.empty()) throw std::invalid_argument("compare: policy '" + b.policy + "' has no runs");
    }
    report.seeds = sorted_seeds(batches.front().runs);
    if (std::adjacent_find(report.seeds.begin(), report.seeds.end()) != report.seeds.end()) {
        throw std::invalid_argument("compare: policy '" + batches.front().policy + "' repeats a seed");
    }
    std::map<std::uint64_t, std::uint64_t> workloads;
    for (const RunMetrics& m : batches.front().runs) workloads[m.seed] = m.workload_hash;
    for (const PolicyBatch& b : batches) {
        if (sorted_seeds(b.runs) != report.seeds) {
            throw std::invalid_argument("compare: policy '" + b.policy + "' was run on a different seed set");
        }
        for (const RunMetrics& m : b.runs) {
            if (workloads.at(m.seed) != m.workload_hash) {
                throw std::invalid_argument("compare: policy '" + b.policy + "' saw a different workload for seed " +
                                            std::to_string(m.seed));
            }
        }
        report.policies.push_back(summarize_batch(b));
    }

    const PolicySummary* learned = report.find(learned_policy);
    std::vector<const PolicySummary*> baselines;
    for (std::string_view name : {"rr", "hef", "qhef"}) {
        if (const PolicySummary* p = report.find(name)) baselines.push_back(p);
    }
    if (learned && !baselines.empty()) {
        OrderingCheck energy{"learned_max_min_energy", true, ""};
        OrderingCheck violations{"learned_min_violations", true, ""};
        std::ostringstream e, v;
        e << learned->policy << ' ' << fmt(learned->min_remaining_pct.mean);
        v << learned->policy << ' ' << fmt(learned->violation_pct.mean);
        for (const PolicySummary* b : baselines) {
            energy.holds = energy.holds && learned->min_remaining_pct.mean + kOrderingTolerance >= b->min_remaining_pct.mean;
            violations.holds = violations.holds && learned->violation_pct.mean <= b->violation_pct.mean + kOrderingTolerance;
            e << " vs " << b->policy << ' ' << fmt(b->min_remaining_pct.mean);
            v << " vs " << b->policy << ' ' << fmt(b->violation_pct.mean);
        }
        energy.detail = e.str();
        violations.detail = v.str();
        report.orderings.push_back(energy);
        report.orderings.push_back(violations);
    }
    const PolicySummary* qhef = report.find("qhef");
    const PolicySummary* rr = report.find("rr");
    const PolicySummary* hef = report.find("hef");
    if (qhef && rr && hef) {
        OrderingCheck c{"qhef_fewer_violations_than_rr_hef", false, ""};
        c.holds = qhef->violation_pct.mean <= rr->violation_pct.mean + kOrderingTolerance &&
                  qhef->violation_pct.mean <= hef->violation_pct.mean + kOrderingTolerance;
        c.detail = "qhef " + fmt(qhef->violation_pct.mean) + " vs rr " + fmt(rr->violation_pct.mean) + " vs hef " +
                   fmt(hef->violation_pct.mean);
        report.orderings.push_back(c);
    }
    return report;
}

std::string run_metrics_csv(std::span<const RunMetrics> runs) {
    std::size_t uavs = 0;
    for (const RunMetrics& m : runs) uavs = std::max(uavs, m.remaining_percentage.size());
    std::ostringstream out;
    out << "policy,seed,total_tasks,violations,violation_pct,offloaded,end_time,min_remaining_pct";
    for (std::size_t j = 0; j < uavs; ++j) out << ",uav" << j << "_pct";
    out << ",exhausted\n";
    for (const RunMetrics& m : runs) {
        out << m.policy << ',' << m.seed << ',' << m.total_tasks << ',' << m.violations << ','
            << fmt(m.violation_percentage()) << ',' << m.offloaded_tasks << ',' << fmt(m.end_time) << ','
            << fmt(m.min_remaining_percentage());
        for (std::size_t j = 0; j < uavs; ++j) {
            out << ',';
            if (j < m.remaining_percentage.size()) out << fmt(m.remaining_percentage[j]);
        }
        out << ',' << (m.battery_exhausted() ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string energy_csv(std::span<const PolicyBatch> batches) {
    std::ostringstream out;
    out << "policy,seed,uav,remaining_pct\n";
    for (const PolicyBatch& b : batches) {
        for (const RunMetrics* m : by_seed(b.runs)) {
            for (std::size_t j = 0; j < m->remaining_percentage.size(); ++j) {
                out << b.policy << ',' << m->seed << ',' << j << ',' << fmt(m->remaining_percentage[j]) << '\n';
            }
        }
    }
    return out.str();
}

std::string violations_csv(std::span<const PolicyBatch> batches) {
    std::ostringstream out;
    out << "policy,seed,total_tasks,violations,violation_pct,offloaded\n";
    for (const PolicyBatch& b : batches) {
        for (const RunMetrics* m : by_seed(b.runs)) {
            out << b.policy << ',' << m->seed << ',' << m->total_tasks << ',' << m->violations << ','
                << fmt(m->violation_percentage()) << ',' << m->offloaded_tasks << '\n';
        }
    }
    return out.str();
}

std::string report_json(const ComparisonReport& report) {
    using nlohmann::ordered_json;
    auto kpi = [](const KpiSummary& k) { return ordered_json{{"mean", k.mean}, {"stddev", k.stddev}}; };
    ordered_json root;
    root["seeds"] = report.seeds;
    ordered_json policies = ordered_json::array();
    for (const PolicySummary& p : report.policies) {
        ordered_json per_uav = ordered_json::array();
        for (const KpiSummary& k : p.remaining_pct_per_uav) per_uav.push_back(kpi(k));
        policies.push_back({{"policy", p.policy},
                            {"runs", p.runs},
                            {"min_remaining_pct", kpi(p.min_remaining_pct)},
                            {"violation_pct", kpi(p.violation_pct)},
                            {"violations", kpi(p.violations)},
                            {"total_tasks", kpi(p.total_tasks)},
                            {"remaining_pct_per_uav", per_uav},
                            {"exhausted_runs", p.exhausted_runs}});
    }
    root["policies"] = policies;
    ordered_json orderings = ordered_json::array();
    for (const OrderingCheck& c : report.orderings) {
        orderings.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
    }
    root["orderings"] = orderings;
    return root.dump(2) + "\n";
}

std::vector<IlpComparisonRow> ilp_comparison(const SimConfig& cfg, std::span<const Task> trace,
                                             std::shared_ptr<const AgentTables> tables,
                                             std::span<const double> weights,
                                             std::chrono::milliseconds budget_per_solve) {
    std::vector<IlpComparisonRow> rows;
    for (double w : weights) {
        SimConfig weighted = cfg;
        weighted.weight = w;
        const exact::IlpInstance inst = exact::build_instance(weighted, trace);
        const exact::SolveResult result = exact::solve(inst, budget_per_solve);
        IlpComparisonRow row;
        row.label = "exact W=" + fmt(w);
        row.weight = w;
        row.status = std::string(exact::to_string(result.status));
        row.optimal = result.proven_optimal();
        if (result.has_schedule()) {
            for (double e : result.remaining_energy) row.remaining_pct.push_back(100.0 * e / cfg.energy.battery_capacity);
            row.violations = result.violations;
        }
        rows.push_back(std::move(row));
    }
    if (tables) {
        GreedyPolicy policy(std::move(tables));
        const RunMetrics m = run(cfg, trace, policy, run_seed_for(cfg.seed));
        IlpComparisonRow row;
        row.label = "qlearn";
        row.remaining_pct = m.remaining_percentage;
        row.violations = static_cast<int>(m.violations);
        row.status = "simulated";
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string ilp_comparison_csv(std::span<const IlpComparisonRow> rows) {
    std::ostringstream out;
    std::size_t uavs = 0;
    for (const auto& r : rows) uavs = std::max(uavs, r.remaining_pct.size());
    out << "row,status,optimal";
    for (std::size_t j = 0; j < uavs; ++j) out << ",uav" << j << "_pct";
    out << ",violations\n";
    for (const auto& r : rows) {
        out << r.label << ',' << r.status << ',' << (r.optimal ? 1 : 0);
        for (std::size_t j = 0; j < uavs; ++j) {
            out << ',';
            if (j < r.remaining_pct.size()) out << fmt(r.remaining_pct[j]);
        }
        out << ',' << r.violations << '\n';
    }
    return out.str();
}

}  // namespace uavmec
