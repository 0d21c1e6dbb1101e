#include <uavmec/exact.hpp>
#include <uavmec/policies.hpp>
#include <uavmec/rng.hpp>
#include <uavmec/sim.hpp>

#include "support/exhaustive.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace uavmec;
using namespace uavmec::exact;
using uavmec::testing::make_task;

namespace {

bool has_family(const std::vector<ConstraintViolation>& found, const std::string& family) {
    return std::any_of(found.begin(), found.end(), [&](const ConstraintViolation& v) { return v.family == family; });
}

IlpInstance two_task_instance() {
    IlpInstance inst;
    inst.intervals = 8;
    inst.n_uavs = 2;
    inst.n_mec = 1;
    inst.energy = default_paper_config().energy;
    inst.interval_len = 0.05;
    inst.tasks = {IlpTask{0, 0, 1, 2, 1, 3}, IlpTask{1, 1, 2, 3, 2, 2}};
    inst.theta = default_theta(inst.tasks.size(), inst.energy);
    inst.big_m = inst.intervals + 4;
    return inst;
}

// Grid-aligned trace: at most one arrival per (UAV, interval).
std::vector<Task> grid_trace(const SimConfig& cfg, std::uint64_t seed, double density) {
    Rng rng(seed);
    std::vector<Task> trace;
    const int intervals = static_cast<int>(std::lround(cfg.horizon / cfg.interval_len));
    for (int k = 0; k < intervals; ++k) {
        for (int j = 0; j < cfg.n_uavs; ++j) {
            if (rng.uniform01() >= density) continue;
            trace.push_back(make_task(static_cast<std::int64_t>(trace.size()), rng.below(cfg.task_catalog.size()), j,
                                      k * cfg.interval_len));
        }
    }
    return trace;
}

// Random schedule that respects arrivals, the horizon and CPU capacity.
std::optional<std::vector<Placement>> random_placements(const IlpInstance& inst, Rng& rng) {
    std::vector<std::vector<bool>> used(static_cast<std::size_t>(inst.n_cpus()),
                                        std::vector<bool>(static_cast<std::size_t>(inst.intervals), false));
    std::vector<Placement> out;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        std::vector<Placement> options;
        for (int c = 0; c < inst.n_cpus(); ++c) {
            const int len = inst.proc(i, c);
            for (int s = inst.tasks[i].arrival; s + len <= inst.intervals; ++s) {
                bool free = true;
                for (int t = s; t < s + len; ++t) free = free && !used[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
                if (free) options.push_back({c, s});
            }
        }
        if (options.empty()) return std::nullopt;
        const Placement pick = options[rng.below(options.size())];
        for (int t = pick.start; t < pick.start + inst.proc(i, pick.cpu); ++t) {
            used[static_cast<std::size_t>(pick.cpu)][static_cast<std::size_t>(t)] = true;
        }
        out.push_back(pick);
    }
    return out;
}

}  // namespace

TEST(BuildInstance, FloorsArrivalsAndConvertsTimes) {
    SimConfig cfg = default_paper_config();
    cfg.horizon = 1.0;
    const std::vector<Task> trace{make_task(7, 0, 1, 0.12)};
    const IlpInstance inst = build_instance(cfg, trace);
    EXPECT_EQ(inst.intervals, 20);
    ASSERT_EQ(inst.tasks.size(), 1u);
    const IlpTask& t = inst.tasks[0];
    EXPECT_EQ(t.task_id, 7);
    EXPECT_EQ(t.source, 1);
    EXPECT_EQ(t.arrival, 2);
    EXPECT_EQ(t.proc_uav, 2);
    EXPECT_EQ(t.proc_mec, 1);
    EXPECT_EQ(t.deadline, 6);
    EXPECT_DOUBLE_EQ(inst.theta, 1.0 / 5.7);
    EXPECT_EQ(inst.big_m, 20 + 2 + 1);
}

TEST(BuildInstance, BigMCoversLongDeadlines) {
    SimConfig cfg = default_paper_config();
    cfg.horizon = 0.5;
    const std::vector<Task> trace{make_task(0, 2, 0, 0.0)};
    const IlpInstance inst = build_instance(cfg, trace);
    EXPECT_EQ(inst.tasks[0].deadline, 100);
    EXPECT_EQ(inst.big_m, 101);
    // A prompt GM task must be representable with v = 0.
    const Schedule s = make_schedule(inst, std::vector<Placement>{{0, 0}});
    EXPECT_EQ(s.v(0), 0);
    EXPECT_TRUE(validate(inst, s).empty());
}

TEST(BuildInstance, ExplicitThetaAndIntervals) {
    SimConfig cfg = default_paper_config();
    cfg.theta = 0.5;
    const std::vector<Task> trace{make_task(0, 1, 0, 0.0)};
    const IlpInstance inst = build_instance(cfg, trace, BuildOptions{30});
    EXPECT_EQ(inst.intervals, 30);
    EXPECT_EQ(inst.theta, 0.5);
    EXPECT_EQ(inst.tasks[0].proc_uav, 10);
    EXPECT_EQ(inst.tasks[0].deadline, 16);
}

TEST(BuildInstance, Errors) {
    SimConfig cfg = default_paper_config();
    EXPECT_THROW(build_instance(cfg, std::vector<Task>{make_task(0, 0, 0, 0.01), make_task(1, 1, 0, 0.04)}),
                 InstanceError);
    EXPECT_THROW(build_instance(cfg, std::vector<Task>{make_task(0, 0, 0, 4.0)}), InstanceError);
    cfg.interval_len = 0.03;
    EXPECT_THROW(build_instance(cfg, std::vector<Task>{make_task(0, 0, 0, 0.0)}), InstanceError);
    EXPECT_NO_THROW(build_instance(default_paper_config(),
                                   std::vector<Task>{make_task(0, 0, 0, 0.01), make_task(1, 1, 1, 0.04)}));
}

TEST(DefaultTheta, OneViolationWeighsOnePercentPerTask) {
    const EnergyParams e = default_paper_config().energy;
    EXPECT_DOUBLE_EQ(default_theta(10, e), 10.0 / 5.7);
    EXPECT_DOUBLE_EQ(default_theta(0, e), 1.0 / 5.7);
}

TEST(MakeSchedule, VariablesOfOnePlacement) {
    const IlpInstance inst = two_task_instance();
    const std::vector<Placement> pl{{0, 1}, {2, 6}};
    const Schedule s = make_schedule(inst, pl);
    EXPECT_EQ(s.x(0, 0), 1);
    EXPECT_EQ(s.x(0, 1), 0);
    EXPECT_EQ(s.p(0, 0, 1), 1);
    EXPECT_EQ(s.p(0, 0, 2), 1);
    EXPECT_EQ(s.p(0, 0, 3), 0);
    EXPECT_EQ(s.p_start(0, 0, 1), 1);
    EXPECT_EQ(s.p_end(0, 0, 3), 1);
    EXPECT_EQ(s.v(0), 0);
    // Task 1 reaches the horizon: no end marker, delay 6 - 2 + 2 = 6 > 2.
    EXPECT_EQ(s.p(1, 2, 7), 1);
    for (int t = 0; t < inst.intervals; ++t) EXPECT_EQ(s.p_end(1, 2, t), 0);
    EXPECT_EQ(s.v(1), 1);
    EXPECT_EQ(delays(inst, s), (std::vector<int>{2, 6}));
    EXPECT_TRUE(validate(inst, s).empty());
    EXPECT_EQ(violation_count(s), 1);
}

TEST(MakeSchedule, RejectsBadPlacements) {
    const IlpInstance inst = two_task_instance();
    EXPECT_THROW(make_schedule(inst, std::vector<Placement>{{0, 1}}), std::invalid_argument);
    EXPECT_THROW(make_schedule(inst, std::vector<Placement>{{0, 1}, {3, 2}}), std::invalid_argument);
    EXPECT_THROW(make_schedule(inst, std::vector<Placement>{{0, 7}, {2, 2}}), std::invalid_argument);
}

TEST(Validate, EachFamilyDetectsItsMutation) {
    const IlpInstance inst = two_task_instance();
    const std::vector<Placement> pl{{0, 1}, {1, 2}};
    const Schedule good = make_schedule(inst, pl);
    ASSERT_TRUE(validate(inst, good).empty());

    Schedule s = good;
    s.x(0, 0) = 0;
    EXPECT_TRUE(has_family(validate(inst, s), "allocation"));
    EXPECT_TRUE(has_family(validate(inst, s), "allocation_off_selected_cpu"));

    s = make_schedule(inst, std::vector<Placement>{{0, 0}, {1, 2}});
    EXPECT_TRUE(has_family(validate(inst, s), "no_early_allocation"));

    s = make_schedule(inst, std::vector<Placement>{{0, 2}, {0, 3}});
    EXPECT_TRUE(has_family(validate(inst, s), "cpu_interval_capacity"));

    s = good;
    s.x(0, 2) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "single_offload"));

    s = good;
    s.v(0) = 1;  // delay 2 meets the deadline of 3
    EXPECT_TRUE(has_family(validate(inst, s), "violation_upper"));

    s = make_schedule(inst, std::vector<Placement>{{0, 1}, {1, 5}});
    s.v(1) = 0;
    EXPECT_TRUE(has_family(validate(inst, s), "violation_lower"));

    s = good;
    s.p(0, 0, 2) = 0;
    EXPECT_TRUE(has_family(validate(inst, s), "contiguity_chain"));

    s = good;
    s.p_end(0, 0, 1) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "start_end_exclusive"));

    s = make_schedule(inst, std::vector<Placement>{{0, 1}, {1, 2}});
    s.p(0, 1, 0) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "initial_interval"));

    s = good;
    s.p_start(0, 0, 5) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "single_start"));

    s = good;
    s.p_end(0, 0, 6) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "single_end"));

    s = good;
    s.p(0, 1, 1) = 1;
    EXPECT_TRUE(has_family(validate(inst, s), "single_cpu_per_interval"));

    EXPECT_TRUE(has_family(validate(inst, Schedule(1, 1, 1)), "dimensions"));
}

TEST(Validate, RandomFeasibleSchedulesPassAndSingleFlipsFail) {
    Rng rng(77);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const IlpInstance inst = uavmec::testing::random_instance(seed, 6, 4, 12);
        const auto pl = random_placements(inst, rng);
        if (!pl) continue;
        const Schedule s = make_schedule(inst, *pl);
        ASSERT_TRUE(validate(inst, s).empty()) << "seed " << seed;
        ++checked;
        for (int flip = 0; flip < 20; ++flip) {
            Schedule m = s;
            const std::size_t i = rng.below(inst.tasks.size());
            const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.n_cpus())));
            const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.intervals)));
            switch (rng.below(3)) {
            case 0: m.p(i, c, t) ^= 1; break;
            case 1: m.p_start(i, c, t) ^= 1; break;
            default:
                if (t == 0) continue;
                m.p_end(i, c, t) ^= 1;
            }
            EXPECT_FALSE(validate(inst, m).empty()) << "seed " << seed << " flip " << flip;
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(RemainingEnergy, IdleAndBusyIntervals) {
    const IlpInstance inst = two_task_instance();
    const Schedule s = make_schedule(inst, std::vector<Placement>{{0, 1}, {0, 3}});
    const auto e = remaining_energy(inst, s);
    const double idle = 570.0 - 4548.0 / 3600.0 * 0.05 * 8;
    EXPECT_NEAR(e[0], idle - 8640.0 / 3600.0 * 0.05 * 5, 1e-12);
    EXPECT_NEAR(e[1], idle, 1e-12);
    EXPECT_THROW(objective(inst, make_schedule(inst, std::vector<Placement>{{0, 1}, {0, 2}})), InfeasibleSchedule);
}

TEST(SimulatedSchedules, SatisfyEveryConstraintAndAgree) {
    SimConfig cfg = default_paper_config();
    cfg.n_uavs = 3;
    cfg.horizon = 1.0;
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const std::vector<Task> trace = grid_trace(cfg, seed, 0.25);
        for (const std::string name : {"local", "rr", "hef", "qhef"}) {
            auto policy = heuristic_policy(name)();
            const RunMetrics m = run(cfg, trace, *policy, seed);
            const int intervals = static_cast<int>(std::lround(m.end_time / cfg.interval_len));
            const IlpInstance inst = build_instance(cfg, trace, BuildOptions{intervals});
            const Schedule s = schedule_from_outcomes(inst, m.outcomes);
            const auto problems = validate(inst, s);
            ASSERT_TRUE(problems.empty()) << name << " seed " << seed << ": " << problems.front().family << " "
                                          << problems.front().where;
            EXPECT_EQ(static_cast<std::size_t>(violation_count(s)), m.violations);
            const auto energy = remaining_energy(inst, s);
            for (int j = 0; j < cfg.n_uavs; ++j) {
                EXPECT_NEAR(100.0 * energy[static_cast<std::size_t>(j)] / cfg.energy.battery_capacity,
                            m.remaining_percentage[static_cast<std::size_t>(j)], 1e-9);
            }
            ++checked;
        }
    }
    EXPECT_EQ(checked, 60);
}

TEST(SimulatedSchedules, OffGridStartsAreRejected) {
    SimConfig cfg = default_paper_config();
    const std::vector<Task> trace{make_task(0, 0, 0, 0.0)};
    const IlpInstance inst = build_instance(cfg, trace);
    TaskOutcome o;
    o.task_id = 0;
    o.assigned_cpu = CpuId{0};
    o.start_time = 0.07;
    EXPECT_THROW(schedule_from_outcomes(inst, std::vector<TaskOutcome>{o}), std::invalid_argument);
    EXPECT_THROW(schedule_from_outcomes(inst, std::vector<TaskOutcome>{}), std::invalid_argument);
}

class SolverOracle : public ::testing::TestWithParam<double> {};

TEST_P(SolverOracle, MatchesExhaustiveEnumeration) {
    const double weight = GetParam();
    int feasible = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        IlpInstance inst = uavmec::testing::random_instance(seed);
        inst.weight = weight;
        const auto frontier = uavmec::testing::enumerate_frontier(inst);
        const auto oracle = uavmec::testing::oracle_optimum(inst, frontier, weight);
        const SolveResult r = solve(inst);
        if (!oracle.feasible) {
            EXPECT_EQ(r.status, SolveStatus::Infeasible) << "seed " << seed;
            continue;
        }
        ++feasible;
        ASSERT_EQ(r.status, SolveStatus::Optimal) << "seed " << seed;
        EXPECT_NEAR(r.objective, oracle.objective, 1e-9) << "seed " << seed;
        EXPECT_TRUE(validate(inst, r.schedule).empty()) << "seed " << seed;
        EXPECT_NEAR(objective(inst, r.schedule), r.objective, 1e-9);
        EXPECT_EQ(r.violations, violation_count(r.schedule));
        EXPECT_EQ(r.schedule, make_schedule(inst, r.placements));
    }
    EXPECT_GE(feasible, 40);
}

INSTANTIATE_TEST_SUITE_P(Weights, SolverOracle, ::testing::Values(0.0, 0.5, 1.0));

TEST(Solver, WeightTradesViolationsForEnergy) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        IlpInstance inst = uavmec::testing::random_instance(seed, 6, 3, 10);
        std::optional<SolveResult> previous;
        for (double w : {0.05, 0.3, 0.7, 1.0}) {
            inst.weight = w;
            const SolveResult r = solve(inst);
            if (r.status == SolveStatus::Infeasible) break;
            ASSERT_EQ(r.status, SolveStatus::Optimal);
            const double min_e = *std::min_element(r.remaining_energy.begin(), r.remaining_energy.end());
            if (previous) {
                const double prev_e =
                    *std::min_element(previous->remaining_energy.begin(), previous->remaining_energy.end());
                EXPECT_GE(r.violations, previous->violations) << "seed " << seed << " w " << w;
                EXPECT_GE(min_e, prev_e - 1e-9) << "seed " << seed << " w " << w;
            }
            previous = r;
        }
    }
}

TEST(Solver, InfeasibleWhenTaskCannotFinish) {
    IlpInstance inst = two_task_instance();
    inst.tasks[1].arrival = 7;
    const SolveResult r = solve(inst);
    EXPECT_EQ(r.status, SolveStatus::Infeasible);
    EXPECT_FALSE(r.has_schedule());
    EXPECT_FALSE(r.message.empty());
}

TEST(Solver, InfeasibleWhenCapacityRunsOut) {
    IlpInstance inst;
    inst.intervals = 2;
    inst.n_uavs = 2;
    inst.energy = default_paper_config().energy;
    inst.interval_len = 0.05;
    inst.tasks = {IlpTask{0, 0, 0, 2, 2, 5}, IlpTask{1, 1, 0, 2, 2, 5}, IlpTask{2, 0, 1, 1, 1, 5}};
    inst.theta = 1.0;
    inst.big_m = 5;
    EXPECT_EQ(solve(inst).status, SolveStatus::Infeasible);
}

TEST(Solver, ExhaustedBudgetIsNeverOptimal) {
    SimConfig cfg = default_paper_config();
    cfg.horizon = 2.0;
    // Arrivals in the first half leave room to finish, so the instance is feasible but too big to close early.
    std::vector<Task> trace;
    for (Task t : grid_trace(cfg, 3, 0.3)) {
        if (t.arrival_time >= cfg.horizon / 2) continue;
        t.id = static_cast<std::int64_t>(trace.size());
        trace.push_back(t);
    }
    const IlpInstance inst = build_instance(cfg, trace);
    ASSERT_GE(inst.tasks.size(), 12u);
    const SolveResult r = solve(inst, std::chrono::milliseconds(0));
    EXPECT_TRUE(r.status == SolveStatus::Feasible || r.status == SolveStatus::Unknown);
    if (r.has_schedule()) EXPECT_TRUE(validate(inst, r.schedule).empty());
}

TEST(Solver, EmptyInstanceIsIdleOptimum) {
    IlpInstance inst = two_task_instance();
    inst.tasks.clear();
    const SolveResult r = solve(inst);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.objective, 0.5 * inst.idle_remaining());
}

TEST(SolutionDump, ListsEveryTask) {
    const IlpInstance inst = two_task_instance();
    const SolveResult r = solve(inst);
    const std::string dump = solution_dump(inst, r);
    EXPECT_NE(dump.find("status optimal"), std::string::npos);
    EXPECT_NE(dump.find("task_id,source_uav,arrival_interval,cpu,start_interval,delay_intervals,violated\n0,"),
              std::string::npos);
    EXPECT_EQ(to_string(SolveStatus::Infeasible), "infeasible");
}
