#include <uavmec/exact.hpp>

#include <uavmec/energy.hpp>
#include <uavmec/io.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace uavmec::exact {

double IlpInstance::idle_remaining() const {
    return energy.battery_capacity - idle_drain_rate(energy) * interval_len * intervals;
}

double IlpInstance::busy_interval_cost() const { return active_extra_rate(energy) * interval_len; }

double default_theta(std::size_t task_count, const EnergyParams& energy) {
    return static_cast<double>(std::max<std::size_t>(task_count, 1)) / (0.01 * energy.battery_capacity);
}

namespace {

int whole_intervals(double seconds, double interval_len, std::string_view what) {
    if (!is_integer_multiple(seconds, interval_len)) {
        throw InstanceError(std::string(what) + " = " + format_double(seconds) +
                            " s is not an integer multiple of interval_len (divisibility)");
    }
    return static_cast<int>(std::lround(seconds / interval_len));
}

int floor_intervals(double seconds, double interval_len) {
    return static_cast<int>(std::floor(seconds / interval_len + 1e-9));
}

}  // namespace

IlpInstance build_instance(const SimConfig& cfg, std::span<const Task> trace, BuildOptions options) {
    if (!(cfg.interval_len > 0.0)) throw InstanceError("interval_len must be positive");
    IlpInstance inst;
    inst.n_uavs = cfg.n_uavs;
    inst.n_mec = cfg.n_mec;
    inst.interval_len = cfg.interval_len;
    inst.energy = effective_energy(cfg);
    inst.weight = cfg.weight;
    inst.intervals = options.intervals.value_or(static_cast<int>(std::ceil(cfg.horizon / cfg.interval_len - 1e-9)));
    if (inst.intervals < 0) throw InstanceError("negative interval count");

    std::set<std::pair<int, int>> occupied;
    int max_proc = 0;
    int max_deadline = 0;
    for (const Task& task : trace) {
        const TaskType& row = cfg.task_catalog.at(task.type);
        IlpTask t;
        t.task_id = task.id;
        t.source = task.source_uav.index;
        t.arrival = floor_intervals(task.arrival_time, cfg.interval_len);
        t.proc_uav = whole_intervals(row.proc_time_uav, cfg.interval_len, "proc_time_uav");
        t.proc_mec = whole_intervals(row.proc_time_mec, cfg.interval_len, "proc_time_mec");
        t.deadline = floor_intervals(row.deadline, cfg.interval_len);
        if (t.arrival >= inst.intervals) {
            throw InstanceError("task " + std::to_string(task.id) + " arrives after the last interval");
        }
        if (!occupied.emplace(t.source, t.arrival).second) {
            throw InstanceError("two tasks arrive at UAV " + std::to_string(t.source) + " in interval " +
                                std::to_string(t.arrival) + "; the model allows one per (UAV, interval)");
        }
        max_proc = std::max({max_proc, t.proc_uav, t.proc_mec});
        max_deadline = std::max(max_deadline, t.deadline);
        inst.tasks.push_back(t);
    }
    inst.theta = cfg.theta.value_or(default_theta(inst.tasks.size(), inst.energy));
    inst.big_m = std::max(inst.intervals + max_proc, max_deadline) + 1;
    return inst;
}

Schedule::Schedule(std::size_t tasks, int cpus, int intervals)
    : tasks_(tasks), cpus_(cpus), intervals_(intervals) {
    const std::size_t cells = tasks * static_cast<std::size_t>(cpus) * static_cast<std::size_t>(intervals);
    x_.assign(tasks * static_cast<std::size_t>(cpus), 0);
    p_.assign(cells, 0);
    p_start_.assign(cells, 0);
    p_end_.assign(cells, 0);
    v_.assign(tasks, 0);
}

Schedule make_schedule(const IlpInstance& inst, std::span<const Placement> placements) {
    if (placements.size() != inst.tasks.size()) {
        throw std::invalid_argument("make_schedule: one placement per task required");
    }
    Schedule s(inst.tasks.size(), inst.n_cpus(), inst.intervals);
    for (std::size_t i = 0; i < placements.size(); ++i) {
        const Placement& pl = placements[i];
        if (pl.cpu < 0 || pl.cpu >= inst.n_cpus()) throw std::invalid_argument("make_schedule: bad CPU");
        const int len = inst.proc(i, pl.cpu);
        s.x(i, pl.cpu) = 1;
        for (int t = pl.start; t < pl.start + len; ++t) {
            if (t < 0 || t >= inst.intervals) throw std::invalid_argument("make_schedule: block outside horizon");
            s.p(i, pl.cpu, t) = 1;
        }
        s.p_start(i, pl.cpu, pl.start) = 1;
        if (pl.start + len < inst.intervals) s.p_end(i, pl.cpu, pl.start + len) = 1;
        const int delay = pl.start - inst.tasks[i].arrival + len;
        s.v(i) = delay > inst.tasks[i].deadline ? 1 : 0;
    }
    return s;
}

Schedule schedule_from_outcomes(const IlpInstance& inst, std::span<const TaskOutcome> outcomes) {
    std::map<std::int64_t, const TaskOutcome*> by_id;
    for (const TaskOutcome& o : outcomes) by_id[o.task_id] = &o;
    std::vector<Placement> placements;
    placements.reserve(inst.tasks.size());
    for (const IlpTask& t : inst.tasks) {
        auto it = by_id.find(t.task_id);
        if (it == by_id.end()) {
            throw std::invalid_argument("schedule_from_outcomes: no outcome for task " + std::to_string(t.task_id));
        }
        const double start = it->second->start_time / inst.interval_len;
        if (std::abs(start - std::round(start)) > 1e-6) {
            throw std::invalid_argument("schedule_from_outcomes: start time off the interval grid");
        }
        placements.push_back(Placement{it->second->assigned_cpu.index, static_cast<int>(std::lround(start))});
    }
    return make_schedule(inst, placements);
}

std::vector<int> delays(const IlpInstance& inst, const Schedule& s) {
    std::vector<int> out(inst.tasks.size(), 0);
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        int delay = -inst.tasks[i].arrival;
        for (int c = 0; c < inst.n_cpus(); ++c) {
            delay += s.x(i, c) * inst.proc(i, c);
            for (int t = 0; t < inst.intervals; ++t) delay += s.p_start(i, c, t) * t;
        }
        out[i] = delay;
    }
    return out;
}

std::vector<ConstraintViolation> validate(const IlpInstance& inst, const Schedule& s) {
    std::vector<ConstraintViolation> found;
    if (s.tasks() != inst.tasks.size() || s.cpus() != inst.n_cpus() || s.intervals() != inst.intervals) {
        found.push_back({"dimensions", "schedule shape does not match the instance"});
        return found;
    }
    const int cpus = inst.n_cpus();
    const int horizon = inst.intervals;
    auto report = [&found](std::string family, std::string where) {
        found.push_back({std::move(family), std::move(where)});
    };
    auto at = [](std::size_t i, int c, int t) {
        return "task " + std::to_string(i) + " cpu " + std::to_string(c) + " interval " + std::to_string(t);
    };

    const std::vector<int> delay = delays(inst, s);
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const IlpTask& task = inst.tasks[i];
        const std::string tag = "task " + std::to_string(i);
        int allocated = 0;
        int early = 0;
        int required = 0;
        int offloads = 0;
        for (int c = 0; c < cpus; ++c) {
            offloads += s.x(i, c);
            required += s.x(i, c) * inst.proc(i, c);
            for (int t = 0; t < horizon; ++t) {
                const int product = s.p(i, c, t) * s.x(i, c);
                (t >= task.arrival ? allocated : early) += product;
                if (s.p(i, c, t) && !s.x(i, c)) report("allocation_off_selected_cpu", at(i, c, t));
            }
        }
        if (offloads == 0 || allocated != required) report("allocation", tag);
        if (early != 0) report("no_early_allocation", tag);
        if (offloads > 1) report("single_offload", tag);

        if (task.deadline < delay[i] - inst.big_m * s.v(i)) report("violation_lower", tag);
        if (task.deadline > delay[i] + inst.big_m * (1 - s.v(i))) report("violation_upper", tag);

        for (int t = 0; t < horizon; ++t) {
            int p = 0, ps = 0, pe = 0;
            for (int c = 0; c < cpus; ++c) {
                p += s.p(i, c, t);
                ps += s.p_start(i, c, t);
                pe += s.p_end(i, c, t);
            }
            if (p > 1 || ps > 1 || pe > 1) report("single_cpu_per_interval", tag + " interval " + std::to_string(t));
        }

        for (int c = 0; c < cpus; ++c) {
            if (horizon > 0 && s.p(i, c, 0) != s.p_start(i, c, 0)) report("initial_interval", at(i, c, 0));
            int starts = 0, ends = 0;
            for (int t = 0; t < horizon; ++t) {
                starts += s.p_start(i, c, t);
                ends += s.p_end(i, c, t);
                if (s.p_start(i, c, t) + s.p_end(i, c, t) > 1) report("start_end_exclusive", at(i, c, t));
                if (t + 1 < horizon) {
                    const int lhs = s.p(i, c, t + 1);
                    const int rhs = s.p(i, c, t) + s.p_start(i, c, t + 1) - s.p_end(i, c, t + 1);
                    if (lhs != rhs) report("contiguity_chain", at(i, c, t + 1));
                }
            }
            if (starts > 1) report("single_start", at(i, c, 0));
            if (ends > 1) report("single_end", at(i, c, 0));
        }
    }

    for (int c = 0; c < cpus; ++c) {
        for (int t = 0; t < horizon; ++t) {
            int p = 0, ps = 0, pe = 0;
            for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
                p += s.p(i, c, t);
                ps += s.p_start(i, c, t);
                pe += s.p_end(i, c, t);
            }
            if (p > 1 || ps > 1 || pe > 1) {
                report("cpu_interval_capacity", "cpu " + std::to_string(c) + " interval " + std::to_string(t));
            }
        }
    }
    return found;
}

std::vector<double> remaining_energy(const IlpInstance& inst, const Schedule& s) {
    std::vector<double> out(static_cast<std::size_t>(inst.n_uavs), inst.idle_remaining());
    for (int j = 0; j < inst.n_uavs; ++j) {
        long busy = 0;
        for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
            for (int t = 0; t < inst.intervals; ++t) busy += s.p(i, j, t);
        }
        out[static_cast<std::size_t>(j)] -= inst.busy_interval_cost() * static_cast<double>(busy);
    }
    return out;
}

int violation_count(const Schedule& s) {
    int total = 0;
    for (std::size_t i = 0; i < s.tasks(); ++i) total += s.v(i);
    return total;
}

double objective(const IlpInstance& inst, const Schedule& s) {
    const auto problems = validate(inst, s);
    if (!problems.empty()) {
        throw InfeasibleSchedule("objective: schedule violates " + problems.front().family + " (" +
                                 problems.front().where + ")");
    }
    const auto energy = remaining_energy(inst, s);
    const double min_energy = energy.empty() ? 0.0 : *std::min_element(energy.begin(), energy.end());
    return inst.weight * min_energy - (1.0 - inst.weight) / inst.theta * violation_count(s);
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unknown: return "unknown";
    }
    return "unknown";
}

std::string solution_dump(const IlpInstance& inst, const SolveResult& result) {
    std::ostringstream out;
    out << "# uavmec exact solution\n";
    out << "status " << to_string(result.status) << '\n';
    if (!result.message.empty()) out << "message " << result.message << '\n';
    out << "weight " << format_double(inst.weight) << '\n';
    out << "theta " << format_double(inst.theta) << '\n';
    out << "intervals " << inst.intervals << '\n';
    if (!result.has_schedule()) return out.str();
    out << "objective " << format_double(result.objective) << '\n';
    out << "violations " << result.violations << '\n';
    out << "remaining_energy_pct";
    for (double e : result.remaining_energy) {
        out << ' ' << format_double(100.0 * e / inst.energy.battery_capacity);
    }
    out << '\n';
    out << "task_id,source_uav,arrival_interval,cpu,start_interval,delay_intervals,violated\n";
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const IlpTask& t = inst.tasks[i];
        const Placement& pl = result.placements[i];
        const int delay = pl.start - t.arrival + inst.proc(i, pl.cpu);
        out << t.task_id << ',' << t.source << ',' << t.arrival << ',' << pl.cpu << ',' << pl.start << ',' << delay
            << ',' << static_cast<int>(result.schedule.v(i)) << '\n';
    }
    return out.str();
}

}  // namespace uavmec::exact
