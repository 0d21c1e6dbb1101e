#include <uavmec/sim.hpp>

#include <algorithm>
#include <stdexcept>

namespace uavmec {

bool event_before(const Event& a, const Event& b, std::span<const Task> workload) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    const std::int64_t ida = workload[a.task].id;
    const std::int64_t idb = workload[b.task].id;
    if (ida != idb) return ida < idb;
    return a.sequence < b.sequence;
}

double CpuQueue::backlog(double now) const {
    const double residual = in_service ? std::max(0.0, busy_until - now) : 0.0;
    return std::max(0.0, residual + pending_work + in_flight_work);
}

double CpuQueue::busy_seconds(double now) const {
    return busy_completed + (in_service ? std::max(0.0, now - service_start) : 0.0);
}

double RunMetrics::min_remaining_percentage() const {
    if (remaining_percentage.empty()) return 100.0;
    return *std::min_element(remaining_percentage.begin(), remaining_percentage.end());
}

double RunMetrics::violation_percentage() const {
    return total_tasks == 0 ? 0.0 : 100.0 * static_cast<double>(violations) / static_cast<double>(total_tasks);
}

bool RunMetrics::battery_exhausted() const {
    return std::any_of(exhaustion_time.begin(), exhaustion_time.end(),
                       [](const std::optional<double>& t) { return t.has_value(); });
}

double expected_delay(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate) {
    const double latency = candidate == snapshot.receiver ? 0.0 : cfg.offload_latency;
    return snapshot.backlog.at(static_cast<std::size_t>(candidate.index)) + latency +
           cfg.processing_time(task.type, candidate);
}

bool expected_violation(const SimConfig& cfg, const NetworkSnapshot& snapshot, const Task& task, CpuId candidate) {
    return expected_delay(cfg, snapshot, task, candidate) > cfg.task_catalog.at(task.type).deadline + kTimeTolerance;
}

namespace {

class Engine {
public:
    Engine(const SimConfig& cfg, std::span<const Task> workload, Policy& policy)
        : cfg_(cfg), workload_(workload), policy_(policy), energy_(effective_energy(cfg)) {
        queues_.resize(static_cast<std::size_t>(cfg.n_cpus()));
        for (int c = 0; c < cfg.n_cpus(); ++c) {
            queues_[static_cast<std::size_t>(c)].cpu_id = CpuId{c};
        }
        outcomes_.resize(workload.size());
        exhaustion_.resize(static_cast<std::size_t>(cfg.n_uavs));
    }

    RunMetrics execute(std::uint64_t run_seed) {
        policy_.begin_run(cfg_, run_seed);
        for (std::size_t i = 0; i < workload_.size(); ++i) {
            push(Event{workload_[i].arrival_time, EventKind::Arrival, i, workload_[i].source_uav, 0});
        }
        while (!events_.empty()) {
            std::pop_heap(events_.begin(), events_.end(), later_);
            const Event event = events_.back();
            events_.pop_back();
            advance_energy(event.time);
            dispatch(event);
        }
        const double end_time = std::max(cfg_.horizon, clock_);
        advance_energy(end_time);
        policy_.end_run();
        return collect(run_seed, end_time);
    }

private:
    struct Later {
        std::span<const Task> workload;
        bool operator()(const Event& a, const Event& b) const { return event_before(b, a, workload); }
    };

    void push(Event event) {
        event.sequence = next_sequence_++;
        events_.push_back(event);
        std::push_heap(events_.begin(), events_.end(), later_);
    }

    CpuQueue& queue(CpuId cpu) { return queues_[static_cast<std::size_t>(cpu.index)]; }

    double proc(std::size_t task, CpuId cpu) const { return cfg_.processing_time(workload_[task].type, cpu); }

    void dispatch(const Event& event) {
        switch (event.kind) {
        case EventKind::Arrival:
            push(Event{event.time, EventKind::DecisionRequired, event.task, workload_[event.task].source_uav, 0});
            break;
        case EventKind::DecisionRequired: decide(event); break;
        case EventKind::Delivery:
            queue(event.cpu).in_flight_work -= proc(event.task, event.cpu);
            enqueue(event.cpu, event.task, event.time);
            break;
        case EventKind::StartProcessing: start(event.cpu, event.time); break;
        case EventKind::Completion: complete(event.cpu, event.time); break;
        }
    }

    NetworkSnapshot snapshot(double now, CpuId receiver) const {
        NetworkSnapshot snap;
        snap.now = now;
        snap.receiver = receiver;
        snap.backlog.reserve(queues_.size());
        for (const CpuQueue& q : queues_) snap.backlog.push_back(q.backlog(now));
        snap.remaining_energy.reserve(static_cast<std::size_t>(cfg_.n_uavs));
        for (int j = 0; j < cfg_.n_uavs; ++j) {
            const CpuQueue& q = queues_[static_cast<std::size_t>(j)];
            snap.remaining_energy.push_back(remaining_energy(energy_, EnergyLedger{q.cpu_id, q.busy_seconds(now), now}));
        }
        return snap;
    }

    void decide(const Event& event) {
        const Task& task = workload_[event.task];
        const CpuId receiver = task.source_uav;
        const CpuId target = policy_.decide(task, snapshot(event.time, receiver));
        if (!cfg_.is_valid_cpu(target)) {
            throw std::logic_error("policy '" + policy_.name() + "' returned an invalid CPU index " +
                                   std::to_string(target.index));
        }
        outcomes_[event.task].assigned_cpu = target;
        if (target == receiver || cfg_.offload_latency <= 0.0) {
            enqueue(target, event.task, event.time);
        } else {
            queue(target).in_flight_work += proc(event.task, target);
            push(Event{event.time + cfg_.offload_latency, EventKind::Delivery, event.task, target, 0});
        }
    }

    void enqueue(CpuId cpu, std::size_t task, double now) {
        CpuQueue& q = queue(cpu);
        q.pending.push_back(task);
        q.pending_work += proc(task, cpu);
        schedule_start(q, now);
    }

    void schedule_start(CpuQueue& q, double now) {
        if (q.in_service || q.start_scheduled || q.pending.empty()) return;
        q.start_scheduled = true;
        push(Event{now, EventKind::StartProcessing, q.pending.front(), q.cpu_id, 0});
    }

    void start(CpuId cpu, double now) {
        CpuQueue& q = queue(cpu);
        q.start_scheduled = false;
        if (q.in_service || q.pending.empty()) return;
        const std::size_t task = q.pending.front();
        q.pending.pop_front();
        const double duration = proc(task, cpu);
        q.pending_work = q.pending.empty() ? 0.0 : q.pending_work - duration;
        q.in_service = task;
        q.service_start = now;
        q.busy_until = now + duration;
        outcomes_[task].start_time = now;
        push(Event{q.busy_until, EventKind::Completion, task, cpu, 0});
    }

    void complete(CpuId cpu, double now) {
        CpuQueue& q = queue(cpu);
        const std::size_t task = *q.in_service;
        q.busy_completed += q.busy_until - q.service_start;
        q.in_service.reset();
        outcomes_[task].completion_time = now;
        schedule_start(q, now);
    }

    // Piecewise-linear battery drain between consecutive events.
    void advance_energy(double t) {
        for (int j = 0; j < cfg_.n_uavs; ++j) {
            auto& exhausted = exhaustion_[static_cast<std::size_t>(j)];
            if (exhausted) continue;
            const CpuQueue& q = queues_[static_cast<std::size_t>(j)];
            const double before = remaining_energy(energy_, EnergyLedger{q.cpu_id, q.busy_seconds(clock_), clock_});
            if (before <= 0.0) {
                exhausted = clock_;
                continue;
            }
            const double after = remaining_energy(energy_, EnergyLedger{q.cpu_id, q.busy_seconds(t), t});
            if (after <= 0.0) {
                exhausted = clock_ + (t - clock_) * before / (before - after);
            }
        }
        clock_ = std::max(clock_, t);
    }

    RunMetrics collect(std::uint64_t run_seed, double end_time) {
        RunMetrics m;
        m.policy = policy_.name();
        m.seed = run_seed;
        m.total_tasks = workload_.size();
        m.end_time = end_time;
        m.violations_per_cpu.assign(queues_.size(), 0);
        m.tasks_per_cpu.assign(queues_.size(), 0);
        m.workload_hash = workload_hash(workload_);
        for (std::size_t i = 0; i < workload_.size(); ++i) {
            TaskOutcome& o = outcomes_[i];
            const Task& task = workload_[i];
            o.task_id = task.id;
            o.total_delay = o.completion_time - task.arrival_time;
            o.violated = o.total_delay > cfg_.task_catalog[task.type].deadline + kTimeTolerance;
            const auto c = static_cast<std::size_t>(o.assigned_cpu.index);
            ++m.tasks_per_cpu[c];
            if (o.violated) {
                ++m.violations;
                ++m.violations_per_cpu[c];
            }
            if (o.assigned_cpu != task.source_uav) ++m.offloaded_tasks;
        }
        m.outcomes = outcomes_;
        std::sort(m.outcomes.begin(), m.outcomes.end(),
                  [](const TaskOutcome& a, const TaskOutcome& b) { return a.task_id < b.task_id; });
        for (const CpuQueue& q : queues_) m.busy_seconds.push_back(q.busy_completed);
        for (int j = 0; j < cfg_.n_uavs; ++j) {
            const CpuQueue& q = queues_[static_cast<std::size_t>(j)];
            m.remaining_percentage.push_back(
                remaining_percentage(energy_, EnergyLedger{q.cpu_id, q.busy_completed, end_time}));
        }
        m.exhaustion_time = exhaustion_;
        return m;
    }

    const SimConfig& cfg_;
    std::span<const Task> workload_;
    Policy& policy_;
    EnergyParams energy_;
    std::vector<CpuQueue> queues_;
    std::vector<TaskOutcome> outcomes_;
    std::vector<std::optional<double>> exhaustion_;
    std::vector<Event> events_;
    Later later_{workload_};
    std::uint64_t next_sequence_ = 0;
    double clock_ = 0.0;
};

}  // namespace

RunMetrics run(const SimConfig& cfg, std::span<const Task> workload, Policy& policy, std::uint64_t run_seed) {
    for (std::size_t i = 1; i < workload.size(); ++i) {
        if (workload[i].arrival_time < workload[i - 1].arrival_time) {
            throw std::invalid_argument("run: workload must be time-ordered");
        }
    }
    for (const Task& t : workload) {
        if (!cfg.is_uav(t.source_uav) || t.type >= cfg.task_catalog.size()) {
            throw std::invalid_argument("run: task " + std::to_string(t.id) + " does not match the config");
        }
    }
    Engine engine(cfg, workload, policy);
    return engine.execute(run_seed);
}

}  // namespace uavmec
