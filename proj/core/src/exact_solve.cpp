#include <uavmec/exact.hpp>

#include <algorithm>
#include <limits>

namespace uavmec::exact {

namespace {

constexpr double kImprovement = 1e-12;

// Schedules are built as a sequence of (start, cpu) pairs in increasing
// lexicographic order, each task starting as early as its CPU allows. Every
// left-justified schedule has exactly one such sequence, and left-justifying
// never increases a delay or changes busy time, so the search is exact.
class BranchAndBound {
public:
    BranchAndBound(const IlpInstance& inst, std::chrono::milliseconds budget)
        : inst_(inst),
          n_(inst.tasks.size()),
          cpus_(inst.n_cpus()),
          violation_cost_((1.0 - inst.weight) / inst.theta),
          deadline_(std::chrono::steady_clock::now() + budget) {
        free_.assign(static_cast<std::size_t>(cpus_), 0);
        busy_.assign(static_cast<std::size_t>(inst.n_uavs), 0);
        placed_.assign(n_, false);
        current_.assign(n_, Placement{});
    }

    SolveResult run() {
        SolveResult result;
        for (std::size_t i = 0; i < n_; ++i) {
            int shortest = std::numeric_limits<int>::max();
            for (int c = 0; c < cpus_; ++c) shortest = std::min(shortest, inst_.proc(i, c));
            if (cpus_ == 0 || inst_.tasks[i].arrival + shortest > inst_.intervals) {
                result.status = SolveStatus::Infeasible;
                result.message = "task " + std::to_string(inst_.tasks[i].task_id) +
                                 " cannot finish before the horizon on any CPU";
                return result;
            }
        }
        search(0, -1, -1, 0);
        result.nodes = nodes_;
        if (!best_) {
            result.status = timed_out_ ? SolveStatus::Unknown : SolveStatus::Infeasible;
            result.message = timed_out_ ? "time budget exhausted before any schedule was found"
                                        : "no schedule fits every task inside the horizon";
            return result;
        }
        result.status = timed_out_ ? SolveStatus::Feasible : SolveStatus::Optimal;
        result.placements = *best_;
        result.schedule = make_schedule(inst_, result.placements);
        result.remaining_energy = remaining_energy(inst_, result.schedule);
        result.violations = violation_count(result.schedule);
        result.objective = best_score_;
        if (timed_out_) result.message = "time budget exhausted; best schedule found so far";
        return result;
    }

private:
    struct Candidate {
        std::size_t task;
        int cpu;
        int start;
        bool violates;
    };

    double min_energy() const {
        long worst = 0;
        for (long b : busy_) worst = std::max(worst, b);
        return inst_.idle_remaining() - inst_.busy_interval_cost() * static_cast<double>(worst);
    }

    double score(int violations) const { return inst_.weight * min_energy() - violation_cost_ * violations; }

    // Earliest start of `task` on `cpu` consistent with the sequence order so far.
    int earliest_start(std::size_t task, int cpu, int last_start, int last_cpu) const {
        int start = std::max(inst_.tasks[task].arrival, free_[static_cast<std::size_t>(cpu)]);
        if (start < last_start || (start == last_start && cpu <= last_cpu)) {
            start = cpu > last_cpu ? last_start : last_start + 1;
            start = std::max(start, free_[static_cast<std::size_t>(cpu)]);
        }
        return start;
    }

    bool out_of_time() {
        if ((++nodes_ & 0x3ff) == 0 && std::chrono::steady_clock::now() > deadline_) timed_out_ = true;
        return timed_out_;
    }

    void search(std::size_t depth, int last_start, int last_cpu, int violations) {
        if (out_of_time()) return;
        if (depth == n_) {
            const double value = score(violations);
            if (!best_ || value > best_score_ + kImprovement) {
                best_score_ = value;
                best_ = current_;
            }
            return;
        }

        // Unplaced tasks that can no longer meet their deadline anywhere.
        int forced = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (placed_[i]) continue;
            bool fits = false;
            bool can_meet = false;
            for (int c = 0; c < cpus_; ++c) {
                const int start = earliest_start(i, c, last_start, last_cpu);
                const int len = inst_.proc(i, c);
                if (start + len > inst_.intervals) continue;
                fits = true;
                if (start + len - inst_.tasks[i].arrival <= inst_.tasks[i].deadline) {
                    can_meet = true;
                    break;
                }
            }
            if (!fits) return;
            if (!can_meet) ++forced;
        }
        if (best_ && score(violations + forced) <= best_score_ + kImprovement) return;

        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < n_; ++i) {
            if (placed_[i]) continue;
            for (int c = 0; c < cpus_; ++c) {
                const int start = earliest_start(i, c, last_start, last_cpu);
                const int len = inst_.proc(i, c);
                if (start + len > inst_.intervals) continue;
                // The sequence order requires this exact start; anything later is not left-justified.
                if (start != std::max(inst_.tasks[i].arrival, free_[static_cast<std::size_t>(c)])) continue;
                const bool violates = start + len - inst_.tasks[i].arrival > inst_.tasks[i].deadline;
                candidates.push_back({i, c, start, violates});
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.violates != b.violates) return !a.violates;
            if (a.start != b.start) return a.start < b.start;
            if (a.cpu != b.cpu) return a.cpu > b.cpu;  // MEC servers have the highest indices
            return a.task < b.task;
        });

        for (const Candidate& cand : candidates) {
            const auto c = static_cast<std::size_t>(cand.cpu);
            const int len = inst_.proc(cand.task, cand.cpu);
            const int saved_free = free_[c];
            placed_[cand.task] = true;
            current_[cand.task] = Placement{cand.cpu, cand.start};
            free_[c] = cand.start + len;
            if (cand.cpu < inst_.n_uavs) busy_[c] += len;

            search(depth + 1, cand.start, cand.cpu, violations + (cand.violates ? 1 : 0));

            if (cand.cpu < inst_.n_uavs) busy_[c] -= len;
            free_[c] = saved_free;
            placed_[cand.task] = false;
            if (timed_out_) return;
        }
    }

    const IlpInstance& inst_;
    std::size_t n_;
    int cpus_;
    double violation_cost_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<int> free_;
    std::vector<long> busy_;
    std::vector<bool> placed_;
    std::vector<Placement> current_;
    std::optional<std::vector<Placement>> best_;
    double best_score_ = -std::numeric_limits<double>::infinity();
    std::uint64_t nodes_ = 0;
    bool timed_out_ = false;
};

}  // namespace

SolveResult solve(const IlpInstance& instance, std::chrono::milliseconds time_budget) {
    BranchAndBound search(instance, time_budget);
    return search.run();
}

}  // namespace uavmec::exact
