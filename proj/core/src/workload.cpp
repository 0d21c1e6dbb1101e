#include <uavmec/sim.hpp>

#include <uavmec/io.hpp>
#include <uavmec/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace uavmec {

std::vector<Task> generate_workload(const SimConfig& cfg, std::uint64_t seed) {
    std::vector<Task> tasks;
    const std::size_t kinds = cfg.task_catalog.size();
    for (int uav = 0; uav < cfg.n_uavs; ++uav) {
        for (std::size_t k = 0; k < kinds; ++k) {
            const std::uint64_t stream = static_cast<std::uint64_t>(uav) * kinds + k;
            Rng rng(derive_seed(seed, "workload", stream));
            const double mean = cfg.task_catalog[k].mean_interarrival;
            double t = rng.exponential(mean);
            while (t < cfg.horizon) {
                tasks.push_back(Task{0, k, CpuId{uav}, t, false});
                t += rng.exponential(mean);
            }
        }
    }
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return std::tie(a.arrival_time, a.source_uav, a.type) < std::tie(b.arrival_time, b.source_uav, b.type);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        tasks[i].id = static_cast<std::int64_t>(i);
    }
    return tasks;
}

std::uint64_t workload_hash(std::span<const Task> workload) {
    std::uint64_t hash = fnv1a64("workload");
    for (const Task& t : workload) {
        const std::string record = std::to_string(t.id) + ',' + std::to_string(t.type) + ',' +
                                   std::to_string(t.source_uav.index) + ',' + format_double(t.arrival_time) + ';';
        hash = fnv1a64(record, hash);
    }
    return hash;
}

namespace {

constexpr std::string_view kTraceHeader = "task_id,type,source_uav,arrival_time";

std::string trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return std::string(s);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError("trace line " + std::to_string(line) + ": cannot parse '" + text + "'");
    }
    return value;
}

}  // namespace

std::string write_trace(const SimConfig& cfg, std::span<const Task> workload) {
    std::ostringstream out;
    out << kTraceHeader << '\n';
    for (const Task& t : workload) {
        out << t.id << ',' << to_string(cfg.task_catalog.at(t.type).id) << ',' << t.source_uav.index << ','
            << format_double(t.arrival_time) << '\n';
    }
    return out.str();
}

std::vector<Task> parse_trace(const SimConfig& cfg, std::string_view text) {
    std::vector<Task> tasks;
    std::set<std::int64_t> ids;
    std::size_t line_no = 0;
    bool header_seen = false;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kTraceHeader) {
                throw ConfigError("trace: expected header '" + std::string(kTraceHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": expected 4 fields");
        }
        Task task;
        task.id = parse_number<std::int64_t>(trim(fields[0]), line_no);
        const TaskKind kind = parse_task_kind(trim(fields[1]));
        auto row = std::find_if(cfg.task_catalog.begin(), cfg.task_catalog.end(),
                                [kind](const TaskType& t) { return t.id == kind; });
        if (row == cfg.task_catalog.end()) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": task type not in catalog");
        }
        task.type = static_cast<std::size_t>(row - cfg.task_catalog.begin());
        task.source_uav = CpuId{parse_number<int>(trim(fields[2]), line_no)};
        if (!cfg.is_uav(task.source_uav)) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": source_uav is not a UAV index");
        }
        task.arrival_time = parse_number<double>(trim(fields[3]), line_no);
        if (!std::isfinite(task.arrival_time) || task.arrival_time < 0.0) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": arrival_time must be >= 0");
        }
        if (!tasks.empty() && task.arrival_time < tasks.back().arrival_time) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": arrivals must be time-ordered");
        }
        if (!ids.insert(task.id).second) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": duplicate task_id");
        }
        tasks.push_back(task);
    }
    if (!header_seen) {
        throw ConfigError("trace: missing header line");
    }
    return tasks;
}

}  // namespace uavmec
