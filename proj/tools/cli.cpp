#include "cli.hpp"

#include <uavmec/exact.hpp>
#include <uavmec/experiments.hpp>
#include <uavmec/io.hpp>
#include <uavmec/model.hpp>
#include <uavmec/policies.hpp>
#include <uavmec/qlearn.hpp>
#include <uavmec/sim.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace uavmec::cli {

namespace {

constexpr const char* kOutDirEnv = "UAVMEC_OUT_DIR";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string output_path(const std::string& path) {
    const char* dir = std::getenv(kOutDirEnv);
    if (dir == nullptr || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

SimConfig load(const std::string& path, bool exact = false) {
    SimConfig cfg = path.empty() ? default_paper_config() : load_config(path);
    const auto problems = validate_config(cfg, ValidationOptions{exact});
    if (!problems.empty()) {
        std::string message = "invalid config";
        for (const auto& p : problems) message += "\n  " + p;
        throw ConfigError(message);
    }
    return cfg;
}

std::vector<Task> load_trace(const SimConfig& cfg, const std::string& path) {
    return parse_trace(cfg, read_file(path));
}

std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split(text, ',')) {
        double value = 0.0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
            throw UsageError("bad weight '" + item + "'");
        }
        out.push_back(value);
    }
    return out;
}

struct NamedPolicy {
    std::string name;
    PolicyFactory factory;
};

NamedPolicy resolve_policy(const SimConfig& cfg, const std::string& spec) {
    if (spec.rfind("qlearn:", 0) == 0) {
        const std::string path = spec.substr(7);
        if (path.empty()) throw UsageError("policy 'qlearn:' needs a Q-table path");
        auto tables = std::make_shared<const AgentTables>(parse_tables(cfg, read_file(path)));
        return {"qlearn", greedy_policy(std::move(tables))};
    }
    try {
        return {spec, heuristic_policy(spec)};
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown policy '" + spec + "' (expected local, rr, hef, qhef or qlearn:PATH)");
    }
}

exact::IlpInstance instance_for(SimConfig cfg, const std::string& trace_path, std::optional<double> weight,
                                std::optional<double> theta) {
    if (weight) cfg.weight = *weight;
    if (theta) cfg.theta = *theta;
    const auto problems = validate_config(cfg, ValidationOptions{true});
    if (!problems.empty()) throw ConfigError("invalid config for the exact solver: " + problems.front());
    const auto trace = load_trace(cfg, trace_path);
    return exact::build_instance(cfg, trace);
}

void emit(std::ostream& out, const std::string& path, const std::string& contents) {
    if (path.empty()) {
        out << contents;
    } else {
        write_file_atomic(output_path(path), contents);
    }
}

}  // namespace

std::vector<unsigned long long> parse_seed_list(const std::string& text) {
    auto number = [&](const std::string& s) {
        unsigned long long v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
            throw UsageError("bad seed '" + s + "' in '" + text + "'");
        }
        return v;
    };
    std::vector<unsigned long long> seeds;
    for (const std::string& item : split(text, ',')) {
        if (const auto dots = item.find(".."); dots != std::string::npos) {
            const auto lo = number(item.substr(0, dots));
            const auto hi = number(item.substr(dots + 2));
            if (hi < lo || hi - lo > 1'000'000) throw UsageError("bad seed range '" + item + "'");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        } else {
            seeds.push_back(number(item));
        }
    }
    if (seeds.empty()) throw UsageError("empty seed list");
    return seeds;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offloading simulator, Q-learning trainer and exact scheduler for UAV/MEC networks", "uavmec"};
    app.require_subcommand(1);

    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config (defaults to the built-in reference setup)")
            ->check(CLI::ExistingFile);
    };

    // validate-config
    bool exact_checks = false;
    auto* validate = app.add_subcommand("validate-config", "Check a config file and report every problem");
    add_config(validate);
    validate->add_flag("--exact", exact_checks, "Also require interval divisibility for the exact solver");

    // train
    std::size_t episodes = 0;
    std::uint64_t seed = 0;
    std::string qtable_out, rewards_out;
    TrainSchedule schedule;
    auto* train_cmd = app.add_subcommand("train", "Train per-UAV Q-tables and write them with a reward trace");
    add_config(train_cmd);
    train_cmd->add_option("--episodes", episodes, "Number of training episodes")->required();
    train_cmd->add_option("--seed", seed, "Training seed")->required();
    train_cmd->add_option("--out", qtable_out, "Q-table output path")->required();
    train_cmd->add_option("--rewards", rewards_out, "Reward trace CSV (default: <out>.rewards.csv)");
    train_cmd->add_option("--learning-rate", schedule.learning_rate, "Step size")->capture_default_str();
    train_cmd->add_option("--discount", schedule.discount, "Discount factor")->capture_default_str();
    train_cmd->add_option("--epsilon-start", schedule.epsilon_start)->capture_default_str();
    train_cmd->add_option("--epsilon-end", schedule.epsilon_end)->capture_default_str();
    train_cmd->add_option("--decay-fraction", schedule.decay_fraction, "Share of episodes over which epsilon decays")
        ->capture_default_str();

    // run
    std::string policy_spec, seeds_text, metrics_out;
    unsigned threads = 1;
    auto* run_cmd = app.add_subcommand("run", "Simulate one policy over several seeds");
    add_config(run_cmd);
    run_cmd->add_option("--policy", policy_spec, "local | rr | hef | qhef | qlearn:QTABLE")->required();
    run_cmd->add_option("--seeds", seeds_text, "Seed list, e.g. 1,2,3 or 1..10")->required();
    run_cmd->add_option("--out", metrics_out, "Metrics CSV (stdout when omitted)");
    run_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();

    // compare
    std::string policies_text = "rr,hef,qhef", out_dir;
    auto* compare_cmd = app.add_subcommand("compare", "Run several policies on paired workloads and compare KPIs");
    add_config(compare_cmd);
    compare_cmd->add_option("--policies", policies_text, "Comma-separated policy list")->capture_default_str();
    compare_cmd->add_option("--seeds", seeds_text, "Seed list, e.g. 1..10")->required();
    compare_cmd->add_option("--out-dir", out_dir, "Directory for runs.csv, energy.csv, violations.csv, report.json")
        ->required();
    compare_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();

    // solve
    std::string trace_path, solution_out, lp_out;
    std::optional<double> weight, theta;
    long long time_limit_ms = 60'000;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the interval model exactly for a trace");
    add_config(solve_cmd);
    solve_cmd->add_option("--trace", trace_path, "Workload trace CSV")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--weight", weight, "Objective weight W in [0, 1]");
    solve_cmd->add_option("--theta", theta, "Violation normalizer");
    solve_cmd->add_option("--time-limit", time_limit_ms, "Search budget in milliseconds")->capture_default_str();
    solve_cmd->add_option("--out", solution_out, "Solution listing path");
    solve_cmd->add_option("--export-lp", lp_out, "Also write the model in LP format");

    // export-lp
    auto* lp_cmd = app.add_subcommand("export-lp", "Write the interval model of a trace in LP format");
    add_config(lp_cmd);
    lp_cmd->add_option("--trace", trace_path, "Workload trace CSV")->required()->check(CLI::ExistingFile);
    lp_cmd->add_option("--weight", weight, "Objective weight W in [0, 1]");
    lp_cmd->add_option("--theta", theta, "Violation normalizer");
    lp_cmd->add_option("--out", lp_out, "LP output path")->required();

    // generate-trace
    std::string trace_out;
    auto* gen_cmd = app.add_subcommand("generate-trace", "Sample a workload and write it as a trace CSV");
    add_config(gen_cmd);
    gen_cmd->add_option("--seed", seed, "Workload seed")->required();
    gen_cmd->add_option("--out", trace_out, "Trace output path (stdout when omitted)");

    // ilp-compare
    std::string qtable_in, weights_text = "0,1,0.5", table_out;
    auto* ilp_cmd = app.add_subcommand("ilp-compare", "Exact optima for several weights next to the greedy Q-policy");
    add_config(ilp_cmd);
    ilp_cmd->add_option("--trace", trace_path, "Workload trace CSV")->required()->check(CLI::ExistingFile);
    ilp_cmd->add_option("--qtable", qtable_in, "Trained Q-tables to evaluate on the same trace");
    ilp_cmd->add_option("--weights", weights_text, "Comma-separated weights")->capture_default_str();
    ilp_cmd->add_option("--time-limit", time_limit_ms, "Search budget per weight in milliseconds")
        ->capture_default_str();
    ilp_cmd->add_option("--out", table_out, "Comparison CSV (stdout when omitted)");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("uavmec");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (validate->parsed()) {
            const SimConfig cfg = config_path.empty() ? default_paper_config() : load_config(config_path);
            const auto problems = validate_config(cfg, ValidationOptions{exact_checks});
            if (problems.empty()) {
                out << "valid\n";
                return kOk;
            }
            for (const auto& p : problems) err << "invalid: " << p << '\n';
            return kFailure;
        }

        if (train_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            schedule.episodes = episodes;
            const TrainResult result = train(cfg, schedule, seed);
            if (rewards_out.empty()) rewards_out = qtable_out + ".rewards.csv";
            write_file_atomic(output_path(qtable_out), serialize_tables(cfg, result.tables));
            write_file_atomic(output_path(rewards_out), reward_trace_csv(result));
            out << "episodes " << episodes << '\n';
            if (!result.rewards.empty()) {
                const std::size_t window = std::min<std::size_t>(episodes, 10'000);
                for (std::size_t agent = 0; agent < result.tables.size(); ++agent) {
                    const auto means = windowed_means(result.rewards, agent, window, window);
                    out << "agent " << agent << " final_window_mean "
                        << format_double(means.empty() ? 0.0 : means.back()) << '\n';
                }
            }
            out << "battery_exhausted_episodes " << result.exhausted_episodes.size() << '\n';
            out << "wrote " << output_path(qtable_out) << " and " << output_path(rewards_out) << '\n';
            return kOk;
        }

        if (run_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            const auto policy = resolve_policy(cfg, policy_spec);
            const auto seeds = parse_seed_list(seeds_text);
            auto runs = run_batch(cfg, policy.factory, std::vector<std::uint64_t>(seeds.begin(), seeds.end()), threads);
            emit(out, metrics_out, run_metrics_csv(runs));
            if (!metrics_out.empty()) out << "wrote " << output_path(metrics_out) << '\n';
            for (const RunMetrics& m : runs) {
                if (m.battery_exhausted()) err << "warning: seed " << m.seed << " exhausted a UAV battery\n";
            }
            return kOk;
        }

        if (compare_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            const auto seeds_raw = parse_seed_list(seeds_text);
            const std::vector<std::uint64_t> seeds(seeds_raw.begin(), seeds_raw.end());
            std::vector<PolicyBatch> batches;
            std::vector<RunMetrics> all_runs;
            for (const std::string& spec : split(policies_text, ',')) {
                const auto policy = resolve_policy(cfg, spec);
                batches.push_back({policy.name, run_batch(cfg, policy.factory, seeds, threads)});
                all_runs.insert(all_runs.end(), batches.back().runs.begin(), batches.back().runs.end());
            }
            const ComparisonReport report = compare(batches);
            const std::filesystem::path dir = output_path(out_dir);
            write_file_atomic((dir / "runs.csv").string(), run_metrics_csv(all_runs));
            write_file_atomic((dir / "energy.csv").string(), energy_csv(batches));
            write_file_atomic((dir / "violations.csv").string(), violations_csv(batches));
            write_file_atomic((dir / "report.json").string(), report_json(report));
            for (const PolicySummary& p : report.policies) {
                out << p.policy << " min_remaining_pct " << format_double(p.min_remaining_pct.mean) << " +- "
                    << format_double(p.min_remaining_pct.stddev) << " violation_pct "
                    << format_double(p.violation_pct.mean) << " +- " << format_double(p.violation_pct.stddev) << '\n';
            }
            for (const OrderingCheck& c : report.orderings) {
                out << "ordering " << c.name << ' ' << (c.holds ? "holds" : "fails") << " (" << c.detail << ")\n";
            }
            out << "wrote " << dir.string() << '\n';
            return kOk;
        }

        if (solve_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            const auto inst = instance_for(cfg, trace_path, weight, theta);
            if (!lp_out.empty()) write_file_atomic(output_path(lp_out), exact::export_lp(inst));
            const auto result = exact::solve(inst, std::chrono::milliseconds(time_limit_ms));
            out << "status " << exact::to_string(result.status) << '\n';
            if (result.status == exact::SolveStatus::Infeasible) {
                err << "infeasible: " << result.message << '\n';
                return kInfeasible;
            }
            if (!result.has_schedule()) {
                err << "error: " << result.message << '\n';
                return kFailure;
            }
            out << "objective " << format_double(result.objective) << '\n';
            out << "violations " << result.violations << '\n';
            out << "min_remaining_pct "
                << format_double(100.0 *
                                 *std::min_element(result.remaining_energy.begin(), result.remaining_energy.end()) /
                                 inst.energy.battery_capacity)
                << '\n';
            if (!solution_out.empty()) {
                write_file_atomic(output_path(solution_out), exact::solution_dump(inst, result));
                out << "wrote " << output_path(solution_out) << '\n';
            }
            return kOk;
        }

        if (lp_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            const auto inst = instance_for(cfg, trace_path, weight, theta);
            write_file_atomic(output_path(lp_out), exact::export_lp(inst));
            out << "wrote " << output_path(lp_out) << '\n';
            return kOk;
        }

        if (gen_cmd->parsed()) {
            const SimConfig cfg = load(config_path);
            const auto workload = generate_workload(cfg, seed);
            emit(out, trace_out, write_trace(cfg, workload));
            if (!trace_out.empty()) out << "wrote " << workload.size() << " tasks to " << output_path(trace_out) << '\n';
            return kOk;
        }

        if (ilp_cmd->parsed()) {
            const SimConfig cfg = load(config_path, true);
            const auto trace = load_trace(cfg, trace_path);
            std::shared_ptr<const AgentTables> tables;
            if (!qtable_in.empty()) tables = std::make_shared<const AgentTables>(parse_tables(cfg, read_file(qtable_in)));
            const auto weights = parse_weights(weights_text);
            const auto rows = ilp_comparison(cfg, trace, tables, weights, std::chrono::milliseconds(time_limit_ms));
            emit(out, table_out, ilp_comparison_csv(rows));
            for (const auto& row : rows) {
                if (!row.optimal) err << "warning: " << row.label << " is not proven optimal (" << row.status << ")\n";
            }
            return kOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace uavmec::cli
