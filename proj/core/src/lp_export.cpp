#include <uavmec/exact.hpp>

#include <uavmec/io.hpp>

#include <sstream>

namespace uavmec::exact {

namespace {

std::string var(std::string_view prefix, std::size_t i, int c) {
    return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(c);
}

std::string var(std::string_view prefix, std::size_t i, int c, int t) {
    return var(prefix, i, c) + "_" + std::to_string(t);
}

/// Accumulates `coef name` terms and wraps long rows.
class Row {
public:
    void add(double coef, const std::string& name) {
        if (coef == 0.0) return;
        if (terms_ > 0 && terms_ % 8 == 0) text_ << "\n   ";
        text_ << (coef < 0 ? " - " : (terms_ == 0 ? " " : " + "));
        const double magnitude = coef < 0 ? -coef : coef;
        if (magnitude != 1.0) text_ << format_double(magnitude) << ' ';
        text_ << name;
        ++terms_;
    }
    bool empty() const { return terms_ == 0; }
    std::string str() const { return text_.str(); }

private:
    std::ostringstream text_;
    int terms_ = 0;
};

}  // namespace

std::string export_lp(const IlpInstance& inst) {
    const std::size_t n = inst.tasks.size();
    const int cpus = inst.n_cpus();
    const int horizon = inst.intervals;
    std::ostringstream out;

    const std::size_t per_task = static_cast<std::size_t>(cpus) * (1 + 4 * static_cast<std::size_t>(horizon)) + 1;
    out << "\\ uavmec interval-indexed offloading model\n";
    out << "\\ tasks " << n << ", cpus " << cpus << " (uavs " << inst.n_uavs << ", mec " << inst.n_mec
        << "), intervals " << horizon << ", big_m " << inst.big_m << "\n";
    out << "\\ per task: x_i_c, p/ps/pe_i_c_t, y_i_c_t (= p * x), v_i -> " << per_task << " binaries\n";
    out << "\\ plus one free variable z (minimum remaining UAV energy); total " << n * per_task + 1 << "\n";
    out << "\\ weight " << format_double(inst.weight) << ", theta " << format_double(inst.theta) << "\n";

    out << "Maximize\n";
    {
        Row obj;
        obj.add(inst.weight, "z");
        for (std::size_t i = 0; i < n; ++i) obj.add(-(1.0 - inst.weight) / inst.theta, "v_" + std::to_string(i));
        out << " obj:" << (obj.empty() ? " 0 z" : obj.str()) << "\n";
    }

    out << "Subject To\n";
    for (int j = 0; j < inst.n_uavs; ++j) {
        Row row;
        row.add(1.0, "z");
        for (std::size_t i = 0; i < n; ++i) {
            for (int t = 0; t < horizon; ++t) row.add(inst.busy_interval_cost(), var("p", i, j, t));
        }
        out << " energy_" << j << ":" << row.str() << " <= " << format_double(inst.idle_remaining()) << "\n";
    }

    for (std::size_t i = 0; i < n; ++i) {
        const IlpTask& task = inst.tasks[i];
        const std::string ti = std::to_string(i);

        Row alloc, early, offload, delay;
        for (int c = 0; c < cpus; ++c) {
            for (int t = 0; t < horizon; ++t) (t >= task.arrival ? alloc : early).add(1.0, var("y", i, c, t));
            alloc.add(-inst.proc(i, c), var("x", i, c));
            offload.add(1.0, var("x", i, c));
            for (int t = 1; t < horizon; ++t) delay.add(t, var("ps", i, c, t));
            delay.add(inst.proc(i, c), var("x", i, c));
        }
        out << " alloc_" << ti << ":" << alloc.str() << " = 0\n";
        if (!early.empty()) out << " early_" << ti << ":" << early.str() << " = 0\n";
        out << " offload_" << ti << ":" << offload.str() << " <= 1\n";
        delay.add(-inst.big_m, "v_" + ti);
        out << " vlo_" << ti << ":" << delay.str() << " <= " << task.deadline + task.arrival << "\n";
        out << " vhi_" << ti << ":" << delay.str() << " >= " << task.deadline + task.arrival - inst.big_m << "\n";

        for (int c = 0; c < cpus; ++c) {
            for (int t = 0; t < horizon; ++t) {
                const std::string y = var("y", i, c, t);
                const std::string p = var("p", i, c, t);
                const std::string x = var("x", i, c);
                const std::string suffix = var("", i, c, t);
                out << " lin1" << suffix << ": " << y << " - " << p << " <= 0\n";
                out << " lin2" << suffix << ": " << y << " - " << x << " <= 0\n";
                out << " lin3" << suffix << ": " << y << " - " << p << " - " << x << " >= -1\n";
                out << " excl" << suffix << ": " << var("ps", i, c, t) << " + " << var("pe", i, c, t) << " <= 1\n";
                if (t + 1 < horizon) {
                    out << " chain" << var("", i, c, t + 1) << ": " << var("p", i, c, t + 1) << " - " << p << " - "
                        << var("ps", i, c, t + 1) << " + " << var("pe", i, c, t + 1) << " = 0\n";
                }
            }
            if (horizon > 0) {
                out << " init" << var("", i, c) << ": " << var("p", i, c, 0) << " - " << var("ps", i, c, 0)
                    << " = 0\n";
            }
            Row starts, ends;
            for (int t = 0; t < horizon; ++t) {
                starts.add(1.0, var("ps", i, c, t));
                ends.add(1.0, var("pe", i, c, t));
            }
            if (!starts.empty()) {
                out << " onestart" << var("", i, c) << ":" << starts.str() << " <= 1\n";
                out << " oneend" << var("", i, c) << ":" << ends.str() << " <= 1\n";
            }
        }

        for (int t = 0; t < horizon; ++t) {
            for (std::string_view family : {"p", "ps", "pe"}) {
                Row row;
                for (int c = 0; c < cpus; ++c) row.add(1.0, var(family, i, c, t));
                out << " one" << family << "_" << ti << "_" << t << ":" << row.str() << " <= 1\n";
            }
        }
    }

    if (n > 0) {
        for (int c = 0; c < cpus; ++c) {
            for (int t = 0; t < horizon; ++t) {
                for (std::string_view family : {"p", "ps", "pe"}) {
                    Row row;
                    for (std::size_t i = 0; i < n; ++i) row.add(1.0, var(family, i, c, t));
                    out << " cap" << family << "_" << c << "_" << t << ":" << row.str() << " <= 1\n";
                }
            }
        }
    }

    out << "Bounds\n";
    out << " z free\n";
    out << "Binaries\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < cpus; ++c) {
            out << ' ' << var("x", i, c) << '\n';
            for (std::string_view family : {"p", "ps", "pe", "y"}) {
                for (int t = 0; t < horizon; ++t) out << ' ' << var(family, i, c, t) << '\n';
            }
        }
        out << " v_" << i << '\n';
    }
    out << "End\n";
    return out.str();
}

}  // namespace uavmec::exact
