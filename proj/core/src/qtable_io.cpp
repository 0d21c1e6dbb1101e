#include <uavmec/qlearn.hpp>

#include <uavmec/io.hpp>

#include <charconv>
#include <sstream>

namespace uavmec {

namespace {

constexpr std::string_view kMagic = "uavmec-qtable";
constexpr int kFormatVersion = 1;

struct LineReader {
    std::vector<std::string> lines;
    std::size_t next = 0;

    std::string take(std::string_view what) {
        while (next < lines.size()) {
            std::string line = lines[next++];
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            return line;
        }
        throw QTableFormatError("q-table: unexpected end of file while reading " + std::string(what));
    }
};

std::string expect_key(const std::string& line, std::string_view key) {
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) {
        throw QTableFormatError("q-table: expected '" + std::string(key) + "' line, got '" + line + "'");
    }
    return line.substr(prefix.size());
}

template <typename T>
T to_number(const std::string& text, std::string_view what) {
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw QTableFormatError("q-table: bad " + std::string(what) + " '" + text + "'");
    }
    return value;
}

}  // namespace

std::string serialize_tables(const SimConfig& cfg, const AgentTables& tables) {
    std::ostringstream out;
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "config_hash " << to_hex(config_hash(cfg)) << '\n';
    out << "agents " << tables.size() << '\n';
    out << "states " << (tables.empty() ? 0 : tables.front().states()) << '\n';
    out << "actions " << (tables.empty() ? 0 : tables.front().actions()) << '\n';
    out << "# agent state action value visits\n";
    for (std::size_t agent = 0; agent < tables.size(); ++agent) {
        const QTable& t = tables[agent];
        for (std::size_t s = 0; s < t.states(); ++s) {
            for (std::size_t a = 0; a < t.actions(); ++a) {
                if (t.visits(s, a) == 0 && t.value(s, a) == 0.0) continue;
                out << agent << ' ' << s << ' ' << a << ' ' << format_double(t.value(s, a)) << ' ' << t.visits(s, a)
                    << '\n';
            }
        }
    }
    out << "end\n";
    return out.str();
}

AgentTables parse_tables(const SimConfig& cfg, std::string_view text) {
    LineReader reader{split(text, '\n')};
    const std::string magic = reader.take("header");
    if (magic != std::string(kMagic) + " " + std::to_string(kFormatVersion)) {
        throw QTableFormatError("q-table: unsupported header '" + magic + "'");
    }
    const std::string hash = expect_key(reader.take("config_hash"), "config_hash");
    if (hash != to_hex(config_hash(cfg))) {
        throw QTableFormatError("q-table: config hash mismatch (file " + hash + ", config " +
                                to_hex(config_hash(cfg)) + ")");
    }
    const auto agents = to_number<std::size_t>(expect_key(reader.take("agents"), "agents"), "agent count");
    const auto states = to_number<std::size_t>(expect_key(reader.take("states"), "states"), "state count");
    const auto actions = to_number<std::size_t>(expect_key(reader.take("actions"), "actions"), "action count");

    AgentTables tables = make_agent_tables(cfg);
    if (agents != tables.size() || states != tables.front().states() || actions != tables.front().actions()) {
        throw QTableFormatError("q-table: dimensions do not match the config");
    }
    while (true) {
        const std::string line = reader.take("entries");
        if (line == "end") break;
        const auto fields = split(line, ' ');
        if (fields.size() != 5) throw QTableFormatError("q-table: malformed entry '" + line + "'");
        const auto agent = to_number<std::size_t>(fields[0], "agent");
        const auto state = to_number<std::size_t>(fields[1], "state");
        const auto action = to_number<std::size_t>(fields[2], "action");
        if (agent >= agents || state >= states || action >= actions) {
            throw QTableFormatError("q-table: entry out of range '" + line + "'");
        }
        tables[agent].set_value(state, action, to_number<double>(fields[3], "value"));
        tables[agent].set_visits(state, action, to_number<std::uint32_t>(fields[4], "visit count"));
    }
    return tables;
}

}  // namespace uavmec
