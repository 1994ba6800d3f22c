#include "ehsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ehsim {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SimError("cannot open for writing: " + path);
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw SimError("trailing characters in number: " + text);
        }
        return v;
    } catch (const std::exception&) {
        throw SimError("cannot parse number: " + text);
    }
}

} // namespace

void write_trace_csv(const HarvestTrace& trace, std::ostream& out) {
    out << "node_id";
    for (int t = 1; t <= trace.horizon; ++t) {
        out << ',' << t;
    }
    out << '\n';
    for (int i = 0; i < trace.node_count; ++i) {
        out << i;
        for (int t = 0; t < trace.horizon; ++t) {
            out << ',' << format_double(trace.at(i, t));
        }
        out << '\n';
    }
}

void write_trace_csv(const HarvestTrace& trace, const std::string& path) {
    auto out = open_out(path);
    write_trace_csv(trace, out);
}

HarvestTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SimError("trace CSV is empty");
    }
    const auto header = split_csv_line(line);
    if (header.empty() || header.front() != "node_id") {
        throw SimError("trace CSV must start with a node_id header");
    }
    const int horizon = static_cast<int>(header.size()) - 1;

    std::vector<std::pair<int, std::vector<double>>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != horizon + 1) {
            throw SimError("trace CSV row has wrong cell count");
        }
        const int node = static_cast<int>(parse_double(cells.front()));
        std::vector<double> values(static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t) {
            values[static_cast<std::size_t>(t)] = parse_double(cells[static_cast<std::size_t>(t) + 1]);
        }
        rows.emplace_back(node, std::move(values));
    }
    const int m = static_cast<int>(rows.size());
    HarvestTrace trace = HarvestTrace::zeros(m, horizon);
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (const auto& [node, values] : rows) {
        if (node < 0 || node >= m || seen[static_cast<std::size_t>(node)]) {
            throw SimError("trace CSV node ids must be 0..m-1, each once");
        }
        seen[static_cast<std::size_t>(node)] = 1;
        for (int t = 0; t < horizon; ++t) {
            trace.at(node, t) = values[static_cast<std::size_t>(t)];
        }
    }
    return trace;
}

HarvestTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SimError("cannot open trace CSV: " + path);
    }
    return read_trace_csv(in);
}

namespace {

const char* outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::Transmitted: return "transmitted";
        case Outcome::Idle: return "idle";
        case Outcome::Unassigned: return "unassigned";
    }
    return "unassigned";
}

} // namespace

void write_slot_log_csv(const RunRecord& run, std::ostream& out) {
    out << "slot,channel,node_id,outcome\n";
    for (std::size_t t = 0; t < run.slots.size(); ++t) {
        const auto& slot = run.slots[t];
        for (std::size_t c = 0; c < slot.channels.size(); ++c) {
            const auto& ch = slot.channels[c];
            out << (t + 1) << ',' << c << ',' << ch.node << ',' << outcome_name(ch.outcome)
                << '\n';
        }
    }
}

void write_slot_log_csv(const RunRecord& run, const std::string& path) {
    auto out = open_out(path);
    write_slot_log_csv(run, out);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    for (const auto& row : rows) {
        out << row.policy << ',' << row.process << ',' << row.node_count << ','
            << row.channel_count << ',' << row.horizon << ','
            << format_double(row.nominal_density) << ',' << row.seed << ','
            << format_double(row.efficiency) << ',' << format_double(row.jain) << ','
            << format_double(row.bound_t4) << ',' << format_double(row.bound_t5) << ','
            << format_double(row.rr_prediction) << '\n';
    }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    auto out = open_out(path);
    write_sweep_csv(rows, out);
}

std::string run_summary_json(const RunRecord& run, const EfficiencyReport& report,
                             const std::string& process, double nominal_density,
                             std::uint64_t seed) {
    nlohmann::json j;
    j["config"] = {
        {"m", run.config.node_count},
        {"k", run.config.channel_count},
        {"horizon", run.config.horizon},
        {"battery_cap", run.config.bounded() ? nlohmann::json(run.config.battery_cap)
                                             : nlohmann::json()},
        {"harvest_within_slot", run.config.harvest_within_slot},
    };
    j["policy"] = run.policy_name;
    j["seed"] = seed;
    j["process"] = process;
    j["nominal_density"] = nominal_density;
    j["total_sent"] = report.total_sent;
    j["opt_throughput"] = report.opt_throughput;
    j["ceiling_opt"] = report.ceiling_opt;
    j["oracle_opt"] = report.oracle_opt ? nlohmann::json(*report.oracle_opt) : nlohmann::json();
    j["efficiency"] = report.efficiency;
    j["jain"] = std::isnan(report.jain) ? nlohmann::json() : nlohmann::json(report.jain);

    nlohmann::json nodes = nlohmann::json::array();
    for (int i = 0; i < run.config.node_count; ++i) {
        const auto& st = run.final_states[static_cast<std::size_t>(i)];
        const double x = report.per_node_x[static_cast<std::size_t>(i)];
        nodes.push_back({
            {"node", i},
            {"sent", st.packets_sent},
            {"battery", st.battery},
            {"harvested", st.total_harvested},
            {"overflow_lost", st.overflow_lost},
            {"x", std::isnan(x) ? nlohmann::json() : nlohmann::json(x)},
        });
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

} // namespace ehsim
