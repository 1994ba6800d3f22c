#include "ehsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ehsim/metrics.hpp"
#include "ehsim/oracle.hpp"
#include "ehsim/policy.hpp"

namespace ehsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        const auto t = trim(part);
        if (!t.empty()) {
            parts.push_back(t);
        }
    }
    return parts;
}

bool parse_bool(const std::string& value, const std::string& field) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError(field + " must be a boolean, got '" + value + "'");
}

double parse_num(const std::string& value, const std::string& field) {
    if (value == "inf") {
        return unbounded_battery();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field + " must be numeric, got '" + value + "'");
    }
}

int parse_int(const std::string& value, const std::string& field) {
    const double v = parse_num(value, field);
    if (std::floor(v) != v) {
        throw ConfigError(field + " must be an integer, got '" + value + "'");
    }
    return static_cast<int>(v);
}

PolicySpec parse_policy_value(const std::string& value) {
    PolicySpec policy;
    const auto tokens = split(value, ' ');
    if (tokens.empty()) {
        throw ConfigError("policies.policy must name a policy");
    }
    policy.kind = tokens.front();
    if (policy.kind != "urop" && policy.kind != "rr" && policy.kind != "up") {
        throw ConfigError("policies.policy must be urop, rr or up, got '" + policy.kind + "'");
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos) {
            throw ConfigError("policies.policy parameter must be key=value: '" + tokens[i] + "'");
        }
        const auto key = tokens[i].substr(0, eq);
        const auto val = tokens[i].substr(eq + 1);
        if (key == "quantum") {
            policy.quantum = parse_int(val, "policies.policy quantum");
        } else {
            throw ConfigError("unknown policy parameter '" + key + "'");
        }
    }
    return policy;
}

ProfileSpec parse_profile_value(const std::string& value, const std::string& field) {
    const auto parts = split(value, ',');
    if (parts.size() != 3) {
        throw ConfigError(field + " must be count_high,d_high,d_low");
    }
    ProfileSpec p;
    p.count_high = parse_int(parts[0], field + ".count_high");
    p.d_high = parse_num(parts[1], field + ".d_high");
    p.d_low = parse_num(parts[2], field + ".d_low");
    return p;
}

} // namespace

void ExperimentSpec::validate() const {
    try {
        config.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(std::string("network: ") + err.what());
    }
    if (process != "deterministic" && process != "poisson" && process != "markov") {
        throw ConfigError("process.kind must be deterministic, poisson or markov");
    }
    if (process == "markov") {
        try {
            markov.validate();
        } catch (const ParamError& err) {
            throw ConfigError(std::string("process: ") + err.what());
        }
    }
    if (profile.count_high < 0 || profile.count_high > config.node_count) {
        throw ConfigError("profile.count_high must lie in [0, m]");
    }
    if (profile.d_low < 0.0 || (profile.count_high > 0 && profile.d_high < 0.0)) {
        throw ConfigError("profile densities must be nonnegative");
    }
    if (policies.empty()) {
        throw ConfigError("policies: at least one policy is required");
    }
    if (seeds.empty()) {
        throw ConfigError("run.seeds: at least one seed is required");
    }
    for (int c : checkpoints) {
        if (c < 1 || c > config.horizon) {
            throw ConfigError("run.checkpoints entries must lie in [1, horizon]");
        }
    }
}

ExperimentSpec parse_experiment_text(const std::string& text, const std::string& origin) {
    ExperimentSpec spec;
    spec.seeds.clear();
    int seed_count = 0;

    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string field = section + "." + key;

        if (section == "network") {
            if (key == "m") {
                spec.config.node_count = parse_int(value, field);
            } else if (key == "k") {
                spec.config.channel_count = parse_int(value, field);
            } else if (key == "horizon" || key == "n") {
                spec.config.horizon = parse_int(value, field);
            } else if (key == "battery_cap") {
                spec.config.battery_cap = parse_num(value, field);
            } else if (key == "harvest_within_slot") {
                spec.config.harvest_within_slot = parse_bool(value, field);
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else if (section == "process") {
            if (key == "kind") {
                spec.process = value;
            } else if (key == "markov_p_stay") {
                const double p = parse_num(value, field);
                if (p < 0.0 || p > 1.0) {
                    throw ConfigError(field + " must lie in [0, 1]");
                }
                const int s = spec.markov.state_count();
                const double off = s > 1 ? (1.0 - p) / (s - 1) : 0.0;
                for (int r = 0; r < s; ++r) {
                    for (int c = 0; c < s; ++c) {
                        spec.markov.transition[static_cast<std::size_t>(r) * s + c] =
                            (r == c) ? p : off;
                    }
                }
            } else if (key == "markov_scale") {
                spec.markov.scale = parse_num(value, field);
            } else if (key == "markov_literal") {
                spec.markov.literal_scaling = parse_bool(value, field);
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else if (section == "profile") {
            if (key == "count_high") {
                spec.profile.count_high = parse_int(value, field);
            } else if (key == "d_high") {
                spec.profile.d_high = parse_num(value, field);
            } else if (key == "d_low") {
                spec.profile.d_low = parse_num(value, field);
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else if (section == "policies") {
            if (key == "policy") {
                spec.policies.push_back(parse_policy_value(value));
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else if (section == "run") {
            if (key == "label") {
                spec.label = value;
            } else if (key == "seeds") {
                seed_count = parse_int(value, field);
                if (seed_count < 1) {
                    throw ConfigError(field + " must be positive");
                }
            } else if (key == "seed_list") {
                for (const auto& s : split(value, ',')) {
                    spec.seeds.push_back(
                        static_cast<std::uint64_t>(parse_num(s, field)));
                }
            } else if (key == "checkpoints") {
                for (const auto& s : split(value, ',')) {
                    spec.checkpoints.push_back(parse_int(s, field));
                }
            } else if (key == "use_oracle_norm") {
                spec.use_oracle_norm = parse_bool(value, field);
            } else if (key == "slot_log") {
                spec.write_slot_log = parse_bool(value, field);
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else if (section == "bounds") {
            if (key == "profile") {
                spec.bound_profiles.push_back(parse_profile_value(value, field));
            } else if (key == "horizons") {
                for (const auto& s : split(value, ',')) {
                    spec.bound_horizons.push_back(parse_int(s, field));
                }
            } else {
                throw ConfigError("unknown key " + field);
            }
        } else {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown section [" +
                              section + "]");
        }
    }

    if (spec.seeds.empty() && seed_count > 0) {
        for (int s = 1; s <= seed_count; ++s) {
            spec.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    return spec;
}

ExperimentSpec parse_experiment_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open spec file: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_text(buffer.str(), path);
}

HarvestTrace make_trace(const ExperimentSpec& spec, std::uint64_t seed) {
    const DensityProfile profile = spec.profile.build(spec.config.node_count);
    if (spec.process == "deterministic") {
        return gen_deterministic(spec.config, profile);
    }
    if (spec.process == "poisson") {
        return gen_poisson(spec.config, profile, seed);
    }
    return gen_markov(spec.config, profile, spec.markov, seed);
}

namespace {

struct CellOutput {
    std::vector<SweepRow> rows;
    std::string json;      // empty when JSON output is off
    std::string json_name;
    std::string slot_csv_name; // empty when slot logs are off
    RunRecord run;
};

CellOutput run_cell(const ExperimentSpec& spec, const PolicySpec& pspec, std::uint64_t seed,
                    bool emit_json) {
    const HarvestTrace trace = make_trace(spec, seed);
    auto policy = make_policy(pspec.kind, seed, pspec.quantum);
    CellOutput out;
    out.run = run_simulation(spec.config, trace, *policy);
    out.run.policy_seed = seed;

    std::vector<int> checkpoints = spec.checkpoints;
    if (checkpoints.empty()) {
        checkpoints.push_back(spec.config.horizon);
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    const double nominal_d = spec.profile.nominal_density(spec.config.node_count);

    EfficiencyReport final_report;
    for (int cp : checkpoints) {
        const HarvestTrace trace_cp = trace.prefix(cp);
        NetworkConfig config_cp = spec.config;
        config_cp.horizon = cp;

        std::optional<std::int64_t> oracle_opt;
        if (spec.use_oracle_norm) {
            oracle_opt = offline_optimum(trace_cp, config_cp);
        }

        const auto sent_nodes = sent_per_node(out.run, cp);
        const std::int64_t sent_total =
            out.run.sent_cumulative[static_cast<std::size_t>(cp - 1)];
        const auto ceilings = fully_efficient_packets(trace_cp);
        std::int64_t ceiling_opt = 0;
        for (auto v : ceilings) {
            ceiling_opt += v;
        }
        ceiling_opt = std::min(ceiling_opt,
                              static_cast<std::int64_t>(config_cp.channel_count) * cp);
        const std::int64_t norm =
            (spec.use_oracle_norm && oracle_opt) ? *oracle_opt : ceiling_opt;

        SweepRow row;
        row.policy = pspec.kind;
        row.process = spec.process;
        row.node_count = spec.config.node_count;
        row.channel_count = spec.config.channel_count;
        row.horizon = cp;
        row.nominal_density = nominal_d;
        row.seed = seed;
        row.efficiency = norm == 0 ? 1.0
                                   : static_cast<double>(sent_total) /
                                         static_cast<double>(norm);

        std::vector<double> x;
        x.reserve(ceilings.size());
        for (std::size_t i = 0; i < ceilings.size(); ++i) {
            if (ceilings[i] > 0) {
                x.push_back(static_cast<double>(sent_nodes[i]) /
                            static_cast<double>(ceilings[i]));
            }
        }
        bool any_positive = false;
        for (double v : x) {
            any_positive = any_positive || v > 0.0;
        }
        row.jain = (!x.empty() && any_positive) ? jain_fairness(x)
                                                : std::numeric_limits<double>::quiet_NaN();

        const int t0 = earliest_final_drop(out.run, cp);
        std::int64_t ceil_total = 0;
        for (auto v : ceilings) {
            ceil_total += v;
        }
        row.bound_t4 =
            ceil_total == 0
                ? 0.0
                : 1.0 - static_cast<double>(config_cp.channel_count) * (cp - t0) /
                            static_cast<double>(ceil_total);
        row.bound_t5 = (nominal_d > 0.0 && nominal_d < 1.0)
                           ? urop_lower_bound(config_cp, nominal_d)
                           : std::numeric_limits<double>::quiet_NaN();
        row.rr_prediction = rr_efficiency_prediction(trace_cp, config_cp, 0);
        out.rows.push_back(row);

        if (cp == spec.config.horizon) {
            final_report = make_report(out.run, trace, spec.config, oracle_opt,
                                       spec.use_oracle_norm);
        }
    }
    if (checkpoints.back() != spec.config.horizon) {
        std::optional<std::int64_t> oracle_opt;
        if (spec.use_oracle_norm) {
            oracle_opt = offline_optimum(trace, spec.config);
        }
        final_report =
            make_report(out.run, trace, spec.config, oracle_opt, spec.use_oracle_norm);
    }

    if (emit_json) {
        out.json = run_summary_json(out.run, final_report, spec.process, nominal_d, seed);
        out.json_name =
            spec.label + "_run_" + pspec.kind + "_" + std::to_string(seed) + ".json";
    }
    if (spec.write_slot_log) {
        out.slot_csv_name =
            spec.label + "_slots_" + pspec.kind + "_" + std::to_string(seed) + ".csv";
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                bool emit_csv, bool emit_json) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    struct Cell {
        PolicySpec policy;
        std::uint64_t seed = 0;
    };
    std::vector<Cell> cells;
    for (const auto& pspec : spec.policies) {
        for (const auto seed : spec.seeds) {
            cells.push_back({pspec, seed});
        }
    }

    std::vector<CellOutput> outputs(cells.size());
    std::atomic<std::size_t> next{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= cells.size()) {
                    return;
                }
                try {
                    outputs[idx] =
                        run_cell(spec, cells[idx].policy, cells[idx].seed, emit_json);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ExperimentResult result;
    for (auto& out : outputs) {
        for (auto& row : out.rows) {
            result.rows.push_back(row);
        }
        if (!out.json.empty()) {
            write_text_file((std::filesystem::path(out_dir) / out.json_name).string(),
                            out.json);
        }
        if (!out.slot_csv_name.empty()) {
            write_slot_log_csv(out.run,
                               (std::filesystem::path(out_dir) / out.slot_csv_name).string());
        }
    }
    if (emit_csv) {
        result.csv_path =
            (std::filesystem::path(out_dir) / (spec.label + "_results.csv")).string();
        write_sweep_csv(result.rows, result.csv_path);
    }
    return result;
}

std::vector<BoundsRow> run_bounds(const ExperimentSpec& spec, const std::string& out_dir,
                                  bool emit_csv) {
    if (spec.bound_profiles.empty() || spec.bound_horizons.empty()) {
        throw ConfigError("bounds: both profile rows and horizons are required");
    }
    if (spec.config.node_count < 1 || spec.config.channel_count < 1) {
        throw ConfigError("network: m and k are required for the bounds grid");
    }

    std::vector<BoundsRow> rows;
    for (const auto& profile : spec.bound_profiles) {
        for (const int horizon : spec.bound_horizons) {
            if (horizon < 1) {
                throw ConfigError("bounds.horizons entries must be positive");
            }
            BoundsRow row;
            row.node_count = spec.config.node_count;
            row.channel_count = spec.config.channel_count;
            row.horizon = horizon;
            row.profile = profile;
            row.nominal_density = profile.nominal_density(spec.config.node_count);

            NetworkConfig cfg = spec.config;
            cfg.horizon = horizon;

            // Constant-rate workload: V_i = floor(d_i * k * N / m).
            const int m = cfg.node_count;
            std::vector<std::int64_t> workload(static_cast<std::size_t>(m));
            const auto densities = profile.build(m);
            std::int64_t total = 0;
            for (int i = 0; i < m; ++i) {
                workload[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(
                    std::floor(densities.node_density[static_cast<std::size_t>(i)] *
                                   cfg.channel_count * static_cast<double>(horizon) / m +
                               kEnergyTolerance));
                total += workload[static_cast<std::size_t>(i)];
            }
            const double sigma =
                static_cast<double>(cfg.channel_count) * horizon / m;
            row.rr_prediction = rr_efficiency_prediction(workload, sigma);

            const std::int64_t budget =
                static_cast<std::int64_t>(cfg.channel_count) * horizon;
            row.admissible = total <= budget;
            row.max_efficiency =
                row.admissible ? 1.0
                               : static_cast<double>(budget) / static_cast<double>(total);

            if (row.nominal_density > 0.0 && row.nominal_density < 1.0) {
                row.domain = "ok";
                row.urop_bound = urop_lower_bound(cfg, row.nominal_density);
            } else {
                row.domain = "out_of_domain";
            }
            rows.push_back(row);
        }
    }

    if (emit_csv) {
        std::filesystem::create_directories(out_dir);
        const auto path =
            (std::filesystem::path(out_dir) / (spec.label + "_bounds.csv")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw SimError("cannot open for writing: " + path);
        }
        out << "m,k,N,count_high,d_high,d_low,D,domain,urop_bound,rr_prediction,admissible,"
               "max_efficiency\n";
        for (const auto& row : rows) {
            out << row.node_count << ',' << row.channel_count << ',' << row.horizon << ','
                << row.profile.count_high << ',' << format_double(row.profile.d_high) << ','
                << format_double(row.profile.d_low) << ','
                << format_double(row.nominal_density) << ',' << row.domain << ','
                << format_double(row.urop_bound) << ',' << format_double(row.rr_prediction)
                << ',' << (row.admissible ? "true" : "false") << ','
                << format_double(row.max_efficiency) << '\n';
        }
    }
    return rows;
}

} // namespace ehsim
