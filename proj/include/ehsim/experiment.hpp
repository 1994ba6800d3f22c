#pragma once

// Configuration-driven experiment runner: parse a flat key=value spec file,
// sweep (policy, seed) cells (in parallel, with deterministic output
// ordering), and emit the results CSV plus per-run JSON summaries.

#include <cstdint>
#include <string>
#include <vector>

#include "ehsim/core.hpp"
#include "ehsim/harvest.hpp"
#include "ehsim/io.hpp"

namespace ehsim {

struct PolicySpec {
    std::string kind = "urop"; // urop | rr | up
    int quantum = 1;           // rr only
};

struct ProfileSpec {
    int count_high = 0;
    double d_high = 0.0;
    double d_low = 0.0;

    DensityProfile build(int node_count) const {
        return make_profile(count_high, d_high, d_low, node_count);
    }
    double nominal_density(int node_count) const {
        return (count_high * d_high + (node_count - count_high) * d_low) / node_count;
    }
};

struct ExperimentSpec {
    NetworkConfig config;
    std::string process = "poisson"; // deterministic | poisson | markov
    ProfileSpec profile;
    MarkovHarvestParams markov = MarkovHarvestParams::defaults();
    std::vector<PolicySpec> policies;
    std::vector<std::uint64_t> seeds;
    std::vector<int> checkpoints; // empty = report at the horizon only
    bool use_oracle_norm = false;
    bool write_slot_log = false;
    std::string label = "experiment";

    // bounds-table grid (used by run_bounds; ignored by run_experiment)
    std::vector<ProfileSpec> bound_profiles;
    std::vector<int> bound_horizons;

    void validate() const; // throws ConfigError naming the offending field
};

ExperimentSpec parse_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_text(const std::string& text, const std::string& origin);

/// Build the trace a given seed denotes under this spec's process family.
HarvestTrace make_trace(const ExperimentSpec& spec, std::uint64_t seed);

struct ExperimentResult {
    std::vector<SweepRow> rows;
    std::string csv_path; // empty when CSV output was disabled
};

/// Run every (policy, seed) cell and write <label>_results.csv (plus JSON
/// summaries and slot logs when enabled) under out_dir. Rows are ordered by
/// (policy, seed, checkpoint) regardless of completion order.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                bool emit_csv = true, bool emit_json = true);

struct BoundsRow {
    int node_count = 0;
    int channel_count = 0;
    int horizon = 0;
    ProfileSpec profile;
    double nominal_density = 0.0;
    std::string domain;    // "ok" or "out_of_domain"
    double urop_bound = std::numeric_limits<double>::quiet_NaN();
    double rr_prediction = 1.0;
    bool admissible = true;
    double max_efficiency = 1.0;
};

/// Evaluate the analytic bounds over the spec's (profile x horizon) grid
/// without simulating; writes <label>_bounds.csv under out_dir.
std::vector<BoundsRow> run_bounds(const ExperimentSpec& spec, const std::string& out_dir,
                                  bool emit_csv = true);

} // namespace ehsim
