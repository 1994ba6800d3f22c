#pragma once

// File formats. All numeric output goes through shortest-round-trip
// formatting (std::to_chars), so identical inputs produce byte-identical
// files on every platform.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ehsim/core.hpp"
#include "ehsim/metrics.hpp"

namespace ehsim {

/// Shortest decimal string that round-trips the value ("nan"/"inf" for
/// non-finite input).
std::string format_double(double value);

/// Trace CSV: header "node_id,1,2,..,N", one row per node with its per-slot
/// harvest amounts. Initial batteries are not part of the format; importers
/// default them to zero.
void write_trace_csv(const HarvestTrace& trace, std::ostream& out);
void write_trace_csv(const HarvestTrace& trace, const std::string& path);
HarvestTrace read_trace_csv(std::istream& in);
HarvestTrace read_trace_csv(const std::string& path);

/// Slot log CSV: header "slot,channel,node_id,outcome"; slots are 1-based,
/// node_id is -1 on unassigned channels, outcome is one of
/// transmitted|idle|unassigned.
void write_slot_log_csv(const RunRecord& run, std::ostream& out);
void write_slot_log_csv(const RunRecord& run, const std::string& path);

/// One sweep result row (one policy, one seed, one checkpoint horizon).
struct SweepRow {
    std::string policy;
    std::string process;
    int node_count = 0;
    int channel_count = 0;
    int horizon = 0;
    double nominal_density = 0.0;
    std::uint64_t seed = 0;
    double efficiency = 0.0;
    double jain = std::numeric_limits<double>::quiet_NaN();
    double bound_t4 = 0.0;
    double bound_t5 = std::numeric_limits<double>::quiet_NaN();
    double rr_prediction = 0.0;
};

inline constexpr const char* kSweepCsvHeader =
    "policy,process,m,k,N,D,seed,efficiency,jain,bound_t4,bound_t5,rr_prediction";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// JSON run summary: config, seed, per-node tallies and the efficiency
/// report. Non-finite metrics serialize as null.
std::string run_summary_json(const RunRecord& run, const EfficiencyReport& report,
                             const std::string& process, double nominal_density,
                             std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

} // namespace ehsim
