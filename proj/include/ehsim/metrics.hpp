#pragma once

// Efficiency, density, fairness and the closed-form throughput bounds.
// Conventions: V_i(T) = floor(B_i(0) + total harvest of node i through slot
// T) is the most packets node i could possibly have delivered by T; a trace
// is saturated over (T, N] when the remaining deliverable packets exceed the
// channel budget k*(N-T).

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ehsim/core.hpp"

namespace ehsim {

/// floor(B_i(0) + E_i^tot(N)) per node: the per-node offline ceiling.
std::vector<std::int64_t> fully_efficient_packets(const HarvestTrace& trace);

/// min(k*N, sum of per-node ceilings): the default throughput normalizer.
std::int64_t default_opt_throughput(const HarvestTrace& trace, const NetworkConfig& config);

/// Network density D = (total deliverable packets) / (k*N).
double density(const HarvestTrace& trace, const NetworkConfig& config);

/// Density of the remaining workload over slots (T, N], where the first T
/// slots are assumed served at the per-node optimum (a node can have sent at
/// most min(T, V_i(T)) packets by T). T counts elapsed slots; T = 0 reduces
/// to density().
double partial_density(const HarvestTrace& trace, const NetworkConfig& config, int elapsed);

struct CapacityResult {
    bool admissible = true;
    double max_efficiency = 1.0; // k*(N-T) / V_tot^(T) when saturated
};

/// Scheduling-capacity test over (T, N]: saturated traces cannot be served
/// at 100% efficiency by any policy.
CapacityResult capacity_check(const HarvestTrace& trace, const NetworkConfig& config,
                              int elapsed);

/// Closed-form round-robin (quantum 1) efficiency prediction over (T, N].
/// Nodes whose remaining workload exceeds their round-robin allotment sigma
/// = k*(N-T)/m lose the excess; the integral and fractional-sigma cases use
/// the matching closed forms.
double rr_efficiency_prediction(const HarvestTrace& trace, const NetworkConfig& config,
                                int elapsed);

/// Same closed form evaluated on an explicit per-node workload vector with
/// allotment sigma; lets callers tabulate predictions without materializing
/// a trace.
double rr_efficiency_prediction(std::span<const std::int64_t> workload, double sigma);

/// Expected-efficiency floor for the uniformizing random ordered policy:
/// max(0, 1 - 2m / ((1-D) * D * N * k)), valid for 0 < D < 1.
double urop_lower_bound(const NetworkConfig& config, double network_density);

/// Earliest final-drop slot over all nodes (1-based count), or 0 when some
/// node was never observed idle. This anchors the per-run
/// efficiency bound below.
int earliest_final_drop(const RunRecord& run);

/// Per-run efficiency floor 1 - k*(N - drop_slot) / (total deliverable
/// packets), with drop_slot the earliest final drop, evaluated from the
/// run's own slot log. Not clamped; a nonpositive value just means the run
/// carries no information.
double run_efficiency_floor(const RunRecord& run, const HarvestTrace& trace);
double run_efficiency_floor(const RunRecord& run, const HarvestTrace& trace, int drop_slot);

/// Jain fairness index (sum x)^2 / (n * sum x^2) over nonnegative
/// allocations; throws DomainError when every entry is zero.
double jain_fairness(std::span<const double> x);

struct EfficiencyReport {
    std::int64_t total_sent = 0;
    std::int64_t opt_throughput = 0;              // normalizer used below
    std::int64_t ceiling_opt = 0;                  // min(kN, sum of ceilings)
    std::optional<std::int64_t> oracle_opt;       // offline optimum, if computed
    double efficiency = 1.0;
    std::vector<double> per_node_x;               // V_i / V_i_opt; NaN when V_i_opt = 0
    double jain = std::numeric_limits<double>::quiet_NaN();
};

/// Assemble the standard report for a finished run. When `oracle_opt` is
/// supplied and `use_oracle_norm` is set, efficiency is normalized by the
/// offline optimum instead of the per-node-ceiling bound. Nodes with a zero
/// ceiling are excluded from the fairness vector.
EfficiencyReport make_report(const RunRecord& run, const HarvestTrace& trace,
                             const NetworkConfig& config,
                             std::optional<std::int64_t> oracle_opt = std::nullopt,
                             bool use_oracle_norm = false);

/// Cumulative efficiency after `elapsed` slots of a run, normalized by the
/// prefix ceiling min(k*elapsed, sum_i V_i(elapsed)).
double cumulative_efficiency(const RunRecord& run, const HarvestTrace& trace,
                             const NetworkConfig& config, int elapsed);

/// Packets delivered per node during the first `elapsed` slots.
std::vector<std::int64_t> sent_per_node(const RunRecord& run, int elapsed);

/// Earliest final-drop slot within the first `elapsed` slots (0 when some
/// node was never dropped in that window).
int earliest_final_drop(const RunRecord& run, int elapsed);

} // namespace ehsim
