#pragma once

// Ground-truth offline throughput. The omniscient optimum is the max flow
// of a time-expanded network; exhaustive enumerators validate it (and the
// round-robin throughput spread) on small instances.

#include <cstdint>

#include "ehsim/core.hpp"

namespace ehsim {

/// Time-expanded scheduling network. One vertex per (node, slot) plus one
/// hub per slot: the source feeds (i, t) with the whole packets that become
/// available to node i at slot t, carry arcs (i, t) -> (i, t+1) store energy
/// (capacity = floor(battery cap) when bounded), transmit arcs (i, t) ->
/// hub_t have capacity one, and hub_t -> sink has capacity k.
struct FlowInstance {
    int vertex_count = 0;
    int source = 0;
    int sink = 0;
    std::vector<int> head;        // adjacency list heads
    std::vector<int> edge_to;
    std::vector<int> edge_next;
    std::vector<std::int64_t> edge_cap;

    static FlowInstance build(const HarvestTrace& trace, const NetworkConfig& config);

    void add_edge(int from, int to, std::int64_t cap);

    /// Dinic's algorithm. The builder pre-loads a feasible greedy flow for
    /// unbounded-battery instances so at full scale only the final
    /// optimality phases remain.
    std::int64_t max_flow();

private:
    std::int64_t preloaded_ = 0;
};

/// Maximum packets any offline schedule can deliver: per-slot channel budget
/// k, one packet per node per slot, cumulative whole-packet energy floors.
std::int64_t offline_optimum(const HarvestTrace& trace, const NetworkConfig& config);

/// Exact optimum by exhausting all k-subset decision sequences. Limited to
/// m <= 4, k <= 2, N <= 8 (throws SizeError beyond).
std::int64_t brute_force_optimum(const HarvestTrace& trace, const NetworkConfig& config);

struct RrThroughputRange {
    std::int64_t min_throughput = 0;
    std::int64_t max_throughput = 0;
};

/// Simulate quantum-1 round robin under every node ordering (m <= 6,
/// m divisible by k) and report the extreme throughputs.
RrThroughputRange enumerate_rr_orderings(const HarvestTrace& trace,
                                         const NetworkConfig& config);

} // namespace ehsim
