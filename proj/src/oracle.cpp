#include "ehsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "ehsim/metrics.hpp"
#include "ehsim/policy.hpp"

namespace ehsim {

namespace {

constexpr std::int64_t kInfiniteCap = std::int64_t{1} << 60;

std::int64_t floor_tol(double value) {
    return static_cast<std::int64_t>(std::floor(value + kEnergyTolerance));
}

} // namespace

void FlowInstance::add_edge(int from, int to, std::int64_t cap) {
    edge_to.push_back(to);
    edge_cap.push_back(cap);
    edge_next.push_back(head[static_cast<std::size_t>(from)]);
    head[static_cast<std::size_t>(from)] = static_cast<int>(edge_to.size()) - 1;

    edge_to.push_back(from);
    edge_cap.push_back(0);
    edge_next.push_back(head[static_cast<std::size_t>(to)]);
    head[static_cast<std::size_t>(to)] = static_cast<int>(edge_to.size()) - 1;
}

FlowInstance FlowInstance::build(const HarvestTrace& trace, const NetworkConfig& config) {
    config.validate();
    trace.validate(config);
    const int m = config.node_count;
    const int n = config.horizon;

    FlowInstance fi;
    fi.vertex_count = 2 + m * n + n;
    fi.source = 0;
    fi.sink = 1;
    fi.head.assign(static_cast<std::size_t>(fi.vertex_count), -1);

    auto cell = [n](int node, int slot) { return 2 + node * n + slot; };
    auto hub = [m, n](int slot) { return 2 + m * n + slot; };

    const std::int64_t carry_cap =
        config.bounded() ? floor_tol(config.battery_cap) : kInfiniteCap;

    // Edge ids are recorded per arc family so a feasible greedy flow can be
    // preloaded before running the max-flow phases.
    std::vector<int> arrival_edge(static_cast<std::size_t>(m) * n, -1);
    std::vector<int> carry_edge(static_cast<std::size_t>(m) * n, -1);
    std::vector<int> transmit_edge(static_cast<std::size_t>(m) * n, -1);
    std::vector<int> hub_edge(static_cast<std::size_t>(n), -1);
    std::vector<std::int64_t> arrival_units(static_cast<std::size_t>(m) * n, 0);

    for (int i = 0; i < m; ++i) {
        double cumulative = trace.initial_battery[static_cast<std::size_t>(i)];
        std::int64_t prev_floor = 0;
        for (int t = 0; t < n; ++t) {
            cumulative += trace.at(i, t);
            const std::int64_t cur_floor = floor_tol(cumulative);
            const std::int64_t delta = cur_floor - prev_floor;
            prev_floor = cur_floor;
            const auto idx = static_cast<std::size_t>(i) * n + t;
            if (delta > 0) {
                arrival_edge[idx] = static_cast<int>(fi.edge_to.size());
                fi.add_edge(fi.source, cell(i, t), delta);
                arrival_units[idx] = delta;
            }
            if (t + 1 < n) {
                carry_edge[idx] = static_cast<int>(fi.edge_to.size());
                fi.add_edge(cell(i, t), cell(i, t + 1), carry_cap);
            }
            transmit_edge[idx] = static_cast<int>(fi.edge_to.size());
            fi.add_edge(cell(i, t), hub(t), 1);
        }
    }
    for (int t = 0; t < n; ++t) {
        hub_edge[static_cast<std::size_t>(t)] = static_cast<int>(fi.edge_to.size());
        fi.add_edge(hub(t), fi.sink, config.channel_count);
    }

    if (config.bounded()) {
        return fi; // greedy preload below assumes uncapped storage
    }

    // Preload: an omniscient largest-backlog-first pass that is feasible by
    // construction. Whatever it leaves on the table, the max-flow phases
    // recover; at full scale this removes nearly all augmenting work.
    std::vector<std::int64_t> available(static_cast<std::size_t>(m), 0);
    std::vector<std::deque<int>> pending(static_cast<std::size_t>(m));
    std::vector<std::pair<std::int64_t, int>> ranked;
    ranked.reserve(static_cast<std::size_t>(m));

    auto push_unit = [&](int node, int send_slot) {
        const auto node_idx = static_cast<std::size_t>(node);
        const int arrive_slot = pending[node_idx].front();
        pending[node_idx].pop_front();
        const auto arrive_idx = static_cast<std::size_t>(node) * n + arrive_slot;
        const int ae = arrival_edge[arrive_idx];
        fi.edge_cap[static_cast<std::size_t>(ae)] -= 1;
        fi.edge_cap[static_cast<std::size_t>(ae) + 1] += 1;
        for (int t = arrive_slot; t < send_slot; ++t) {
            const int ce = carry_edge[static_cast<std::size_t>(node) * n + t];
            fi.edge_cap[static_cast<std::size_t>(ce)] -= 1;
            fi.edge_cap[static_cast<std::size_t>(ce) + 1] += 1;
        }
        const int te = transmit_edge[static_cast<std::size_t>(node) * n + send_slot];
        fi.edge_cap[static_cast<std::size_t>(te)] -= 1;
        fi.edge_cap[static_cast<std::size_t>(te) + 1] += 1;
        const int he = hub_edge[static_cast<std::size_t>(send_slot)];
        fi.edge_cap[static_cast<std::size_t>(he)] -= 1;
        fi.edge_cap[static_cast<std::size_t>(he) + 1] += 1;
        fi.preloaded_ += 1;
    };

    for (int t = 0; t < n; ++t) {
        for (int i = 0; i < m; ++i) {
            const auto idx = static_cast<std::size_t>(i) * n + t;
            for (std::int64_t u = 0; u < arrival_units[idx]; ++u) {
                pending[static_cast<std::size_t>(i)].push_back(t);
            }
            available[static_cast<std::size_t>(i)] += arrival_units[idx];
        }
        ranked.clear();
        for (int i = 0; i < m; ++i) {
            if (available[static_cast<std::size_t>(i)] > 0) {
                ranked.emplace_back(available[static_cast<std::size_t>(i)], i);
            }
        }
        const int take = std::min<int>(config.channel_count, static_cast<int>(ranked.size()));
        if (take < static_cast<int>(ranked.size())) {
            std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.first != b.first) {
                                      return a.first > b.first;
                                  }
                                  return a.second < b.second;
                              });
        }
        for (int j = 0; j < take; ++j) {
            const int node = ranked[static_cast<std::size_t>(j)].second;
            available[static_cast<std::size_t>(node)] -= 1;
            push_unit(node, t);
        }
    }
    return fi;
}

std::int64_t FlowInstance::max_flow() {
    std::vector<int> level(static_cast<std::size_t>(vertex_count));
    std::vector<int> iter(static_cast<std::size_t>(vertex_count));
    std::vector<int> queue(static_cast<std::size_t>(vertex_count));

    auto bfs = [&]() {
        std::fill(level.begin(), level.end(), -1);
        int qh = 0;
        int qt = 0;
        level[static_cast<std::size_t>(source)] = 0;
        queue[qt++] = source;
        while (qh < qt) {
            const int v = queue[qh++];
            for (int e = head[static_cast<std::size_t>(v)]; e != -1;
                 e = edge_next[static_cast<std::size_t>(e)]) {
                const int to = edge_to[static_cast<std::size_t>(e)];
                if (edge_cap[static_cast<std::size_t>(e)] > 0 &&
                    level[static_cast<std::size_t>(to)] < 0) {
                    level[static_cast<std::size_t>(to)] =
                        level[static_cast<std::size_t>(v)] + 1;
                    queue[qt++] = to;
                }
            }
        }
        return level[static_cast<std::size_t>(sink)] >= 0;
    };

    // Iterative blocking-flow DFS; carry chains can be thousands of arcs
    // long, so recursion is avoided.
    std::vector<int> path_edge(static_cast<std::size_t>(vertex_count));
    auto augment = [&]() -> std::int64_t {
        std::int64_t pushed_total = 0;
        int v = source;
        int depth = 0;
        while (true) {
            if (v == sink) {
                std::int64_t bottleneck = kInfiniteCap;
                for (int d = 0; d < depth; ++d) {
                    const int e = path_edge[static_cast<std::size_t>(d)];
                    bottleneck = std::min(bottleneck, edge_cap[static_cast<std::size_t>(e)]);
                }
                for (int d = 0; d < depth; ++d) {
                    const int e = path_edge[static_cast<std::size_t>(d)];
                    edge_cap[static_cast<std::size_t>(e)] -= bottleneck;
                    edge_cap[static_cast<std::size_t>(e ^ 1)] += bottleneck;
                }
                pushed_total += bottleneck;
                // Retreat to the vertex before the first saturated edge.
                int d = 0;
                while (d < depth &&
                       edge_cap[static_cast<std::size_t>(
                           path_edge[static_cast<std::size_t>(d)])] > 0) {
                    ++d;
                }
                depth = d;
                v = source;
                for (int u = 0; u < depth; ++u) {
                    v = edge_to[static_cast<std::size_t>(path_edge[static_cast<std::size_t>(u)])];
                }
                continue;
            }
            bool advanced = false;
            for (int& e = iter[static_cast<std::size_t>(v)]; e != -1;
                 e = edge_next[static_cast<std::size_t>(e)]) {
                const int to = edge_to[static_cast<std::size_t>(e)];
                if (edge_cap[static_cast<std::size_t>(e)] > 0 &&
                    level[static_cast<std::size_t>(to)] ==
                        level[static_cast<std::size_t>(v)] + 1) {
                    path_edge[static_cast<std::size_t>(depth++)] = e;
                    v = to;
                    advanced = true;
                    break;
                }
            }
            if (advanced) {
                continue;
            }
            level[static_cast<std::size_t>(v)] = -1; // dead end this phase
            if (depth == 0) {
                break;
            }
            --depth;
            v = source;
            for (int u = 0; u < depth; ++u) {
                v = edge_to[static_cast<std::size_t>(path_edge[static_cast<std::size_t>(u)])];
            }
            iter[static_cast<std::size_t>(v)] =
                edge_next[static_cast<std::size_t>(path_edge[static_cast<std::size_t>(depth)])];
        }
        return pushed_total;
    };

    std::int64_t flow = preloaded_;
    while (bfs()) {
        for (int v = 0; v < vertex_count; ++v) {
            iter[static_cast<std::size_t>(v)] = head[static_cast<std::size_t>(v)];
        }
        flow += augment();
    }
    return flow;
}

std::int64_t offline_optimum(const HarvestTrace& trace, const NetworkConfig& config) {
    FlowInstance fi = FlowInstance::build(trace, config);
    return fi.max_flow();
}

namespace {

void brute_force_rec(const HarvestTrace& trace, const NetworkConfig& config,
                     const std::vector<std::vector<int>>& subsets, int slot,
                     std::vector<double>& battery, std::int64_t sent, std::int64_t& best) {
    const int n = config.horizon;
    if (sent + static_cast<std::int64_t>(config.channel_count) * (n - slot) <= best) {
        return; // cannot beat the incumbent
    }
    if (slot == n) {
        best = std::max(best, sent);
        return;
    }
    const int m = config.node_count;
    std::vector<double> after_harvest(battery);
    for (int i = 0; i < m; ++i) {
        after_harvest[static_cast<std::size_t>(i)] =
            std::min(after_harvest[static_cast<std::size_t>(i)] + trace.at(i, slot),
                     config.battery_cap);
    }
    for (const auto& subset : subsets) {
        std::vector<double> next(after_harvest);
        std::int64_t gained = 0;
        for (int node : subset) {
            if (next[static_cast<std::size_t>(node)] >= 1.0) {
                next[static_cast<std::size_t>(node)] -= 1.0;
                ++gained;
            }
        }
        brute_force_rec(trace, config, subsets, slot + 1, next, sent + gained, best);
    }
}

} // namespace

std::int64_t brute_force_optimum(const HarvestTrace& trace, const NetworkConfig& config) {
    config.validate();
    trace.validate(config);
    if (config.node_count > 4 || config.channel_count > 2 || config.horizon > 8) {
        throw SizeError("brute force limited to m <= 4, k <= 2, N <= 8");
    }
    // Scheduling a node alongside others never hurts (an extra transmission
    // only adds throughput and lowers that node's overflow risk), so only
    // full k-subsets need enumeration.
    std::vector<std::vector<int>> subsets;
    const int m = config.node_count;
    const int k = config.channel_count;
    std::vector<int> pick(static_cast<std::size_t>(k));
    auto gen = [&](auto&& self, int start, int depth) -> void {
        if (depth == k) {
            subsets.emplace_back(pick);
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[static_cast<std::size_t>(depth)] = i;
            self(self, i + 1, depth + 1);
        }
    };
    gen(gen, 0, 0);

    std::vector<double> battery(trace.initial_battery);
    for (auto& b : battery) {
        b = std::min(b, config.battery_cap);
    }
    std::int64_t best = 0;
    brute_force_rec(trace, config, subsets, 0, battery, 0, best);
    return best;
}

RrThroughputRange enumerate_rr_orderings(const HarvestTrace& trace,
                                         const NetworkConfig& config) {
    config.validate();
    trace.validate(config);
    if (config.node_count > 6) {
        throw SizeError("ordering enumeration limited to m <= 6");
    }
    if (config.node_count % config.channel_count != 0) {
        throw ParamError("ordering enumeration requires m divisible by k");
    }
    std::vector<std::int32_t> order(static_cast<std::size_t>(config.node_count));
    std::iota(order.begin(), order.end(), 0);

    RrThroughputRange range;
    range.min_throughput = std::numeric_limits<std::int64_t>::max();
    range.max_throughput = 0;
    do {
        RoundRobinPolicy policy(order, 1);
        const RunRecord run = run_simulation(config, trace, policy);
        range.min_throughput = std::min(range.min_throughput, run.total_sent);
        range.max_throughput = std::max(range.max_throughput, run.total_sent);
    } while (std::next_permutation(order.begin(), order.end()));
    return range;
}

} // namespace ehsim
