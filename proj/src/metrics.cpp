#include "ehsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ehsim {

namespace {

std::int64_t floor_tol(double value) {
    return static_cast<std::int64_t>(std::floor(value + kEnergyTolerance));
}

/// Per-node deliverable packets over (elapsed, N]: the horizon ceiling minus
/// what the node could already have delivered in the first `elapsed` slots
/// (at most one packet per slot, never more than its ceiling so far).
std::vector<std::int64_t> remaining_packets(const HarvestTrace& trace, int elapsed) {
    const int m = trace.node_count;
    std::vector<std::int64_t> remaining(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double b0 = trace.initial_battery[static_cast<std::size_t>(i)];
        const std::int64_t ceiling_n = floor_tol(b0 + trace.harvested_through(i, trace.horizon));
        const std::int64_t ceiling_t = floor_tol(b0 + trace.harvested_through(i, elapsed));
        const std::int64_t served = std::min<std::int64_t>(elapsed, ceiling_t);
        remaining[static_cast<std::size_t>(i)] = ceiling_n - served;
    }
    return remaining;
}

void check_elapsed(const NetworkConfig& config, int elapsed) {
    if (elapsed < 0 || elapsed >= config.horizon) {
        throw ParamError("elapsed slot count must lie in [0, horizon)");
    }
}

} // namespace

std::vector<std::int64_t> fully_efficient_packets(const HarvestTrace& trace) {
    std::vector<std::int64_t> ceilings(static_cast<std::size_t>(trace.node_count));
    for (int i = 0; i < trace.node_count; ++i) {
        ceilings[static_cast<std::size_t>(i)] =
            floor_tol(trace.initial_battery[static_cast<std::size_t>(i)] +
                      trace.harvested_through(i, trace.horizon));
    }
    return ceilings;
}

std::int64_t default_opt_throughput(const HarvestTrace& trace, const NetworkConfig& config) {
    std::int64_t total = 0;
    for (auto v : fully_efficient_packets(trace)) {
        total += v;
    }
    const std::int64_t capacity =
        static_cast<std::int64_t>(config.channel_count) * config.horizon;
    return std::min(total, capacity);
}

double density(const HarvestTrace& trace, const NetworkConfig& config) {
    std::int64_t total = 0;
    for (auto v : fully_efficient_packets(trace)) {
        total += v;
    }
    return static_cast<double>(total) /
           (static_cast<double>(config.channel_count) * config.horizon);
}

double partial_density(const HarvestTrace& trace, const NetworkConfig& config, int elapsed) {
    check_elapsed(config, elapsed);
    std::int64_t total = 0;
    for (auto v : remaining_packets(trace, elapsed)) {
        total += v;
    }
    return static_cast<double>(total) /
           (static_cast<double>(config.channel_count) * (config.horizon - elapsed));
}

CapacityResult capacity_check(const HarvestTrace& trace, const NetworkConfig& config,
                              int elapsed) {
    check_elapsed(config, elapsed);
    std::int64_t total = 0;
    for (auto v : remaining_packets(trace, elapsed)) {
        total += v;
    }
    const std::int64_t budget =
        static_cast<std::int64_t>(config.channel_count) * (config.horizon - elapsed);
    CapacityResult result;
    if (total > budget) {
        result.admissible = false;
        result.max_efficiency = static_cast<double>(budget) / static_cast<double>(total);
    }
    return result;
}

double rr_efficiency_prediction(std::span<const std::int64_t> workload, double sigma) {
    double total = 0.0;
    for (auto v : workload) {
        total += static_cast<double>(v);
    }
    if (total <= 0.0) {
        return 1.0;
    }
    const double sigma_floor = std::floor(sigma);
    const bool integral = std::abs(sigma - std::round(sigma)) < 1e-9;

    double excess = 0.0;
    for (auto v : workload) {
        const double value = static_cast<double>(v);
        if (value <= sigma) {
            continue;
        }
        // Integral allotment: a heavy node delivers at most sigma packets.
        // Fractional allotment: it gets floor(sigma)+1 slots at best.
        excess += integral ? (value - sigma) : (value - sigma_floor - 1.0);
    }
    return 1.0 - excess / total;
}

double rr_efficiency_prediction(const HarvestTrace& trace, const NetworkConfig& config,
                                int elapsed) {
    check_elapsed(config, elapsed);
    const auto remaining = remaining_packets(trace, elapsed);
    const double sigma = static_cast<double>(config.channel_count) *
                         (config.horizon - elapsed) / config.node_count;
    return rr_efficiency_prediction(remaining, sigma);
}

double urop_lower_bound(const NetworkConfig& config, double network_density) {
    if (!(network_density > 0.0) || !(network_density < 1.0)) {
        throw DomainError("urop_lower_bound requires density strictly inside (0, 1)");
    }
    const double denom = (1.0 - network_density) * network_density *
                         static_cast<double>(config.horizon) * config.channel_count;
    return std::max(0.0, 1.0 - 2.0 * static_cast<double>(config.node_count) / denom);
}

int earliest_final_drop(const RunRecord& run, int elapsed) {
    const int m = run.config.node_count;
    std::vector<int> last_drop(static_cast<std::size_t>(m), 0); // 0 = never dropped
    const auto limit = std::min<std::size_t>(run.slots.size(), static_cast<std::size_t>(elapsed));
    for (std::size_t t = 0; t < limit; ++t) {
        for (const auto& ch : run.slots[t].channels) {
            if (ch.outcome == Outcome::Idle) {
                last_drop[static_cast<std::size_t>(ch.node)] = static_cast<int>(t) + 1;
            }
        }
    }
    int t0 = elapsed;
    for (int i = 0; i < m; ++i) {
        t0 = std::min(t0, last_drop[static_cast<std::size_t>(i)]);
    }
    return t0;
}

int earliest_final_drop(const RunRecord& run) {
    return earliest_final_drop(run, run.config.horizon);
}

double run_efficiency_floor(const RunRecord& run, const HarvestTrace& trace, int drop_slot) {
    std::int64_t total = 0;
    for (auto v : fully_efficient_packets(trace)) {
        total += v;
    }
    if (total == 0) {
        return 0.0;
    }
    const double tail = static_cast<double>(run.config.channel_count) *
                        (run.config.horizon - drop_slot);
    return 1.0 - tail / static_cast<double>(total);
}

double run_efficiency_floor(const RunRecord& run, const HarvestTrace& trace) {
    return run_efficiency_floor(run, trace, earliest_final_drop(run));
}

double jain_fairness(std::span<const double> x) {
    if (x.empty()) {
        throw DomainError("jain_fairness needs a nonempty allocation vector");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : x) {
        if (!(v >= 0.0)) {
            throw DomainError("jain_fairness needs nonnegative allocations");
        }
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) {
        throw DomainError("jain_fairness is undefined for an all-zero vector");
    }
    return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

EfficiencyReport make_report(const RunRecord& run, const HarvestTrace& trace,
                             const NetworkConfig& config,
                             std::optional<std::int64_t> oracle_opt,
                             bool use_oracle_norm) {
    EfficiencyReport report;
    report.total_sent = run.total_sent;
    report.ceiling_opt = default_opt_throughput(trace, config);
    report.oracle_opt = oracle_opt;
    report.opt_throughput =
        (use_oracle_norm && oracle_opt) ? *oracle_opt : report.ceiling_opt;
    report.efficiency =
        report.opt_throughput == 0
            ? 1.0
            : static_cast<double>(report.total_sent) / static_cast<double>(report.opt_throughput);

    const auto ceilings = fully_efficient_packets(trace);
    report.per_node_x.resize(static_cast<std::size_t>(config.node_count));
    std::vector<double> valid;
    valid.reserve(report.per_node_x.size());
    for (int i = 0; i < config.node_count; ++i) {
        const auto ceiling = ceilings[static_cast<std::size_t>(i)];
        if (ceiling == 0) {
            report.per_node_x[static_cast<std::size_t>(i)] =
                std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double x = static_cast<double>(run.sent_by(i)) / static_cast<double>(ceiling);
        report.per_node_x[static_cast<std::size_t>(i)] = x;
        valid.push_back(x);
    }
    if (!valid.empty()) {
        double sum_sq = 0.0;
        for (double v : valid) {
            sum_sq += v * v;
        }
        if (sum_sq > 0.0) {
            report.jain = jain_fairness(valid);
        }
    }
    return report;
}

double cumulative_efficiency(const RunRecord& run, const HarvestTrace& trace,
                             const NetworkConfig& config, int elapsed) {
    if (elapsed < 1 || elapsed > config.horizon) {
        throw ParamError("checkpoint must lie in [1, horizon]");
    }
    std::int64_t ceiling = 0;
    for (int i = 0; i < config.node_count; ++i) {
        ceiling += floor_tol(trace.initial_battery[static_cast<std::size_t>(i)] +
                             trace.harvested_through(i, elapsed));
    }
    ceiling = std::min(ceiling, static_cast<std::int64_t>(config.channel_count) * elapsed);
    if (ceiling == 0) {
        return 1.0;
    }
    return static_cast<double>(run.sent_cumulative[static_cast<std::size_t>(elapsed - 1)]) /
           static_cast<double>(ceiling);
}

std::vector<std::int64_t> sent_per_node(const RunRecord& run, int elapsed) {
    std::vector<std::int64_t> sent(static_cast<std::size_t>(run.config.node_count), 0);
    const auto limit = std::min<std::size_t>(run.slots.size(), static_cast<std::size_t>(elapsed));
    for (std::size_t t = 0; t < limit; ++t) {
        for (const auto& ch : run.slots[t].channels) {
            if (ch.outcome == Outcome::Transmitted) {
                sent[static_cast<std::size_t>(ch.node)] += 1;
            }
        }
    }
    return sent;
}

} // namespace ehsim
