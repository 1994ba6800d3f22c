#include "ehsim/core.hpp"

#include <algorithm>
#include <cmath>

#include "ehsim/policy.hpp"

namespace ehsim {

void NetworkConfig::validate() const {
    if (node_count < 1) {
        throw ConfigError("node_count must be positive");
    }
    if (channel_count < 1 || channel_count > node_count) {
        throw ConfigError("channel_count must satisfy 1 <= k <= m");
    }
    if (horizon < 1) {
        throw ConfigError("horizon must be at least one slot");
    }
    if (bounded() && !(battery_cap > 0.0)) {
        throw ConfigError("battery_cap must be positive when bounded");
    }
}

HarvestTrace HarvestTrace::zeros(int node_count, int horizon) {
    HarvestTrace trace;
    trace.node_count = node_count;
    trace.horizon = horizon;
    trace.slot_major.assign(static_cast<std::size_t>(node_count) * horizon, 0.0);
    trace.initial_battery.assign(static_cast<std::size_t>(node_count), 0.0);
    return trace;
}

double HarvestTrace::harvested_through(int node, int upto) const {
    double sum = 0.0;
    for (int t = 0; t < upto; ++t) {
        sum += at(node, t);
    }
    return sum;
}

HarvestTrace HarvestTrace::prefix(int horizon_prefix) const {
    if (horizon_prefix < 0 || horizon_prefix > horizon) {
        throw ParamError("trace prefix length out of range");
    }
    HarvestTrace out;
    out.node_count = node_count;
    out.horizon = horizon_prefix;
    out.slot_major.assign(slot_major.begin(),
                          slot_major.begin() +
                              static_cast<std::ptrdiff_t>(horizon_prefix) * node_count);
    out.initial_battery = initial_battery;
    return out;
}

void HarvestTrace::validate(const NetworkConfig& config) const {
    if (node_count != config.node_count || horizon != config.horizon) {
        throw ConfigError("trace dimensions do not match network config");
    }
    if (slot_major.size() != static_cast<std::size_t>(node_count) * horizon ||
        initial_battery.size() != static_cast<std::size_t>(node_count)) {
        throw ConfigError("trace storage is inconsistent with its dimensions");
    }
    for (double e : slot_major) {
        if (!(e >= 0.0)) {
            throw ConfigError("harvest entries must be nonnegative");
        }
    }
    for (double b : initial_battery) {
        if (!(b >= 0.0)) {
            throw ConfigError("initial batteries must be nonnegative");
        }
    }
}

int ScheduleDecision::assigned_count() const {
    int count = 0;
    for (auto node : node_of_channel) {
        count += (node != kNoNode) ? 1 : 0;
    }
    return count;
}

void ScheduleDecision::validate(int node_count) const {
    std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
    for (auto node : node_of_channel) {
        if (node == kNoNode) {
            continue;
        }
        if (node < 0 || node >= node_count) {
            throw DecisionError("scheduled node id out of range");
        }
        if (seen[static_cast<std::size_t>(node)]) {
            throw DecisionError("node scheduled on two channels in one slot");
        }
        seen[static_cast<std::size_t>(node)] = 1;
    }
}

std::int64_t SlotFeedback::transmitted_count() const {
    std::int64_t count = 0;
    for (const auto& ch : channels) {
        count += (ch.outcome == Outcome::Transmitted) ? 1 : 0;
    }
    return count;
}

SlotFeedback advance_slot(std::vector<NodeState>& states,
                          const ScheduleDecision& decision,
                          std::span<const double> harvest_column,
                          double battery_cap,
                          bool harvest_within_slot) {
    const int m = static_cast<int>(states.size());
    if (harvest_column.size() != states.size()) {
        throw ConfigError("harvest column length does not match node states");
    }
    decision.validate(m);

    // Pre-harvest batteries drive the transmit test when energy harvested
    // in the current slot only becomes usable from the next slot on.
    std::vector<double> transmit_basis;
    if (!harvest_within_slot) {
        transmit_basis.reserve(states.size());
        for (const auto& st : states) {
            transmit_basis.push_back(st.battery);
        }
    }

    for (int i = 0; i < m; ++i) {
        const double h = harvest_column[static_cast<std::size_t>(i)];
        if (!(h >= 0.0)) {
            throw ConfigError("harvest entries must be nonnegative");
        }
        auto& st = states[static_cast<std::size_t>(i)];
        st.total_harvested += h;
        st.battery += h;
        if (st.battery > battery_cap) {
            st.overflow_lost += st.battery - battery_cap;
            st.battery = battery_cap;
        }
    }

    SlotFeedback feedback;
    feedback.channels.resize(decision.node_of_channel.size());
    for (std::size_t c = 0; c < decision.node_of_channel.size(); ++c) {
        const auto node = decision.node_of_channel[c];
        auto& ch = feedback.channels[c];
        ch.node = node;
        if (node == kNoNode) {
            ch.outcome = Outcome::Unassigned;
            continue;
        }
        auto& st = states[static_cast<std::size_t>(node)];
        const double basis =
            harvest_within_slot ? st.battery : transmit_basis[static_cast<std::size_t>(node)];
        if (basis >= 1.0) {
            st.battery -= 1.0;
            st.packets_sent += 1;
            ch.outcome = Outcome::Transmitted;
        } else {
            ch.outcome = Outcome::Idle;
        }
    }
    return feedback;
}


RunRecord run_simulation(const NetworkConfig& config,
                         const HarvestTrace& trace,
                         Policy& policy) {
    config.validate();
    trace.validate(config);
    policy.reset(config);

    const int m = config.node_count;
    const int n = config.horizon;

    std::vector<NodeState> states(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        auto& st = states[static_cast<std::size_t>(i)];
        st.battery = trace.initial_battery[static_cast<std::size_t>(i)];
        if (st.battery > config.battery_cap) {
            st.overflow_lost += st.battery - config.battery_cap;
            st.battery = config.battery_cap;
        }
    }

    RunRecord record;
    record.config = config;
    record.policy_name = policy.name();
    record.slots.reserve(static_cast<std::size_t>(n));
    record.sent_cumulative.reserve(static_cast<std::size_t>(n));

    const bool omniscient = policy.needs_battery_state();
    std::vector<double> battery_view;
    SlotFeedback previous;
    std::int64_t total = 0;

    for (int t = 0; t < n; ++t) {
        const auto column = trace.slot_column(t);
        std::span<const double> view;
        if (omniscient) {
            battery_view.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                double b = states[static_cast<std::size_t>(i)].battery;
                if (config.harvest_within_slot) {
                    b = std::min(b + column[static_cast<std::size_t>(i)], config.battery_cap);
                }
                battery_view[static_cast<std::size_t>(i)] = b;
            }
            view = battery_view;
        }

        ScheduleDecision decision = policy.decide(t == 0 ? nullptr : &previous, view);
        if (decision.channel_count() != config.channel_count) {
            throw DecisionError("policy returned wrong channel count at slot " +
                                std::to_string(t + 1));
        }
        try {
            decision.validate(m);
        } catch (const DecisionError& err) {
            throw DecisionError(std::string(err.what()) + " at slot " + std::to_string(t + 1));
        }

        SlotFeedback feedback = advance_slot(states, decision, column, config.battery_cap,
                                             config.harvest_within_slot);

        // Partial-optimality identity: a scheduled node that cannot send has
        // exhausted every whole packet it ever had available, i.e. its sent
        // count equals the floor of its received energy. Checked through the
        // conservation form sent <= received < sent + 1 so that fractional
        // harvests sitting a rounding error below an integer do not trip it.
        for (const auto& ch : feedback.channels) {
            if (ch.outcome != Outcome::Idle) {
                continue;
            }
            const auto& st = states[static_cast<std::size_t>(ch.node)];
            const double receivable = trace.initial_battery[static_cast<std::size_t>(ch.node)] +
                                      st.total_harvested - st.overflow_lost;
            const double residue = receivable - static_cast<double>(st.packets_sent);
            record.partial_optimality_checks += 1;
            if (residue < -kEnergyTolerance || residue >= 1.0 + kEnergyTolerance) {
                throw SimError("partial-optimality violated for node " +
                               std::to_string(ch.node) + " at slot " + std::to_string(t + 1));
            }
        }

        total += feedback.transmitted_count();
        record.sent_cumulative.push_back(total);
        record.slots.push_back(std::move(feedback));
        previous = record.slots.back();
    }

    record.final_states = std::move(states);
    record.total_sent = total;
    return record;
}

} // namespace ehsim
