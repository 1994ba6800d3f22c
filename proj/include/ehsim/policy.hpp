#pragma once

// Scheduling policies. Non-omniscient policies are deterministic functions
// of (seed, feedback history); only the uniformizing omniscient policy is
// handed the true battery vector.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ehsim/core.hpp"

namespace ehsim {

class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string name() const = 0;

    /// True for policies that receive the current battery vector.
    virtual bool needs_battery_state() const { return false; }

    /// Rewind to the initial state for a fresh run over `config`.
    virtual void reset(const NetworkConfig& config) = 0;

    /// Produce the schedule for the next slot. `previous_feedback` is null
    /// on the first slot. `battery_view` is empty unless the policy is
    /// omniscient, in which case it holds the battery levels the transmit
    /// test will use this slot.
    virtual ScheduleDecision decide(const SlotFeedback* previous_feedback,
                                    std::span<const double> battery_view) = 0;

    virtual std::unique_ptr<Policy> clone() const = 0;
};

/// Uniformizing random ordered policy. Nodes are placed in a random cyclic
/// order once; the first k of them are scheduled, a node that transmits
/// keeps its channel, a node that idles is dropped, and each vacated channel
/// is refilled by a cursor walking the cyclic order. A node that is still
/// transmitting when the cursor reaches its position again (an elephant)
/// keeps its channel and is simply passed over. Because a node is dropped
/// the moment it fails to transmit, the on-air set is exactly the set of
/// nodes that have transmitted in every slot since their selection, so the
/// elephant rule reduces to "the cursor skips on-air nodes".
class UropPolicy final : public Policy {
public:
    explicit UropPolicy(std::uint64_t seed);
    /// Fixed-order variant used by tests and worked examples.
    explicit UropPolicy(std::vector<std::int32_t> order);

    std::string name() const override { return "urop"; }
    void reset(const NetworkConfig& config) override;
    ScheduleDecision decide(const SlotFeedback* previous_feedback,
                            std::span<const double> battery_view) override;
    std::unique_ptr<Policy> clone() const override;

    const std::vector<std::int32_t>& order() const { return order_; }

private:
    std::uint64_t seed_ = 0;
    bool fixed_order_ = false;
    std::vector<std::int32_t> order_;
    std::vector<std::int32_t> channel_node_;
    std::vector<char> on_air_;
    int cursor_ = 0;

    void fill_vacancies(ScheduleDecision& decision);
};

/// Open-loop round robin with a configurable quantum: block b of the order
/// holds the k channels for `quantum` consecutive slots, then the window
/// advances k positions. Feedback is ignored entirely.
class RoundRobinPolicy final : public Policy {
public:
    explicit RoundRobinPolicy(std::uint64_t seed, int quantum = 1);
    RoundRobinPolicy(std::vector<std::int32_t> order, int quantum);

    std::string name() const override { return "rr"; }
    void reset(const NetworkConfig& config) override;
    ScheduleDecision decide(const SlotFeedback* previous_feedback,
                            std::span<const double> battery_view) override;
    std::unique_ptr<Policy> clone() const override;

    int quantum() const { return quantum_; }

private:
    std::uint64_t seed_ = 0;
    bool fixed_order_ = false;
    int quantum_ = 1;
    std::vector<std::int32_t> order_;
    int node_count_ = 0;
    int channel_count_ = 0;
    std::int64_t slot_ = 0;
};

/// Omniscient uniformizing policy: keeps previously scheduled nodes while
/// they still hold a full packet of energy and replaces depleted ones by
/// cycling the fixed order over nodes with battery >= 1. Schedules fewer
/// than k nodes only when fewer than k nodes have energy.
class UniformizingPolicy final : public Policy {
public:
    explicit UniformizingPolicy(std::uint64_t seed);
    explicit UniformizingPolicy(std::vector<std::int32_t> order);

    std::string name() const override { return "up"; }
    bool needs_battery_state() const override { return true; }
    void reset(const NetworkConfig& config) override;
    ScheduleDecision decide(const SlotFeedback* previous_feedback,
                            std::span<const double> battery_view) override;
    std::unique_ptr<Policy> clone() const override;

private:
    std::uint64_t seed_ = 0;
    bool fixed_order_ = false;
    std::vector<std::int32_t> order_;
    std::vector<std::int32_t> channel_node_;
    std::vector<char> on_air_;
    int cursor_ = 0;
};

/// Build a policy from its CLI name ("urop", "rr", "up") and parameters.
std::unique_ptr<Policy> make_policy(const std::string& kind,
                                    std::uint64_t seed,
                                    int quantum = 1);

} // namespace ehsim
