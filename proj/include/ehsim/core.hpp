#pragma once

// Domain types and the single-slot dynamics of the slotted fusion-center
// network: m battery-equipped nodes, k orthogonal channels, unit-energy
// packets, harvested energy accumulating in (optionally capped) batteries.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehsim {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Mismatched dimensions or an invalid network configuration.
struct ConfigError : SimError {
    using SimError::SimError;
};
/// A policy produced a malformed schedule (duplicate node, bad channel).
struct DecisionError : SimError {
    using SimError::SimError;
};
/// Bad generator or metric parameters.
struct ParamError : SimError {
    using SimError::SimError;
};
/// Instance exceeds an exhaustive verifier's size limits.
struct SizeError : SimError {
    using SimError::SimError;
};
/// Argument outside a closed-form expression's domain.
struct DomainError : SimError {
    using SimError::SimError;
};

inline constexpr std::int32_t kNoNode = -1;
inline constexpr double kEnergyTolerance = 1e-9;

constexpr double unbounded_battery() {
    return std::numeric_limits<double>::infinity();
}

struct NetworkConfig {
    int node_count = 0;    // m
    int channel_count = 0; // k
    int horizon = 0;       // N slots
    double battery_cap = unbounded_battery();
    // When true, energy harvested during slot t can already pay for a
    // transmission in slot t (harvest, clamp, then transmit). When false,
    // the transmission test uses the battery as it stood after slot t-1.
    bool harvest_within_slot = true;

    bool bounded() const { return battery_cap != unbounded_battery(); }
    void validate() const;
};

/// Ground-truth energy arrivals for one run: per node, per slot, the energy
/// increment harvested during that slot, plus the initial battery levels.
/// Stored slot-major so the simulator reads one contiguous column per slot.
struct HarvestTrace {
    int node_count = 0;
    int horizon = 0;
    std::vector<double> slot_major;       // [slot * node_count + node]
    std::vector<double> initial_battery;  // size node_count

    static HarvestTrace zeros(int node_count, int horizon);

    double& at(int node, int slot) {
        return slot_major[static_cast<std::size_t>(slot) * node_count + node];
    }
    double at(int node, int slot) const {
        return slot_major[static_cast<std::size_t>(slot) * node_count + node];
    }
    std::span<const double> slot_column(int slot) const {
        return {slot_major.data() + static_cast<std::size_t>(slot) * node_count,
                static_cast<std::size_t>(node_count)};
    }
    /// Total energy harvested by `node` during slots [0, upto).
    double harvested_through(int node, int upto) const;

    /// Copy of the first `horizon_prefix` slots (initial batteries kept).
    HarvestTrace prefix(int horizon_prefix) const;

    void validate(const NetworkConfig& config) const;
};

struct NodeState {
    double battery = 0.0;
    double total_harvested = 0.0;
    std::int64_t packets_sent = 0;
    double overflow_lost = 0.0;
};

/// Channel assignments for one slot; node_of_channel[c] == kNoNode means
/// channel c stays empty. A node may appear on at most one channel.
struct ScheduleDecision {
    std::vector<std::int32_t> node_of_channel;

    explicit ScheduleDecision(int channel_count = 0)
        : node_of_channel(static_cast<std::size_t>(channel_count), kNoNode) {}

    int channel_count() const { return static_cast<int>(node_of_channel.size()); }
    int assigned_count() const;
    void validate(int node_count) const;
};

enum class Outcome : std::uint8_t {
    Unassigned, // channel left empty
    Idle,       // node scheduled but lacked a full packet of energy
    Transmitted // node scheduled and sent one packet
};

struct ChannelFeedback {
    Outcome outcome = Outcome::Unassigned;
    std::int32_t node = kNoNode;
};

/// What the fusion center observes at the end of a slot: one outcome per
/// channel, mirroring that slot's decision. This is the only run-time
/// information non-omniscient policies ever see.
struct SlotFeedback {
    std::vector<ChannelFeedback> channels;

    std::int64_t transmitted_count() const;
};

/// Advance every node by one slot: harvest (clamped at capacity, the clamped
/// excess metered as overflow), then let scheduled nodes with at least one
/// unit of energy transmit. Returns the per-channel feedback.
SlotFeedback advance_slot(std::vector<NodeState>& states,
                          const ScheduleDecision& decision,
                          std::span<const double> harvest_column,
                          double battery_cap,
                          bool harvest_within_slot = true);

class Policy;

/// Full output of one simulation run: the per-slot feedback log, final node
/// tallies and enough identity (config, seed) to reproduce it bit-exactly.
struct RunRecord {
    NetworkConfig config;
    std::string policy_name;
    std::uint64_t policy_seed = 0;
    std::vector<SlotFeedback> slots;            // index = slot (0-based)
    std::vector<NodeState> final_states;
    std::vector<std::int64_t> sent_cumulative;  // totals after each slot
    std::int64_t total_sent = 0;
    std::int64_t partial_optimality_checks = 0;

    std::int64_t sent_by(int node) const { return final_states[static_cast<std::size_t>(node)].packets_sent; }
};

/// Run the slot loop over the whole horizon. The policy is reset first and
/// then queried once per slot with the previous slot's feedback only;
/// battery state is passed solely to policies that declare themselves
/// omniscient. Every Idle outcome is checked against the partial-optimality
/// identity: a node that cannot transmit must already have sent every whole
/// packet of energy it ever received (floor of initial battery plus harvest
/// minus overflow). A violation aborts the run.
RunRecord run_simulation(const NetworkConfig& config,
                         const HarvestTrace& trace,
                         Policy& policy);

} // namespace ehsim
