#include "ehsim/policy.hpp"

#include <algorithm>

#include "ehsim/rng.hpp"

namespace ehsim {

namespace {

void check_order(const std::vector<std::int32_t>& order, int node_count) {
    if (static_cast<int>(order.size()) != node_count) {
        throw ConfigError("policy order length does not match node count");
    }
    std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
    for (auto id : order) {
        if (id < 0 || id >= node_count || seen[static_cast<std::size_t>(id)]) {
            throw ConfigError("policy order must be a permutation of node ids");
        }
        seen[static_cast<std::size_t>(id)] = 1;
    }
}

} // namespace

// --- UROP ------------------------------------------------------------------

UropPolicy::UropPolicy(std::uint64_t seed) : seed_(seed) {}

UropPolicy::UropPolicy(std::vector<std::int32_t> order)
    : fixed_order_(true), order_(std::move(order)) {}

void UropPolicy::reset(const NetworkConfig& config) {
    if (fixed_order_) {
        check_order(order_, config.node_count);
    } else {
        Rng rng(mix_seed(seed_, 0x75726f70ULL)); // stream tag: "urop"
        order_ = rng.permutation(config.node_count);
    }
    channel_node_.assign(static_cast<std::size_t>(config.channel_count), kNoNode);
    on_air_.assign(static_cast<std::size_t>(config.node_count), 0);
    cursor_ = 0;
}

void UropPolicy::fill_vacancies(ScheduleDecision& decision) {
    const int m = static_cast<int>(order_.size());
    for (std::size_t c = 0; c < channel_node_.size(); ++c) {
        if (channel_node_[c] != kNoNode) {
            decision.node_of_channel[c] = channel_node_[c];
            continue;
        }
        // One full revolution at most; on-air nodes (elephants included)
        // keep their channels and are passed over.
        for (int step = 0; step < m; ++step) {
            const auto candidate = order_[static_cast<std::size_t>(cursor_)];
            cursor_ = (cursor_ + 1) % m;
            if (!on_air_[static_cast<std::size_t>(candidate)]) {
                channel_node_[c] = candidate;
                on_air_[static_cast<std::size_t>(candidate)] = 1;
                decision.node_of_channel[c] = candidate;
                break;
            }
        }
    }
}

ScheduleDecision UropPolicy::decide(const SlotFeedback* previous_feedback,
                                    std::span<const double> /*battery_view*/) {
    ScheduleDecision decision(static_cast<int>(channel_node_.size()));
    if (previous_feedback != nullptr) {
        for (std::size_t c = 0; c < previous_feedback->channels.size(); ++c) {
            const auto& ch = previous_feedback->channels[c];
            if (ch.outcome == Outcome::Idle) {
                on_air_[static_cast<std::size_t>(ch.node)] = 0;
                channel_node_[c] = kNoNode;
            }
        }
    }
    fill_vacancies(decision);
    return decision;
}

std::unique_ptr<Policy> UropPolicy::clone() const {
    return std::make_unique<UropPolicy>(*this);
}

// --- Round robin -------------------------------------------------------------

RoundRobinPolicy::RoundRobinPolicy(std::uint64_t seed, int quantum)
    : seed_(seed), quantum_(quantum) {
    if (quantum_ < 1) {
        throw ConfigError("round-robin quantum must be at least 1");
    }
}

RoundRobinPolicy::RoundRobinPolicy(std::vector<std::int32_t> order, int quantum)
    : fixed_order_(true), quantum_(quantum), order_(std::move(order)) {
    if (quantum_ < 1) {
        throw ConfigError("round-robin quantum must be at least 1");
    }
}

void RoundRobinPolicy::reset(const NetworkConfig& config) {
    if (fixed_order_) {
        check_order(order_, config.node_count);
    } else {
        Rng rng(mix_seed(seed_, 0x7272ULL)); // stream tag: "rr"
        order_ = rng.permutation(config.node_count);
    }
    node_count_ = config.node_count;
    channel_count_ = config.channel_count;
    slot_ = 0;
}

ScheduleDecision RoundRobinPolicy::decide(const SlotFeedback* /*previous_feedback*/,
                                          std::span<const double> /*battery_view*/) {
    ScheduleDecision decision(channel_count_);
    const std::int64_t block = slot_ / quantum_;
    const int start = static_cast<int>((block * channel_count_) % node_count_);
    for (int c = 0; c < channel_count_; ++c) {
        decision.node_of_channel[static_cast<std::size_t>(c)] =
            order_[static_cast<std::size_t>((start + c) % node_count_)];
    }
    ++slot_;
    return decision;
}

std::unique_ptr<Policy> RoundRobinPolicy::clone() const {
    return std::make_unique<RoundRobinPolicy>(*this);
}

// --- Omniscient uniformizing policy ------------------------------------------

UniformizingPolicy::UniformizingPolicy(std::uint64_t seed) : seed_(seed) {}

UniformizingPolicy::UniformizingPolicy(std::vector<std::int32_t> order)
    : fixed_order_(true), order_(std::move(order)) {}

void UniformizingPolicy::reset(const NetworkConfig& config) {
    if (fixed_order_) {
        check_order(order_, config.node_count);
    } else {
        Rng rng(mix_seed(seed_, 0x7570ULL)); // stream tag: "up"
        order_ = rng.permutation(config.node_count);
    }
    channel_node_.assign(static_cast<std::size_t>(config.channel_count), kNoNode);
    on_air_.assign(static_cast<std::size_t>(config.node_count), 0);
    cursor_ = 0;
}

ScheduleDecision UniformizingPolicy::decide(const SlotFeedback* /*previous_feedback*/,
                                            std::span<const double> battery_view) {
    const int m = static_cast<int>(order_.size());
    ScheduleDecision decision(static_cast<int>(channel_node_.size()));

    for (std::size_t c = 0; c < channel_node_.size(); ++c) {
        const auto node = channel_node_[c];
        if (node != kNoNode && battery_view[static_cast<std::size_t>(node)] < 1.0) {
            on_air_[static_cast<std::size_t>(node)] = 0;
            channel_node_[c] = kNoNode;
        }
    }
    for (std::size_t c = 0; c < channel_node_.size(); ++c) {
        if (channel_node_[c] != kNoNode) {
            decision.node_of_channel[c] = channel_node_[c];
            continue;
        }
        for (int step = 0; step < m; ++step) {
            const auto candidate = order_[static_cast<std::size_t>(cursor_)];
            cursor_ = (cursor_ + 1) % m;
            if (!on_air_[static_cast<std::size_t>(candidate)] &&
                battery_view[static_cast<std::size_t>(candidate)] >= 1.0) {
                channel_node_[c] = candidate;
                on_air_[static_cast<std::size_t>(candidate)] = 1;
                decision.node_of_channel[c] = candidate;
                break;
            }
        }
    }
    return decision;
}

std::unique_ptr<Policy> UniformizingPolicy::clone() const {
    return std::make_unique<UniformizingPolicy>(*this);
}

std::unique_ptr<Policy> make_policy(const std::string& kind,
                                    std::uint64_t seed,
                                    int quantum) {
    if (kind == "urop") {
        return std::make_unique<UropPolicy>(seed);
    }
    if (kind == "rr") {
        return std::make_unique<RoundRobinPolicy>(seed, quantum);
    }
    if (kind == "up") {
        return std::make_unique<UniformizingPolicy>(seed);
    }
    throw ConfigError("unknown policy kind: " + kind);
}

} // namespace ehsim
