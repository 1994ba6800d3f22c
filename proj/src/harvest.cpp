#include "ehsim/harvest.hpp"

#include <cmath>

#include "ehsim/rng.hpp"

namespace ehsim {

double DensityProfile::network_density() const {
    if (node_density.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double d : node_density) {
        sum += d;
    }
    return sum / static_cast<double>(node_density.size());
}

void DensityProfile::validate(int node_count) const {
    if (static_cast<int>(node_density.size()) != node_count) {
        throw ConfigError("density profile length does not match node count");
    }
    for (double d : node_density) {
        if (!(d >= 0.0)) {
            throw ParamError("node densities must be nonnegative");
        }
    }
}

DensityProfile make_profile(int count_high, double d_high, double d_low, int node_count) {
    if (count_high < 0 || count_high > node_count) {
        throw ParamError("count_high must lie in [0, node_count]");
    }
    if ((count_high > 0 && !(d_high >= 0.0)) || !(d_low >= 0.0)) {
        throw ParamError("profile densities must be nonnegative");
    }
    DensityProfile profile;
    profile.node_density.assign(static_cast<std::size_t>(node_count), d_low);
    for (int i = 0; i < count_high; ++i) {
        profile.node_density[static_cast<std::size_t>(i)] = d_high;
    }
    return profile;
}

MarkovHarvestParams MarkovHarvestParams::defaults() {
    MarkovHarvestParams params;
    params.level = {0.0, 1.0, 2.0};
    params.transition = {0.90, 0.05, 0.05,
                         0.05, 0.90, 0.05,
                         0.05, 0.05, 0.90};
    return params;
}

void MarkovHarvestParams::validate() const {
    const int s = state_count();
    if (s < 1) {
        throw ParamError("markov chain needs at least one state");
    }
    if (transition.size() != static_cast<std::size_t>(s) * s) {
        throw ParamError("markov transition matrix has wrong shape");
    }
    for (int r = 0; r < s; ++r) {
        double row_sum = 0.0;
        for (int c = 0; c < s; ++c) {
            const double p = transition[static_cast<std::size_t>(r) * s + c];
            if (!(p >= 0.0)) {
                throw ParamError("markov transition entries must be nonnegative");
            }
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12) {
            throw ParamError("markov transition rows must sum to 1");
        }
    }
    if (initial_state && (*initial_state < 0 || *initial_state >= s)) {
        throw ParamError("markov initial state out of range");
    }
}

std::vector<double> MarkovHarvestParams::stationary() const {
    const int s = state_count();
    std::vector<double> pi(static_cast<std::size_t>(s), 1.0 / s);
    std::vector<double> next(static_cast<std::size_t>(s));
    for (int iter = 0; iter < 512; ++iter) {
        for (int c = 0; c < s; ++c) {
            double acc = 0.0;
            for (int r = 0; r < s; ++r) {
                acc += pi[static_cast<std::size_t>(r)] *
                       transition[static_cast<std::size_t>(r) * s + c];
            }
            next[static_cast<std::size_t>(c)] = acc;
        }
        double delta = 0.0;
        for (int c = 0; c < s; ++c) {
            delta += std::abs(next[static_cast<std::size_t>(c)] - pi[static_cast<std::size_t>(c)]);
        }
        pi.swap(next);
        if (delta < 1e-14) {
            break;
        }
    }
    return pi;
}

HarvestTrace gen_deterministic(const NetworkConfig& config, const DensityProfile& profile) {
    config.validate();
    profile.validate(config.node_count);
    const double fair_rate =
        static_cast<double>(config.channel_count) / static_cast<double>(config.node_count);
    HarvestTrace trace = HarvestTrace::zeros(config.node_count, config.horizon);
    for (int t = 0; t < config.horizon; ++t) {
        for (int i = 0; i < config.node_count; ++i) {
            trace.at(i, t) = profile.node_density[static_cast<std::size_t>(i)] * fair_rate;
        }
    }
    return trace;
}

HarvestTrace gen_poisson(const NetworkConfig& config, const DensityProfile& profile,
                         std::uint64_t seed) {
    config.validate();
    profile.validate(config.node_count);
    const double fair_rate =
        static_cast<double>(config.channel_count) / static_cast<double>(config.node_count);
    HarvestTrace trace = HarvestTrace::zeros(config.node_count, config.horizon);
    for (int i = 0; i < config.node_count; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const double mean = profile.node_density[static_cast<std::size_t>(i)] * fair_rate;
        for (int t = 0; t < config.horizon; ++t) {
            trace.at(i, t) = static_cast<double>(rng.next_poisson(mean));
        }
    }
    return trace;
}

HarvestTrace gen_markov(const NetworkConfig& config, const DensityProfile& profile,
                        const MarkovHarvestParams& params, std::uint64_t seed) {
    config.validate();
    profile.validate(config.node_count);
    params.validate();
    const double fair_rate =
        static_cast<double>(config.channel_count) / static_cast<double>(config.node_count);
    const int s = params.state_count();
    const auto pi = params.stationary();

    HarvestTrace trace = HarvestTrace::zeros(config.node_count, config.horizon);
    for (int i = 0; i < config.node_count; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const double d = profile.node_density[static_cast<std::size_t>(i)];
        const double unit = params.literal_scaling ? d * params.scale : d * fair_rate * params.scale;

        int state = 0;
        if (params.initial_state) {
            state = *params.initial_state;
        } else {
            double u = rng.next_double();
            for (state = 0; state < s - 1; ++state) {
                u -= pi[static_cast<std::size_t>(state)];
                if (u < 0.0) {
                    break;
                }
            }
        }
        for (int t = 0; t < config.horizon; ++t) {
            trace.at(i, t) = unit * params.level[static_cast<std::size_t>(state)];
            double u = rng.next_double();
            const double* row = params.transition.data() + static_cast<std::size_t>(state) * s;
            int next = s - 1;
            for (int c = 0; c < s - 1; ++c) {
                u -= row[c];
                if (u < 0.0) {
                    next = c;
                    break;
                }
            }
            state = next;
        }
    }
    return trace;
}

} // namespace ehsim
