#pragma once

// Deterministic random primitives shared by trace generators and policies.
// Every draw is an explicit transformation of raw mt19937_64 output words,
// so a given seed produces the same stream on every platform and compiler.

#include <cstdint>
#include <random>
#include <vector>

namespace ehsim {

/// Derive an independent stream seed from a master seed and a tag
/// (splitmix64 finalizer). Used so per-node streams do not overlap and
/// adding nodes never perturbs existing ones.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection sampled (no modulo bias).
    std::uint64_t next_below(std::uint64_t bound);

    /// Poisson draw via Knuth's multiplication method; fine for the small
    /// per-slot rates used here (mean well below ten).
    int next_poisson(double mean);

    /// Fisher-Yates permutation of {0, .., n-1}.
    std::vector<std::int32_t> permutation(int n);

private:
    std::mt19937_64 engine_;
};

} // namespace ehsim
