#include "ehsim/rng.hpp"

#include <cmath>

namespace ehsim {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    if (bound < 2) {
        return 0;
    }
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

int Rng::next_poisson(double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    const double threshold = std::exp(-mean);
    int count = 0;
    double product = next_double();
    while (product > threshold) {
        ++count;
        product *= next_double();
    }
    return count;
}

std::vector<std::int32_t> Rng::permutation(int n) {
    std::vector<std::int32_t> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ids[static_cast<std::size_t>(i)] = i;
    }
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
    }
    return ids;
}

} // namespace ehsim
