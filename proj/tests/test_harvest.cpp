#include "doctest.h"

#include <cmath>

#include "ehsim/harvest.hpp"
#include "ehsim/rng.hpp"

using namespace ehsim;

namespace {

NetworkConfig cfg(int m, int k, int n) {
    NetworkConfig c;
    c.node_count = m;
    c.channel_count = k;
    c.horizon = n;
    return c;
}

double row_mean(const HarvestTrace& trace, int node) {
    return trace.harvested_through(node, trace.horizon) / trace.horizon;
}

} // namespace

TEST_CASE("gen_deterministic: constant rate d*k/m") {
    auto t1 = gen_deterministic(cfg(2, 1, 4), make_profile(0, 0.0, 1.0, 2));
    for (int i = 0; i < 2; ++i) {
        for (int t = 0; t < 4; ++t) {
            CHECK(t1.at(i, t) == doctest::Approx(0.5));
        }
    }
    CHECK(make_profile(0, 0.0, 1.0, 2).network_density() == doctest::Approx(1.0));

    auto t2 = gen_deterministic(cfg(4, 2, 10), make_profile(0, 0.0, 0.5, 4));
    std::int64_t whole = 0;
    for (int i = 0; i < 4; ++i) {
        CHECK(t2.at(i, 0) == doctest::Approx(0.25));
        whole += static_cast<std::int64_t>(std::floor(t2.harvested_through(i, 10) + 1e-9));
    }
    CHECK(whole == 8); // 4 * floor(2.5)

    auto t3 = gen_deterministic(cfg(100, 10, 5), make_profile(25, 3.0, 0.3, 100));
    CHECK(t3.at(0, 0) == doctest::Approx(0.3)); // 3 * k/m
    CHECK(t3.at(99, 0) == doctest::Approx(0.03));
}

TEST_CASE("make_profile: the study profiles and their densities") {
    CHECK(make_profile(25, 3.0, 0.3, 100).network_density() == doctest::Approx(0.975));
    CHECK(make_profile(5, 2.1, 0.1, 100).network_density() == doctest::Approx(0.2));
    CHECK(make_profile(0, 0.0, 1.0, 10).network_density() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_profile(11, 1.0, 1.0, 10), ParamError);
}

TEST_CASE("gen_poisson: zero rate, empirical mean, empirical density") {
    auto config = cfg(3, 1, 400);
    DensityProfile profile;
    profile.node_density = {0.0, 1.0, 2.0};
    auto trace = gen_poisson(config, profile, 42);
    CHECK(trace.harvested_through(0, 400) == 0.0);

    // d = 3 rows have per-slot mean 0.3; check sampled rows within a few
    // standard errors and the ensemble within a tight band.
    auto big = gen_poisson(cfg(100, 10, 2000), make_profile(100, 3.0, 3.0, 100), 7);
    const double se = std::sqrt(0.3 / 2000.0);
    for (int i = 0; i < 100; i += 9) {
        CHECK(std::abs(row_mean(big, i) - 0.3) < 4.0 * se);
    }
    double grand = 0.0;
    for (int i = 0; i < 100; ++i) {
        grand += row_mean(big, i);
    }
    CHECK(grand / 100.0 == doctest::Approx(0.3).epsilon(0.02));

    // The high-density profile realizes a network density near 0.975.
    auto hd = gen_poisson(cfg(100, 10, 2000), make_profile(25, 3.0, 0.3, 100), 11);
    std::int64_t whole = 0;
    for (int i = 0; i < 100; ++i) {
        whole += static_cast<std::int64_t>(std::floor(hd.harvested_through(i, 2000) + 1e-9));
    }
    const double realized = static_cast<double>(whole) / (10.0 * 2000.0);
    CHECK(realized == doctest::Approx(0.975).epsilon(0.02));
}

TEST_CASE("gen_markov: absorbing identity chain from state zero stays silent") {
    MarkovHarvestParams params;
    params.level = {0.0, 1.0, 2.0};
    params.transition = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    params.initial_state = 0;
    auto trace = gen_markov(cfg(2, 1, 50), make_profile(0, 0.0, 1.0, 2), params, 3);
    CHECK(trace.harvested_through(0, 50) == 0.0);
    CHECK(trace.harvested_through(1, 50) == 0.0);
}

TEST_CASE("gen_markov: default chain has uniform occupancy and 0.85 lag-1 autocorrelation") {
    // The default matrix is symmetric and doubly stochastic, so the
    // stationary distribution is uniform and its second eigenvalue (0.85)
    // equals the lag-1 autocorrelation of the level sequence.
    auto params = MarkovHarvestParams::defaults();
    const auto pi = params.stationary();
    for (double p : pi) {
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }

    const int n = 100000;
    auto config = cfg(1, 1, n);
    // d = k = m = 1, so the emitted values are exactly the chain levels.
    auto trace = gen_markov(config, make_profile(0, 0.0, 1.0, 1), params, 5);
    double counts[3] = {0, 0, 0};
    for (int t = 0; t < n; ++t) {
        counts[static_cast<int>(trace.at(0, t))] += 1.0;
    }
    for (double c : counts) {
        CHECK(std::abs(c / n - 1.0 / 3.0) < 0.02);
    }

    double mean = 0.0;
    for (int t = 0; t < n; ++t) {
        mean += trace.at(0, t);
    }
    mean /= n;
    double cov = 0.0;
    double var = 0.0;
    for (int t = 0; t + 1 < n; ++t) {
        cov += (trace.at(0, t) - mean) * (trace.at(0, t + 1) - mean);
        var += (trace.at(0, t) - mean) * (trace.at(0, t) - mean);
    }
    CHECK(std::abs(cov / var - 0.85) < 0.03);
}

TEST_CASE("gen_markov: rejects a non-stochastic matrix") {
    MarkovHarvestParams params = MarkovHarvestParams::defaults();
    params.transition[0] = 0.5; // row 0 no longer sums to 1
    CHECK_THROWS_AS(gen_markov(cfg(2, 1, 10), make_profile(0, 0.0, 1.0, 2), params, 1),
                    ParamError);
}

TEST_CASE("generators: per-node mean calibration to d*k/m over long horizons") {
    const int n = 10000;
    auto config = cfg(10, 2, n);
    auto profile = make_profile(3, 1.5, 0.4, 10);
    auto poisson = gen_poisson(config, profile, 31);
    auto markov = gen_markov(config, profile, MarkovHarvestParams::defaults(), 31);
    auto flat = gen_deterministic(config, profile);
    for (int i = 0; i < 10; ++i) {
        const double target = profile.node_density[static_cast<std::size_t>(i)] * 2.0 / 10.0;
        const double se_poisson = std::sqrt(target / n);
        CHECK(std::abs(row_mean(poisson, i) - target) < 5.0 * se_poisson);
        // Per-slot level variance is (2/3) * unit^2 and the 0.85-sticky chain
        // inflates the sample error by (1+rho)/(1-rho) ~ 12.3x.
        const double unit = target / 1.0; // stationary mean level is 1
        const double se_markov = std::sqrt((2.0 / 3.0) * unit * unit * 12.34 / n);
        CHECK(std::abs(row_mean(markov, i) - target) < 5.0 * se_markov);
        CHECK(row_mean(flat, i) == doctest::Approx(target));
    }
}

TEST_CASE("generators: seed determinism and per-node stream stability") {
    auto config = cfg(5, 2, 200);
    auto profile = make_profile(2, 2.0, 0.5, 5);
    auto a = gen_poisson(config, profile, 77);
    auto b = gen_poisson(config, profile, 77);
    CHECK(a.slot_major == b.slot_major);
    auto c = gen_poisson(config, profile, 78);
    CHECK(a.slot_major != c.slot_major);

    // Per-node streams: with equal per-node rates, adding nodes leaves
    // existing rows bit-identical.
    auto small = gen_poisson(cfg(4, 2, 100), make_profile(0, 0.0, 1.0, 4), 9);
    auto large = gen_poisson(cfg(8, 4, 100), make_profile(0, 0.0, 1.0, 8), 9);
    for (int i = 0; i < 4; ++i) {
        for (int t = 0; t < 100; ++t) {
            CHECK(small.at(i, t) == large.at(i, t));
        }
    }

    auto mk = gen_markov(config, profile, MarkovHarvestParams::defaults(), 3);
    auto mk2 = gen_markov(config, profile, MarkovHarvestParams::defaults(), 3);
    CHECK(mk.slot_major == mk2.slot_major);
    for (double e : mk.slot_major) {
        CHECK(e >= 0.0);
    }
}
