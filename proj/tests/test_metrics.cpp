#include "doctest.h"

#include <cmath>

#include "ehsim/harvest.hpp"
#include "ehsim/metrics.hpp"
#include "ehsim/policy.hpp"
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

} // namespace

TEST_CASE("density: uniform unit profile approaches one, zero trace is zero") {
    auto config = cfg(4, 2, 500);
    auto trace = gen_deterministic(config, make_profile(0, 0.0, 1.0, 4));
    CHECK(density(trace, config) == doctest::Approx(1.0).epsilon(4.0 / (2 * 500)));

    auto config_hd = cfg(100, 10, 2000);
    auto hd = gen_deterministic(config_hd, make_profile(25, 3.0, 0.3, 100));
    CHECK(std::abs(density(hd, config_hd) - 0.975) <= 0.005);

    auto zero = HarvestTrace::zeros(4, 500);
    CHECK(density(zero, config) == 0.0);
}

TEST_CASE("partial_density: reduces to density at T=0 and is stationary on flat traces") {
    auto config = cfg(6, 2, 300);
    auto trace = gen_deterministic(config, make_profile(2, 1.8, 0.4, 6));
    CHECK(partial_density(trace, config, 0) == doctest::Approx(density(trace, config)));
    for (int t : {50, 123, 250}) {
        CHECK(std::abs(partial_density(trace, config, t) - density(trace, config)) < 0.05);
    }
    CHECK_THROWS_AS(partial_density(trace, config, 300), ParamError);
}

TEST_CASE("partial_density: an end-loaded burst raises the tail density") {
    auto config = cfg(2, 1, 4);
    auto trace = HarvestTrace::zeros(2, 4);
    trace.at(0, 2) = 2.0; // slot 3
    trace.at(1, 3) = 1.0; // slot 4
    CHECK(density(trace, config) == doctest::Approx(0.75));
    CHECK(partial_density(trace, config, 2) == doctest::Approx(1.5));
    CHECK(partial_density(trace, config, 2) > density(trace, config));
}

TEST_CASE("capacity_check: admissible below the channel budget, saturated above") {
    auto config = cfg(9, 3, 10);
    auto trace = gen_deterministic(config, make_profile(0, 0.0, 0.9, 9));
    CHECK(capacity_check(trace, config, 0).admissible);

    auto config2 = cfg(2, 1, 10);
    auto burst = HarvestTrace::zeros(2, 10);
    burst.initial_battery = {10.0, 10.0};
    const auto result = capacity_check(burst, config2, 0);
    CHECK_FALSE(result.admissible);
    CHECK(result.max_efficiency == doctest::Approx(0.5));

    auto empty = HarvestTrace::zeros(2, 10);
    CHECK(capacity_check(empty, config2, 0).admissible);
}

TEST_CASE("rr_efficiency_prediction: the two study profiles and the all-light case") {
    auto config = cfg(100, 10, 2000);
    auto hd = gen_deterministic(config, make_profile(25, 3.0, 0.3, 100));
    CHECK(rr_efficiency_prediction(hd, config, 0) ==
          doctest::Approx(1.0 - 25.0 * 2.0 / 97.5).epsilon(1e-3)); // 0.487

    auto ld = gen_deterministic(config, make_profile(5, 2.1, 0.1, 100));
    CHECK(rr_efficiency_prediction(ld, config, 0) ==
          doctest::Approx(1.0 - 5.0 * 1.1 / 20.0).epsilon(1e-3)); // 0.725

    auto light = gen_deterministic(config, make_profile(0, 0.0, 0.8, 100));
    CHECK(rr_efficiency_prediction(light, config, 0) == doctest::Approx(1.0));
}

TEST_CASE("rr_efficiency_prediction: fractional allotment branch") {
    // m=3, k=2, N=5: sigma = 10/3, workload (5,1,1): the heavy node gets
    // floor(sigma)+1 = 4 turns, losing one packet out of seven.
    const std::int64_t workload[] = {5, 1, 1};
    CHECK(rr_efficiency_prediction(workload, 10.0 / 3.0) == doctest::Approx(1.0 - 1.0 / 7.0));
}

TEST_CASE("urop_lower_bound: closed-form values, monotonicity, domain") {
    auto config = cfg(100, 10, 2000);
    CHECK(urop_lower_bound(config, 0.975) == doctest::Approx(1.0 - 200.0 / 487.5).epsilon(1e-6));
    CHECK(urop_lower_bound(config, 0.2) == doctest::Approx(0.9375));

    double prev = 0.0;
    for (int n : {2000, 10000, 100000, 1000000}) {
        auto c = cfg(100, 10, n);
        const double bound = urop_lower_bound(c, 0.5);
        CHECK(bound >= prev);
        prev = bound;
    }
    CHECK(prev > 0.999); // approaches one as the horizon grows

    CHECK_THROWS_AS(urop_lower_bound(config, 0.0), DomainError);
    CHECK_THROWS_AS(urop_lower_bound(config, 1.0), DomainError);
    CHECK_THROWS_AS(urop_lower_bound(config, -0.3), DomainError);
}

TEST_CASE("run_efficiency_floor: worked trace drops earliest at slot 5, floor one third") {
    auto config = cfg(3, 1, 7);
    auto trace = HarvestTrace::zeros(3, 7);
    trace.initial_battery = {2.0, 1.0, 0.0};
    UropPolicy policy(std::vector<std::int32_t>{0, 1, 2});
    const auto run = run_simulation(config, trace, policy);

    CHECK(earliest_final_drop(run) == 5); // node 1's final drop, the earliest of (7, 5, 6)
    CHECK(run_efficiency_floor(run, trace) == doctest::Approx(1.0 / 3.0));
    const auto report = make_report(run, trace, config);
    CHECK(report.efficiency >= run_efficiency_floor(run, trace));

    CHECK(run_efficiency_floor(run, trace, 7) == doctest::Approx(1.0)); // final drop at the horizon
}

TEST_CASE("run_efficiency_floor: a node that never drops forces the trivial anchor") {
    auto config = cfg(2, 1, 5);
    auto trace = HarvestTrace::zeros(2, 5);
    trace.initial_battery = {10.0, 0.0};
    // Node 0 always transmits; node 1 is never scheduled, so no drop exists.
    RoundRobinPolicy policy(std::vector<std::int32_t>{0, 1}, 1000);
    const auto run = run_simulation(config, trace, policy);
    CHECK(earliest_final_drop(run) == 0);
    CHECK(run_efficiency_floor(run, trace) == doctest::Approx(1.0 - 5.0 / 10.0));
}

TEST_CASE("jain_fairness: known values, bounds, scale invariance") {
    std::vector<double> equal(7, 0.42);
    CHECK(jain_fairness(equal) == doctest::Approx(1.0));

    std::vector<double> study;
    for (int i = 0; i < 25; ++i) {
        study.push_back(1.0 / 3.0);
    }
    for (int i = 0; i < 75; ++i) {
        study.push_back(1.0);
    }
    CHECK(jain_fairness(study) == doctest::Approx(0.893).epsilon(1e-3));

    std::vector<double> lone(100, 0.0);
    lone[17] = 3.0;
    CHECK(jain_fairness(lone) == doctest::Approx(0.01));

    Rng rng(404);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(1 + rng.next_below(12));
        for (auto& v : x) {
            v = rng.next_double() * 5.0;
        }
        bool all_zero = true;
        for (double v : x) {
            all_zero = all_zero && v == 0.0;
        }
        if (all_zero) {
            x[0] = 1.0;
        }
        const double base = jain_fairness(x);
        CHECK(base >= 1.0 / static_cast<double>(x.size()) - 1e-12);
        CHECK(base <= 1.0 + 1e-12);
        std::vector<double> scaled(x);
        const double c = 0.1 + 7.0 * rng.next_double();
        for (auto& v : scaled) {
            v *= c;
        }
        CHECK(jain_fairness(scaled) == doctest::Approx(base).epsilon(1e-12));
    }

    std::vector<double> zeros(5, 0.0);
    CHECK_THROWS_AS(jain_fairness(zeros), DomainError);
}

TEST_CASE("make_report: carries both normalizers and excludes zero-ceiling nodes") {
    auto config = cfg(3, 1, 4);
    auto trace = HarvestTrace::zeros(3, 4);
    trace.initial_battery = {2.0, 1.0, 0.0}; // node 2 can never send
    UropPolicy policy(std::vector<std::int32_t>{0, 1, 2});
    const auto run = run_simulation(config, trace, policy);
    const auto report = make_report(run, trace, config, std::int64_t{3}, true);
    CHECK(report.ceiling_opt == 3);
    CHECK(report.oracle_opt.has_value());
    CHECK(report.opt_throughput == 3);
    CHECK(std::isnan(report.per_node_x[2]));
    CHECK_FALSE(std::isnan(report.jain));
    CHECK(report.efficiency == doctest::Approx(static_cast<double>(run.total_sent) / 3.0));
    CHECK(report.efficiency >= 0.0);
    CHECK(report.efficiency <= 1.0);
}

TEST_CASE("cumulative_efficiency: prefix ceilings match a fresh shorter run") {
    auto config = cfg(10, 2, 300);
    auto trace = gen_poisson(config, make_profile(3, 1.6, 0.5, 10), 77);
    UropPolicy policy(std::uint64_t{31});
    const auto run = run_simulation(config, trace, policy);

    auto short_config = cfg(10, 2, 120);
    auto short_trace = trace.prefix(120);
    UropPolicy policy2(std::uint64_t{31});
    const auto short_run = run_simulation(short_config, short_trace, policy2);

    CHECK(run.sent_cumulative[119] == short_run.total_sent);
    CHECK(cumulative_efficiency(run, trace, config, 120) ==
          doctest::Approx(static_cast<double>(short_run.total_sent) /
                          default_opt_throughput(short_trace, short_config)));
}
