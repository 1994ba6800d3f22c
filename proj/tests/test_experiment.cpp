#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ehsim/experiment.hpp"
#include "ehsim/metrics.hpp"
#include "ehsim/policy.hpp"
#include "ehsim/rng.hpp"

using namespace ehsim;

namespace {

const char* kTinySpec = R"(# tiny sweep
[network]
m = 6
k = 2
horizon = 50

[process]
kind = poisson

[profile]
count_high = 2
d_high = 2.0
d_low = 0.4

[policies]
policy = urop
policy = rr quantum=1

[run]
label = tiny
seeds = 3
use_oracle_norm = true
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("ehsim_test_" + tag);
    std::filesystem::remove_all(dir);
    return dir.string();
}

} // namespace

TEST_CASE("spec parsing: sections, policies, derived seed list") {
    const auto spec = parse_experiment_text(kTinySpec, "tiny");
    CHECK(spec.config.node_count == 6);
    CHECK(spec.config.channel_count == 2);
    CHECK(spec.config.horizon == 50);
    CHECK_FALSE(spec.config.bounded());
    CHECK(spec.process == "poisson");
    CHECK(spec.profile.count_high == 2);
    CHECK(spec.policies.size() == 2);
    CHECK(spec.policies[1].kind == "rr");
    CHECK(spec.policies[1].quantum == 1);
    CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(spec.use_oracle_norm);
    spec.validate();
}

TEST_CASE("spec parsing: diagnostics name the offending field") {
    CHECK_THROWS_WITH_AS(parse_experiment_text("[network]\nm = fast\n", "bad"),
                         doctest::Contains("network.m"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_text("[policies]\npolicy = dijkstra\n", "bad"),
                         doctest::Contains("policies.policy"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_text("[network]\nbogus_key = 1\n", "bad"),
                         doctest::Contains("network.bogus_key"), ConfigError);

    auto spec = parse_experiment_text(kTinySpec, "tiny");
    spec.policies.clear();
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("policies"), ConfigError);

    auto spec2 = parse_experiment_text(kTinySpec, "tiny");
    spec2.profile.count_high = 99;
    CHECK_THROWS_WITH_AS(spec2.validate(), doctest::Contains("count_high"), ConfigError);

    auto spec3 = parse_experiment_text(kTinySpec, "tiny");
    spec3.seeds.clear();
    CHECK_THROWS_WITH_AS(spec3.validate(), doctest::Contains("seeds"), ConfigError);
}

TEST_CASE("run_experiment: ordered rows, efficiency within bounds, reproducible bytes") {
    const auto spec = parse_experiment_text(kTinySpec, "tiny");
    const auto dir_a = temp_dir("a");
    const auto dir_b = temp_dir("b");
    const auto res_a = run_experiment(spec, dir_a);
    const auto res_b = run_experiment(spec, dir_b);

    REQUIRE(res_a.rows.size() == 6); // 2 policies x 3 seeds x 1 checkpoint
    // Ordering: policy-major, then seed.
    CHECK(res_a.rows[0].policy == "urop");
    CHECK(res_a.rows[3].policy == "rr");
    CHECK(res_a.rows[0].seed == 1);
    CHECK(res_a.rows[1].seed == 2);
    for (const auto& row : res_a.rows) {
        CHECK(row.efficiency <= 1.0 + 1e-12);
        CHECK(row.efficiency >= row.bound_t4 - 1e-12);
        CHECK(row.nominal_density == doctest::Approx(0.93333333));
    }

    // Byte-identical CSV across reruns of the same spec.
    CHECK(slurp(res_a.csv_path) == slurp(res_b.csv_path));
    CHECK(slurp(res_a.csv_path).rfind("policy,process,m,k,N,D,seed,efficiency,jain,"
                                      "bound_t4,bound_t5,rr_prediction\n", 0) == 0);

    // JSON summaries parse and carry the advertised fields.
    const auto j = nlohmann::json::parse(
        slurp((std::filesystem::path(dir_a) / "tiny_run_urop_1.json").string()));
    CHECK(j["config"]["m"] == 6);
    CHECK(j["policy"] == "urop");
    CHECK(j["nodes"].size() == 6);
    CHECK(j.contains("oracle_opt"));
    CHECK(j.contains("efficiency"));

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("run_experiment: checkpoints emit one row per horizon prefix") {
    auto spec = parse_experiment_text(kTinySpec, "tiny");
    spec.checkpoints = {10, 30, 50};
    spec.policies.resize(1); // urop only
    spec.seeds = {7};
    spec.use_oracle_norm = false;
    const auto dir = temp_dir("cp");
    const auto res = run_experiment(spec, dir, /*emit_csv=*/false, /*emit_json=*/false);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[0].horizon == 10);
    CHECK(res.rows[1].horizon == 30);
    CHECK(res.rows[2].horizon == 50);

    // A checkpoint row must match a fresh run over the truncated horizon.
    auto short_spec = spec;
    short_spec.config.horizon = 30;
    short_spec.checkpoints.clear();
    const auto short_res = run_experiment(short_spec, dir, false, false);
    CHECK(short_res.rows[0].efficiency == doctest::Approx(res.rows[1].efficiency));
    CHECK(short_res.rows[0].bound_t4 == doctest::Approx(res.rows[1].bound_t4));
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_experiment: capped and uncapped runs share the same seeded trace") {
    auto spec = parse_experiment_text(kTinySpec, "tiny");
    const auto trace_a = make_trace(spec, 5);
    spec.config.battery_cap = 50.0;
    const auto trace_b = make_trace(spec, 5);
    CHECK(trace_a.slot_major == trace_b.slot_major);
}

TEST_CASE("run_bounds: grid values, monotonicity, out-of-domain rows") {
    const char* bounds_spec = R"(
[network]
m = 100
k = 10

[run]
label = grid

[bounds]
horizons = 2000,10000,100000
profile = 25,3.0,0.3
profile = 5,2.1,0.1
profile = 100,1.5,0.0
)";
    auto spec = parse_experiment_text(bounds_spec, "grid");
    const auto dir = temp_dir("bounds");
    const auto rows = run_bounds(spec, dir);
    REQUIRE(rows.size() == 9);

    // Row (profile 0, N=2000): the high-density study point.
    CHECK(rows[0].nominal_density == doctest::Approx(0.975));
    CHECK(rows[0].domain == "ok");
    CHECK(rows[0].urop_bound == doctest::Approx(1.0 - 200.0 / 487.5).epsilon(1e-6));
    CHECK(rows[0].rr_prediction == doctest::Approx(0.487).epsilon(1e-3));

    // Bound increases with N at fixed density.
    CHECK(rows[0].urop_bound < rows[1].urop_bound);
    CHECK(rows[1].urop_bound < rows[2].urop_bound);

    // Low-density profile: rr prediction 0.725.
    CHECK(rows[3].rr_prediction == doctest::Approx(0.725).epsilon(1e-3));

    // Density 1.5 is outside (0,1): marked, not aborted.
    CHECK(rows[6].domain == "out_of_domain");
    CHECK(std::isnan(rows[6].urop_bound));
    CHECK_FALSE(rows[6].admissible);
    CHECK(rows[6].max_efficiency == doctest::Approx(1.0 / 1.5).epsilon(1e-6));

    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "grid_bounds.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("trace csv: header format and value round trip") {
    NetworkConfig config;
    config.node_count = 3;
    config.channel_count = 1;
    config.horizon = 5;
    auto trace = gen_poisson(config, make_profile(1, 2.3, 0.7, 3), 13);
    trace.at(0, 0) = 0.125; // exercise a fractional value

    std::stringstream buffer;
    write_trace_csv(trace, buffer);
    const std::string text = buffer.str();
    CHECK(text.rfind("node_id,1,2,3,4,5\n", 0) == 0);

    std::stringstream in(text);
    const auto back = read_trace_csv(in);
    CHECK(back.node_count == 3);
    CHECK(back.horizon == 5);
    CHECK(back.slot_major == trace.slot_major);
}

TEST_CASE("slot log csv: one line per channel-slot") {
    NetworkConfig config;
    config.node_count = 2;
    config.channel_count = 2;
    config.horizon = 3;
    auto trace = HarvestTrace::zeros(2, 3);
    trace.initial_battery = {1.0, 0.0};
    UropPolicy policy(std::vector<std::int32_t>{0, 1});
    const auto run = run_simulation(config, trace, policy);
    std::stringstream buffer;
    write_slot_log_csv(run, buffer);
    std::string line;
    std::getline(buffer, line);
    CHECK(line == "slot,channel,node_id,outcome");
    int lines = 0;
    while (std::getline(buffer, line)) {
        ++lines;
    }
    CHECK(lines == 6);
}

TEST_CASE("format_double: shortest round-trip forms") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
