#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mscons/commands.hpp"
#include "mscons/errors.hpp"
#include "mscons/scenario_io.hpp"

using namespace mscons;
using nlohmann::json;

namespace {

json minimal_scenario_json() {
    return json::parse(R"({
      "model": {"A": [[1, 1], [0, 1]], "B": [0, 1]},
      "topology": {"n_nodes": 2, "mode": "undirected",
                   "edges": [[1, 2, 0.25], [2, 1, 0.5]]},
      "protocol": {"alpha": 0.4, "Q": [[1, 0], [0, 1]]},
      "noise": {"distribution": "gaussian", "seed": 7},
      "simulation": {"horizon": 12, "trials": 3,
                     "initial_states": [[1, 0], [0, 1]]}
    })");
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("scenario_io") {

TEST_CASE("parse maps 1-based edge triples onto directed links") {
    const ScenarioSpec spec = scenario_from_json(minimal_scenario_json());
    REQUIRE(spec.topology.edges.size() == 2);
    CHECK(spec.topology.edges[0].from == 0);
    CHECK(spec.topology.edges[0].to == 1);
    CHECK(spec.topology.edges[0].variance == 0.25);
    CHECK(spec.topology.edges[1].variance == 0.5);
    CHECK(spec.alpha == 0.4);
    CHECK_FALSE(spec.delta_sq.has_value());
    CHECK(spec.noise.seed == 7);
}

TEST_CASE("round trip: parse, serialize, parse gives the identical document") {
    const ScenarioSpec spec = scenario_from_json(minimal_scenario_json());
    const json first = scenario_to_json(spec);
    const ScenarioSpec again = scenario_from_json(first);
    const json second = scenario_to_json(again);
    CHECK(first == second);
    CHECK(again.topology.edges.size() == spec.topology.edges.size());
    CHECK(again.horizon == spec.horizon);
}

TEST_CASE("unknown keys are rejected at every level") {
    json j = minimal_scenario_json();
    j["surprise"] = 1;
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);

    j = minimal_scenario_json();
    j["model"]["C"] = 1;
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);

    j = minimal_scenario_json();
    j["noise"]["sigma"] = 0.5;
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);
}

TEST_CASE("missing keys and malformed values are rejected") {
    json j = minimal_scenario_json();
    j.erase("noise");
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);

    j = minimal_scenario_json();
    j["topology"]["edges"] = json::array({json::array({1, 2})});
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);

    j = minimal_scenario_json();
    j["simulation"]["initial_states"] = json::array({json::array({1, 0})});
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);

    j = minimal_scenario_json();
    j["noise"]["distribution"] = "poisson";
    CHECK_THROWS_AS((void)scenario_from_json(j), SchemaError);
}

TEST_CASE("column-form B is accepted") {
    json j = minimal_scenario_json();
    j["model"]["B"] = json::array({json::array({0.0}), json::array({1.0})});
    const ScenarioSpec spec = scenario_from_json(j);
    CHECK(spec.model.B(1) == 1.0);
}

TEST_CASE("input-channel schema round trip") {
    json j = minimal_scenario_json();
    j["topology"]["mode"] = "input-channel";
    j["topology"]["edges"] = json::array({json::array({1, 2, 0.0}), json::array({2, 1, 0.0})});
    j["topology"]["input_variances"] = json::array({0.1, 0.2});
    const ScenarioSpec spec = scenario_from_json(j);
    CHECK(spec.topology.mode == GraphMode::input_channel);
    const json out = scenario_to_json(spec);
    CHECK(out == scenario_to_json(scenario_from_json(out)));

    // nonzero per-edge variance is meaningless in this mode
    j["topology"]["edges"] = json::array({json::array({1, 2, 0.3}), json::array({2, 1, 0.0})});
    CHECK_THROWS_AS((void)scenario_from_json(j), ValidationError);
}

TEST_CASE("build_scenario defaults Q to identity and synthesizes a consistent gain") {
    json j = minimal_scenario_json();
    j["protocol"].erase("Q");
    const Scenario s = build_scenario(scenario_from_json(j));
    CHECK(s.gain.Q.isApprox(Eigen::MatrixXd::Identity(2, 2)));
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("file save and load round trip") {
    const auto path = temp_file("mscons_roundtrip.json");
    const ScenarioSpec spec = cycle6_benchmark_spec();
    save_scenario(spec, path);
    const ScenarioSpec loaded = load_scenario(path);
    CHECK(scenario_to_json(spec) == scenario_to_json(loaded));
    std::filesystem::remove(path);
}

TEST_CASE("benchmark fixture is valid and carries the reference protocol values") {
    const ScenarioSpec spec = cycle6_benchmark_spec();
    CHECK(spec.topology.n_nodes == 6);
    CHECK(spec.alpha == 0.25);
    CHECK(spec.delta_sq == 0.81);
    CHECK(spec.trials == 1000);
    CHECK_NOTHROW(spec.topology.validate());
    CHECK_NOTHROW(spec.model.validate());
}

TEST_CASE("exit codes: ok, validation, condition, numerical") {
    std::ostringstream sink, err;

    const auto ok_path = temp_file("mscons_ok.json");
    save_scenario(cycle6_benchmark_spec(), ok_path);
    CHECK(run_guarded([&] { cmd_analyze(ok_path, sink); }, err) == 0);

    // validation: disconnected graph
    json j = minimal_scenario_json();
    j["topology"]["n_nodes"] = 4;
    j["topology"]["edges"] =
        json::array({json::array({1, 2, 0.1}), json::array({2, 1, 0.1}),
                     json::array({3, 4, 0.1}), json::array({4, 3, 0.1})});
    j["simulation"]["initial_states"] =
        json::array({json::array({1, 0}), json::array({0, 1}), json::array({1, 1}),
                     json::array({0, 0})});
    const auto bad_path = temp_file("mscons_disconnected.json");
    {
        std::ofstream f(bad_path);
        f << j.dump();
    }
    CHECK(run_guarded([&] { cmd_analyze(bad_path, sink); }, err) == 2);

    // condition: noisy cycle that fails the consensus condition
    json cond = scenario_to_json(cycle6_benchmark_spec());
    cond["topology"]["edges"] = json::array();
    for (int i = 1; i <= 6; ++i) {
        const int next = i % 6 + 1;
        cond["topology"]["edges"].push_back(json::array({i, next, 2.5}));
        cond["topology"]["edges"].push_back(json::array({next, i, 2.5}));
    }
    cond["protocol"].erase("delta_sq");
    const auto cond_path = temp_file("mscons_condition.json");
    {
        std::ofstream f(cond_path);
        f << cond.dump();
    }
    CHECK(run_guarded([&] { cmd_synthesize(cond_path, std::nullopt, sink); }, err) == 3);

    // numerical: scalar unstable plant with delta_sq past the solvable bound
    json num = json::parse(R"({
      "model": {"A": [[2]], "B": [1]},
      "topology": {"n_nodes": 2, "mode": "undirected",
                   "edges": [[1, 2, 0.001], [2, 1, 0.001]]},
      "protocol": {"delta_sq": 0.3},
      "noise": {"distribution": "gaussian", "seed": 1},
      "simulation": {"horizon": 5, "trials": 1,
                     "initial_states": [[1], [0]]}
    })");
    const auto num_path = temp_file("mscons_numerical.json");
    {
        std::ofstream f(num_path);
        f << num.dump();
    }
    CHECK(run_guarded([&] { cmd_synthesize(num_path, std::nullopt, sink); }, err) == 4);

    for (const auto& p : {ok_path, bad_path, cond_path, num_path}) std::filesystem::remove(p);
}

TEST_CASE("simulate writes byte-identical files for the same seed") {
    json j = minimal_scenario_json();
    const auto path = temp_file("mscons_sim.json");
    {
        std::ofstream f(path);
        f << j.dump();
    }
    const auto dir_a = temp_file("mscons_sim_out_a");
    const auto dir_b = temp_file("mscons_sim_out_b");
    std::ostringstream sink, err;
    REQUIRE(run_guarded([&] { cmd_simulate(path, dir_a, 5, 8, std::nullopt, sink); }, err) == 0);
    REQUIRE(run_guarded([&] { cmd_simulate(path, dir_b, 5, 8, std::nullopt, sink); }, err) == 0);

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
    CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
