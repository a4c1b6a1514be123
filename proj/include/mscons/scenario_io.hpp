#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>

#include "mscons/simulator.hpp"

namespace mscons {

// The on-disk scenario description. The protocol section carries overrides
// only; the gain itself always comes out of synthesize.
struct ScenarioSpec {
    DynamicsModel model;
    NetworkTopology topology;
    std::optional<double> alpha;
    std::optional<double> delta_sq;
    std::optional<Eigen::MatrixXd> Q;
    NoiseSpec noise;
    std::vector<Eigen::VectorXd> initial_states;
    int horizon = 60;
    int trials = 1;
};

// Strict parse: unknown keys anywhere are rejected, all dimensions must be
// consistent. Edge triples are 1-indexed [from, to, variance].
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

ScenarioSpec load_scenario(const std::filesystem::path& file);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file);

// Synthesizes the gain from the spec's overrides and assembles a runnable
// scenario. The default weighting matrix is the identity.
Scenario build_scenario(const ScenarioSpec& spec);

// The built-in six-agent double-integrator cycle benchmark: per-direction
// channel variance 1.5, alpha = 0.25, Q = 3 I, fixed seed.
//
// The benchmark's published Riccati solution and gain correspond to an
// uncertainty level of 0.81 (= 0.9^2) in this toolkit's delta_sq convention;
// that value is pinned here so the reproduction matches the reference output.
ScenarioSpec cycle6_benchmark_spec();

// Reference values reproduced by the benchmark.
namespace cycle6_reference {
inline const double alpha = 0.25;
inline const double delta_sq = 0.81;
Eigen::MatrixXd P();          // 1e3 * [[0.0319, 0.1521], [0.1521, 1.4643]]
Eigen::RowVectorXd K();       // -[0.1038, 1.1038]
inline const double p_rel_tol = 0.01;
inline const double k_abs_tol = 1e-3;
}  // namespace cycle6_reference

}  // namespace mscons
