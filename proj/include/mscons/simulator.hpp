#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "mscons/dynamics.hpp"
#include "mscons/graph.hpp"
#include "mscons/noise.hpp"
#include "mscons/synthesis.hpp"

namespace mscons {

// Everything needed to run the closed loop: agents, topology, protocol gain,
// noise model, initial condition, and the Monte Carlo schedule.
struct Scenario {
    DynamicsModel model;
    NetworkTopology topology;
    ProtocolGain gain;
    NoiseSpec noise;
    std::vector<Eigen::VectorXd> initial_states;
    int horizon = 60;
    int trials = 1;

    void validate() const;
    Eigen::VectorXd stacked_initial() const;
    int state_dim() const { return model.order(); }
};

// Seeded ensemble plus per-step disagreement statistics. msd uses the
// mode-appropriate disagreement vector: deviation from the network average for
// undirected / input-channel runs, deviation from the leader otherwise.
struct TrajectoryEnsemble {
    int n_agents = 0;
    int state_dim = 0;
    int horizon = 0;
    int trials = 0;
    std::vector<Eigen::MatrixXd> paths;  // per trial, (N n) x (horizon + 1)
    std::vector<double> msd;             // size horizon + 1
    std::vector<double> msd_stderr;      // size horizon + 1 (0 for k = 0)
    Eigen::MatrixXd mean_relative;       // ((N-1) n) x (horizon + 1), mean of x_i - x_1
};

// Deviation of each agent's state from the network average,
// (I - (1/N) 1 1^T) (x) I applied to the stacked state. Idempotent.
Eigen::VectorXd consensus_error(const Eigen::VectorXd& x, int n_agents, int state_dim);

// Mode-appropriate disagreement vector used for mean-square statistics.
Eigen::VectorXd disagreement_vector(const Scenario& s, const Eigen::VectorXd& x);

// One synchronous step of the closed loop, agent-wise form: every agent
// applies u_i = alpha * sum over incoming links of (1 + noise) K (x_i - x_j).
Eigen::VectorXd step_undirected(const Scenario& s, const Eigen::VectorXd& x, const NoiseDraw& d);

// Leader (agent 1) runs open loop; followers apply the protocol over their
// incoming links.
Eigen::VectorXd step_leader_follower(const Scenario& s, const Eigen::VectorXd& x,
                                     const NoiseDraw& d);

// One multiplicative uncertainty per agent scaling its whole aggregated input.
Eigen::VectorXd step_input_channel(const Scenario& s, const Eigen::VectorXd& x,
                                   const NoiseDraw& d);

// Dispatch on the topology mode.
Eigen::VectorXd step_network(const Scenario& s, const Eigen::VectorXd& x, const NoiseDraw& d);

// Runs `trials` independent sample paths, noise keyed by trial index, and
// aggregates statistics with order-insensitive pairwise reductions, so the
// result is bitwise reproducible for a given scenario and seed.
TrajectoryEnsemble run_ensemble(const Scenario& s);

// CSV schemas: trajectory rows are trial,k,agent,state_component_index,value;
// the summary has one row per step with msd, its standard error, and the mean
// relative state per follower/component.
void write_trajectory_csv(const TrajectoryEnsemble& e, std::ostream& os);
void write_summary_csv(const TrajectoryEnsemble& e, std::ostream& os);

}  // namespace mscons
