#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mscons/simulator.hpp"

namespace mscons {

// The exact second-moment propagator of the stochastic closed loop:
//   X' = base X base^T + sum_s variance_s G_s X G_s^T.
// One generator per independent noise source. For undirected and
// input-channel runs the operator acts on the covariance of the deviation
// from the network average and every generator carries the centering
// projector on the left, which keeps that subspace invariant; leader-follower
// runs use the full leader-relative error space.
struct LiftedMomentOperator {
    struct Generator {
        double variance = 0.0;
        Eigen::MatrixXd G;
    };

    Eigen::MatrixXd base;
    std::vector<Generator> generators;
    Eigen::MatrixXd projector;  // empty when no subspace restriction applies
    int dim() const { return static_cast<int>(base.rows()); }
    bool restricted() const { return projector.size() != 0; }
};

// Exact covariance of the disagreement vector; symmetric PSD.
struct MomentState {
    Eigen::MatrixXd X;
    void validate() const;
};

// Assembles the operator from a scenario: deterministic closed-loop matrix
// plus one rank-structured generator per directed link (or per agent in
// input-channel mode). The generator sum reproduces the simulator's noise
// injection exactly; tests exercise that reconstruction.
LiftedMomentOperator build_moment_operator(const Scenario& s);

// One application of the operator, order-insensitive over generators.
MomentState moment_step(const LiftedMomentOperator& op, const MomentState& x);

// Spectral radius of the operator on the symmetric-matrix space, computed by
// block power iteration with Rayleigh-Ritz extraction and cross-checked
// restarts (block form keeps multiplicity and complex pairs from stalling the
// classic single-vector iteration). Throws NonConvergence if restarts
// disagree beyond rel_tol after the iteration budget.
double ms_spectral_radius(const LiftedMomentOperator& op, double rel_tol = 1e-8,
                          int max_iter = 50000);

// Exact E ||disagreement(k)||^2 per step starting from the scenario's initial
// condition; the deterministic counterpart of a Monte Carlo msd curve.
std::vector<double> exact_msd_trajectory(const Scenario& s, int horizon);

// Mean-square stability verdict: spectral radius < 1 - 1e-9.
bool is_ms_stable(const Scenario& s);

}  // namespace mscons
