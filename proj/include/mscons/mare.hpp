#pragma once

#include <Eigen/Dense>
#include <optional>

#include "mscons/dynamics.hpp"

namespace mscons {

// Modified algebraic Riccati equation
//   P = A'PA - (1 - delta_sq) A'PB (B'PB)^-1 B'PA + Q,   Q > 0,
// the synthesis core of the toolkit. delta_sq is the tolerated multiplicative
// uncertainty level; a unique positive-definite solution exists whenever
// delta_sq < 1 / M(A)^2 with M the Mahler measure.
struct MareProblem {
    DynamicsModel model;
    Eigen::MatrixXd Q;
    double delta_sq = 0.0;

    void validate() const;
};

struct MareSolution {
    Eigen::MatrixXd P;
    double residual = 0.0;
    int iterations = 0;
};

// Supremum of delta_sq values with guaranteed solvability: 1 / M(A)^2.
double admissible_delta_bound(const DynamicsModel& m);

// Fixed-point iteration from P0 = Q (or a caller-supplied symmetric warm
// start). Stops when the successive-iterate Frobenius change is <= tol and the
// equation residual is <= 10 tol. When delta_sq sits at or above the
// admissible bound the solve is still attempted; failure then raises
// DeltaOutOfRange instead of MareDiverged.
MareSolution solve_mare(const MareProblem& p, double tol = 1e-10, int max_iter = 10000,
                        const std::optional<Eigen::MatrixXd>& initial = std::nullopt);

// Frobenius norm of the equation mismatch at a candidate P.
double mare_residual(const DynamicsModel& m, const Eigen::MatrixXd& Q, double delta_sq,
                     const Eigen::MatrixXd& P);

}  // namespace mscons
