#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mscons {

// Discrete-time single-input agent model x(k+1) = A x(k) + B u(k).
// B is a column vector: the protocol feedback gain is a row vector and each
// agent's input is scalar.
struct DynamicsModel {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;

    int order() const { return static_cast<int>(A.rows()); }
    void validate() const;
};

// One step of the open-loop dynamics.
Eigen::VectorXd step(const DynamicsModel& m, const Eigen::VectorXd& x, double u);

// Moduli of the eigenvalues of A, ascending.
std::vector<double> eigenvalue_moduli(const DynamicsModel& m);

// Product of max{1, |lambda_i(A)|}. Moduli within 1e-9 of the unit circle
// count as 1.
double mahler_measure(const DynamicsModel& m);

// Full-row-rank test of [A - lambda I, B] at every eigenvalue with
// |lambda| >= 1 - 1e-9 (marginal modes included).
bool is_stabilizable(const DynamicsModel& m);

}  // namespace mscons
