#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace mscons {

// Kronecker product, dense. Sizes here are desk-scale so no sparsity games.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Centering projector I - (1/N) 1 1^T. Idempotent; annihilates the agreement
// direction.
Eigen::MatrixXd centering_projector(int n);

// Deterministic pairwise (binary-tree) summation. The reduction tree depends
// only on the index range, so the result is identical no matter which order
// the values were produced in.
double pairwise_sum(std::span<const double> values);

inline double pairwise_mean(std::span<const double> values) {
    return values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
}

// Pairwise reduction over a list of equally-sized matrices.
Eigen::MatrixXd pairwise_matrix_sum(const std::vector<Eigen::MatrixXd>& terms);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& x) {
    return 0.5 * (x + x.transpose());
}

bool is_symmetric(const Eigen::MatrixXd& x, double tol);

// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const Eigen::MatrixXd& x);

}  // namespace mscons
