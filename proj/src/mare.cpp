#include "mscons/mare.hpp"

#include <cmath>
#include <string>

#include "mscons/errors.hpp"
#include "mscons/linalg.hpp"

namespace mscons {

namespace {
constexpr double kSingularTol = 1e-14;
constexpr double kDivergenceNorm = 1e12;

Eigen::MatrixXd mare_rhs(const DynamicsModel& m, const Eigen::MatrixXd& Q, double delta_sq,
                         const Eigen::MatrixXd& P) {
    const double inner = (m.B.transpose() * P * m.B)(0, 0);
    if (inner <= kSingularTol)
        throw SingularInnerTerm("mare: B'PB = " + std::to_string(inner) + " is not invertible");
    const Eigen::MatrixXd gain_term = (m.A.transpose() * P * m.B) * (m.B.transpose() * P * m.A) / inner;
    return m.A.transpose() * P * m.A - (1.0 - delta_sq) * gain_term + Q;
}
}  // namespace

void MareProblem::validate() const {
    model.validate();
    if (Q.rows() != model.order() || Q.cols() != model.order())
        throw ValidationError("mare: Q must match the model order");
    if (!is_symmetric(Q, 1e-12))
        throw ValidationError("mare: Q must be symmetric");
    if (min_symmetric_eigenvalue(Q) <= 0.0)
        throw ValidationError("mare: Q must be positive definite");
    if (!(delta_sq >= 0.0) || !std::isfinite(delta_sq))
        throw ValidationError("mare: delta_sq must be a nonnegative real");
    if (delta_sq >= 1.0)
        throw ValidationError("mare: delta_sq >= 1 is never solvable (Mahler measure >= 1)");
}

double admissible_delta_bound(const DynamicsModel& m) {
    const double mm = mahler_measure(m);
    return 1.0 / (mm * mm);
}

MareSolution solve_mare(const MareProblem& p, double tol, int max_iter,
                        const std::optional<Eigen::MatrixXd>& initial) {
    p.validate();
    if (!is_stabilizable(p.model))
        throw NotStabilizable("mare: the pair (A, B) is not stabilizable (Assumption 1 fails)");
    if (initial && !is_symmetric(*initial, 1e-10 * std::max(1.0, initial->norm())))
        throw ValidationError("mare: warm start must be symmetric");

    const double bound = admissible_delta_bound(p.model);
    const bool outside_guarantee = p.delta_sq >= bound;

    auto fail = [&](const std::string& what) -> void {
        if (outside_guarantee)
            throw DeltaOutOfRange("mare: delta_sq = " + std::to_string(p.delta_sq) +
                                  " >= admissible bound " + std::to_string(bound) + "; iteration " +
                                  what);
        throw MareDiverged("mare: iteration " + what + " with delta_sq inside the admissible range");
    };

    Eigen::MatrixXd P = initial ? *initial : p.Q;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd next = symmetrized(mare_rhs(p.model, p.Q, p.delta_sq, P));
        const double change = (next - P).norm();
        P = std::move(next);
        if (P.norm() > kDivergenceNorm) fail("iterates exceeded 1e12 after " + std::to_string(it) + " steps");
        if (change <= tol) {
            const double res = mare_residual(p.model, p.Q, p.delta_sq, P);
            if (res <= 10.0 * tol) {
                if (min_symmetric_eigenvalue(P) <= 0.0)
                    throw MareDiverged("mare: converged iterate is not positive definite");
                return {P, res, it};
            }
        }
    }
    fail("did not settle within " + std::to_string(max_iter) + " steps");
    return {};  // unreachable
}

double mare_residual(const DynamicsModel& m, const Eigen::MatrixXd& Q, double delta_sq,
                     const Eigen::MatrixXd& P) {
    if (!is_symmetric(P, 1e-8 * std::max(1.0, P.norm())))
        throw ValidationError("mare_residual: P must be symmetric");
    return (P - mare_rhs(m, Q, delta_sq, P)).norm();
}

}  // namespace mscons
