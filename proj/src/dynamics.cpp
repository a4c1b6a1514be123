#include "mscons/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mscons/errors.hpp"

namespace mscons {

namespace {
constexpr double kUnitCircleTol = 1e-9;

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NonConvergence("eigensolve on the state matrix did not converge");
    return es.eigenvalues();
}
}  // namespace

void DynamicsModel::validate() const {
    if (A.rows() < 1 || A.rows() != A.cols())
        throw ValidationError("model: A must be square and non-empty");
    if (B.size() != A.rows())
        throw ValidationError("model: B must be a column vector of A's order");
    if (!A.allFinite() || !B.allFinite())
        throw ValidationError("model: non-finite entries");
}

Eigen::VectorXd step(const DynamicsModel& m, const Eigen::VectorXd& x, double u) {
    m.validate();
    if (x.size() != m.order())
        throw ValidationError("step: state dimension mismatch");
    return m.A * x + m.B * u;
}

std::vector<double> eigenvalue_moduli(const DynamicsModel& m) {
    m.validate();
    const Eigen::VectorXcd ev = eigenvalues_of(m.A);
    std::vector<double> moduli(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) moduli[i] = std::abs(ev(i));
    std::sort(moduli.begin(), moduli.end());
    return moduli;
}

double mahler_measure(const DynamicsModel& m) {
    double prod = 1.0;
    for (double r : eigenvalue_moduli(m))
        if (r > 1.0 + kUnitCircleTol) prod *= r;
    return prod;
}

bool is_stabilizable(const DynamicsModel& m) {
    m.validate();
    const int n = m.order();
    const Eigen::VectorXcd ev = eigenvalues_of(m.A);
    const double rank_tol = 1e-9 * m.A.norm();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) < 1.0 - kUnitCircleTol) continue;  // stable mode
        Eigen::MatrixXcd pencil(n, n + 1);
        pencil.leftCols(n) = m.A.cast<std::complex<double>>();
        pencil.leftCols(n).diagonal().array() -= ev(i);
        pencil.col(n) = m.B.cast<std::complex<double>>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
        if (svd.singularValues()(n - 1) <= rank_tol) return false;
    }
    return true;
}

}  // namespace mscons
