#include "mscons/linalg.hpp"

#include "mscons/errors.hpp"

namespace mscons {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXd centering_projector(int n) {
    if (n < 1) throw ValidationError("centering_projector: need n >= 1");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    m.array() -= 1.0 / static_cast<double>(n);
    return m;
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 4) {
        double s = values[0];
        for (std::size_t i = 1; i < n; ++i) s += values[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

Eigen::MatrixXd pairwise_matrix_sum(const std::vector<Eigen::MatrixXd>& terms) {
    if (terms.empty()) return {};
    // recursive halving over the index range, same tree as pairwise_sum
    struct Reducer {
        const std::vector<Eigen::MatrixXd>& t;
        Eigen::MatrixXd reduce(std::size_t lo, std::size_t hi) const {
            if (hi - lo == 1) return t[lo];
            const std::size_t mid = lo + (hi - lo) / 2;
            return reduce(lo, mid) + reduce(mid, hi);
        }
    };
    return Reducer{terms}.reduce(0, terms.size());
}

bool is_symmetric(const Eigen::MatrixXd& x, double tol) {
    if (x.rows() != x.cols()) return false;
    return (x - x.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_symmetric_eigenvalue(const Eigen::MatrixXd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NonConvergence("symmetric eigensolve failed");
    return es.eigenvalues()(0);
}

}  // namespace mscons
