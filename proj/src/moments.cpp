#include "mscons/moments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "mscons/errors.hpp"
#include "mscons/linalg.hpp"

namespace mscons {

void MomentState::validate() const {
    if (!is_symmetric(X, 1e-12 * std::max(1.0, X.norm())))
        throw ValidationError("moment state: X must be symmetric");
    const double floor = -1e-10 * std::max(1.0, X.trace());
    if (min_symmetric_eigenvalue(X) < floor)
        throw ValidationError("moment state: X must be positive semidefinite");
}

LiftedMomentOperator build_moment_operator(const Scenario& s) {
    s.validate();
    const int n = s.state_dim();
    const int N = s.topology.n_nodes;
    const Eigen::MatrixXd bk = s.model.B * s.gain.K;
    const double alpha = s.gain.alpha;

    LiftedMomentOperator op;
    if (s.topology.mode == GraphMode::leader_follower) {
        const Eigen::MatrixXd l1 = follower_laplacian(s.topology).grounded;
        const int nf = N - 1;
        op.base = kron(Eigen::MatrixXd::Identity(nf, nf), s.model.A) + alpha * kron(l1, bk);
        for (const auto& e : s.topology.edges) {
            if (e.variance == 0.0) continue;
            Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(nf, nf);
            if (e.from == 0) {
                coupling(e.to - 1, e.to - 1) = 1.0;  // leader link: diagonal only
            } else {
                coupling(e.to - 1, e.to - 1) = 1.0;
                coupling(e.to - 1, e.from - 1) = -1.0;
            }
            op.generators.push_back({e.variance, alpha * kron(coupling, bk)});
        }
        return op;
    }

    const Eigen::MatrixXd L = laplacian_matrix(s.topology);
    const Eigen::MatrixXd M = centering_projector(N);
    op.base = kron(Eigen::MatrixXd::Identity(N, N), s.model.A) + alpha * kron(L, bk);
    op.projector = kron(M, Eigen::MatrixXd::Identity(n, n));

    if (s.topology.mode == GraphMode::undirected) {
        for (const auto& e : s.topology.edges) {
            if (e.variance == 0.0) continue;
            Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(N, N);
            coupling(e.to, e.to) = 1.0;
            coupling(e.to, e.from) = -1.0;
            op.generators.push_back({e.variance, alpha * kron(M * coupling, bk)});
        }
    } else {  // input-channel
        for (int i = 0; i < N; ++i) {
            if (s.topology.input_variances[i] == 0.0) continue;
            Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(N, N);
            selector(i, i) = 1.0;
            op.generators.push_back(
                {s.topology.input_variances[i], alpha * kron(M * selector * L, bk)});
        }
    }
    return op;
}

namespace {
Eigen::MatrixXd apply_operator(const LiftedMomentOperator& op, const Eigen::MatrixXd& x) {
    std::vector<Eigen::MatrixXd> terms;
    terms.reserve(op.generators.size() + 1);
    terms.push_back(op.base * x * op.base.transpose());
    for (const auto& g : op.generators) {
        if (g.variance == 0.0) continue;
        terms.push_back(g.variance * (g.G * x * g.G.transpose()));
    }
    Eigen::MatrixXd y = pairwise_matrix_sum(terms);
    if (op.restricted()) y = op.projector * y * op.projector;
    return symmetrized(y);
}
}  // namespace

MomentState moment_step(const LiftedMomentOperator& op, const MomentState& x) {
    if (x.X.rows() != op.dim() || x.X.cols() != op.dim())
        throw ValidationError("moment_step: dimension mismatch");
    return {apply_operator(op, x.X)};
}

namespace {

// Dominant-eigenvalue estimate from one seeded block power iteration run.
double block_power_radius(const LiftedMomentOperator& op, std::uint32_t seed, double rel_tol,
                          int max_iter) {
    const int d = op.dim();
    const int dd = d * d;
    const int block = std::min(8, dd);
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;

    // Columns are vectorized symmetric matrices; start from random symmetric
    // (projected) blocks.
    Eigen::MatrixXd q(dd, block);
    for (int b = 0; b < block; ++b) {
        Eigen::MatrixXd r(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = gauss(rng);
        Eigen::MatrixXd x = symmetrized(r);
        if (op.restricted()) x = op.projector * x * op.projector;
        q.col(b) = Eigen::Map<const Eigen::VectorXd>(x.data(), dd);
    }
    {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
        q = qr.householderQ() * Eigen::MatrixXd::Identity(dd, block);
    }

    // Per-iteration changes flatten out long before the estimate is accurate
    // when the spectral gap is small, so convergence is judged on the drift
    // across a 16-iteration window instead of step-to-step plateaus.
    constexpr int kWindow = 16;
    std::deque<double> history;
    double estimate = 0.0;
    int settled = 0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd z(dd, block);
        for (int b = 0; b < block; ++b) {
            const Eigen::Map<const Eigen::MatrixXd> x(q.col(b).data(), d, d);
            const Eigen::MatrixXd y = apply_operator(op, x);
            z.col(b) = Eigen::Map<const Eigen::VectorXd>(y.data(), dd);
        }
        const Eigen::MatrixXd h = q.transpose() * z;  // Rayleigh-Ritz projection
        Eigen::EigenSolver<Eigen::MatrixXd> es(h, /*computeEigenvectors=*/false);
        double rho = 0.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            rho = std::max(rho, std::abs(es.eigenvalues()(i)));
        estimate = rho;

        history.push_back(rho);
        if (history.size() > kWindow + 1) history.pop_front();
        if (history.size() == kWindow + 1 && it >= 3 * kWindow) {
            if (std::abs(history.back() - history.front()) <=
                0.02 * rel_tol * std::max(rho, 1e-30))
                ++settled;
            else
                settled = 0;
            if (settled >= 3) return estimate;
        }
        if (rho < 1e-250) return 0.0;  // operator numerically nilpotent on the subspace

        Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
        q = qr.householderQ() * Eigen::MatrixXd::Identity(dd, block);
    }
    return estimate;
}

}  // namespace

double ms_spectral_radius(const LiftedMomentOperator& op, double rel_tol, int max_iter) {
    const double r1 = block_power_radius(op, 0x5eed, rel_tol, max_iter);
    const double r2 = block_power_radius(op, 0xfeed'beef, rel_tol, max_iter);
    double lo = std::min(r1, r2), hi = std::max(r1, r2);
    if (hi - lo <= rel_tol * std::max(hi, 1e-30)) return hi;
    const double r3 = block_power_radius(op, 0xabcdef, rel_tol, max_iter);
    lo = std::min(lo, r3);
    hi = std::max(hi, r3);
    if (hi - lo <= rel_tol * std::max(hi, 1e-30)) return hi;
    throw NonConvergence("ms_spectral_radius: restarts disagree beyond tolerance (" +
                         std::to_string(r1) + ", " + std::to_string(r2) + ", " +
                         std::to_string(r3) + ")");
}

std::vector<double> exact_msd_trajectory(const Scenario& s, int horizon) {
    if (horizon < 0) throw ValidationError("exact_msd_trajectory: horizon must be >= 0");
    const LiftedMomentOperator op = build_moment_operator(s);
    const Eigen::VectorXd d0 = disagreement_vector(s, s.stacked_initial());
    MomentState state{d0 * d0.transpose()};

    std::vector<double> msd;
    msd.reserve(horizon + 1);
    msd.push_back(state.X.trace());
    for (int k = 0; k < horizon; ++k) {
        state = moment_step(op, state);
        msd.push_back(state.X.trace());
    }
    return msd;
}

bool is_ms_stable(const Scenario& s) {
    return ms_spectral_radius(build_moment_operator(s)) < 1.0 - 1e-9;
}

}  // namespace mscons
