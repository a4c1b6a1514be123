#include "mscons/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mscons/linalg.hpp"
#include "mscons/mare.hpp"

namespace mscons {

void ProtocolGain::validate(const DynamicsModel& m) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("gain: alpha must be positive");
    if (K.size() != m.order())
        throw ValidationError("gain: K must be a row vector of the model order");
    if (P.size() == 0) return;  // hand-built gain without Riccati data
    const double inner = (m.B.transpose() * P * m.B)(0, 0);
    if (inner <= 0.0) throw ValidationError("gain: stored P makes B'PB nonpositive");
    const Eigen::RowVectorXd expected = -(m.B.transpose() * P * m.A) / inner;
    if ((K - expected).norm() > 1e-10 * std::max(1.0, expected.norm()))
        throw ValidationError("gain: K is inconsistent with the stored Riccati solution");
}

double ConditionReport::max_lhs() const {
    double m = 0.0;
    for (const auto& [lambda, lhs] : lhs_values) m = std::max(m, lhs);
    return m;
}

namespace {
std::string describe(const ConditionReport& r) {
    std::ostringstream os;
    os << "consensus condition fails (" << to_string(r.mode) << "): ";
    for (const auto& [lambda, lhs] : r.lhs_values)
        os << "lhs(" << lambda << ") = " << lhs << "  ";
    os << "vs 1/M(A)^2 = " << r.rhs;
    return os.str();
}
}  // namespace

ConditionFails::ConditionFails(ConditionReport report)
    : ToolkitError(ErrorKind::condition, describe(report)), report_(std::move(report)) {}

double sigma_max_undirected(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::undirected)
        throw ValidationError("sigma_max_undirected: undirected mode only");
    double worst = 0.0;
    for (const auto& [p, q] : t.undirected_pairs())
        worst = std::max(worst, t.edge_variance(p, q) + t.edge_variance(q, p));
    return worst;
}

double sigma_max_leader_follower(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::leader_follower)
        throw ValidationError("sigma_max_leader_follower: leader-follower mode only");
    double worst = 0.0;
    for (int f : t.leader_linked_followers())
        worst = std::max(worst, t.edge_variance(0, f));
    for (const auto& [p, q] : t.undirected_pairs())
        worst = std::max(worst, t.edge_variance(p, q) + t.edge_variance(q, p));
    return worst;
}

double condition_lhs(double alpha, double lambda, double sigma_sq) {
    const double miss = alpha * lambda - 1.0;
    return miss * miss + alpha * alpha * sigma_sq * lambda;
}

double condition_lhs_input(double alpha, double lambda, double rho_sq) {
    const double miss = alpha * lambda - 1.0;
    return miss * miss + alpha * alpha * rho_sq * lambda * lambda;
}

ConditionInputs condition_inputs(const NetworkTopology& t) {
    ConditionInputs in;
    switch (t.mode) {
        case GraphMode::undirected: {
            const SpectralSummary s = laplacian_spectrum(t);
            in = {s.lambda2, s.lambdaN, sigma_max_undirected(t)};
            break;
        }
        case GraphMode::leader_follower: {
            if (!has_leader_spanning_tree(t))
                throw AssumptionViolated(
                    "check_condition: no leader-rooted spanning tree (Assumption 4 fails)");
            const Eigen::MatrixXd l1 = follower_laplacian(t).grounded;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l1, Eigen::EigenvaluesOnly);
            in = {es.eigenvalues()(0), es.eigenvalues()(l1.rows() - 1), sigma_max_leader_follower(t)};
            break;
        }
        case GraphMode::input_channel: {
            const SpectralSummary s = laplacian_spectrum(t);
            double worst = 0.0;
            for (double v : t.input_variances) worst = std::max(worst, v);
            in = {s.lambda2, s.lambdaN, worst};
            break;
        }
    }
    return in;
}

ConditionReport check_condition(const DynamicsModel& m, const NetworkTopology& t, double alpha) {
    if (!is_stabilizable(m))
        throw NotStabilizable("check_condition: (A, B) is not stabilizable (Assumption 1 fails)");
    if (!(alpha > 0.0)) throw ValidationError("check_condition: alpha must be positive");

    const ConditionInputs in = condition_inputs(t);
    const double mm = mahler_measure(m);

    ConditionReport r;
    r.mode = t.mode;
    r.sigma_effective = in.sigma_sq;
    r.rhs = 1.0 / (mm * mm);
    const bool per_agent = t.mode == GraphMode::input_channel;
    auto lhs = [&](double lambda) {
        return per_agent ? condition_lhs_input(alpha, lambda, in.sigma_sq)
                         : condition_lhs(alpha, lambda, in.sigma_sq);
    };
    r.lhs_values = {{in.lambda_min, lhs(in.lambda_min)}, {in.lambda_max, lhs(in.lambda_max)}};
    r.holds = r.max_lhs() < r.rhs;
    if (t.mode == GraphMode::leader_follower)
        r.note = "condition evaluated at the extreme eigenvalues of the follower-block Laplacian";
    if (per_agent)
        r.note = "input-channel noise term scales with lambda^2 (per-agent uncertainty)";
    return r;
}

double optimal_alpha(double lambda2, double lambdaN, double sigma_max_sq) {
    if (!(lambda2 > 0.0) || !(lambdaN > 0.0))
        throw ValidationError("optimal_alpha: eigenvalues must be positive");
    return 2.0 / (lambda2 + lambdaN + sigma_max_sq);
}

bool noise_free_condition(double lambda2, double lambdaN, double mahler) {
    if (!(lambda2 > 0.0) || !(lambdaN > 0.0) || !(mahler >= 1.0))
        throw ValidationError("noise_free_condition: need positive eigenvalues and M >= 1");
    const double r = lambda2 / lambdaN;
    return (1.0 - r) / (1.0 + r) < 1.0 / mahler;
}

ProtocolGain synthesize(const DynamicsModel& m, const NetworkTopology& t, const Eigen::MatrixXd& Q,
                        std::optional<double> alpha_override,
                        std::optional<double> delta_sq_override) {
    const ConditionInputs in = condition_inputs(t);
    const double alpha =
        alpha_override ? *alpha_override : optimal_alpha(in.lambda_min, in.lambda_max, in.sigma_sq);

    const ConditionReport report = check_condition(m, t, alpha);
    if (!report.holds) throw ConditionFails(report);

    // The uncertainty level handed to the MARE must cover the condition left
    // side while staying below the solvability bound.
    const double lo = report.max_lhs();
    const double hi = report.rhs;
    double delta_sq = delta_sq_override ? *delta_sq_override : 0.5 * (lo + hi);
    if (delta_sq < lo || delta_sq >= hi) {
        std::ostringstream os;
        os << "synthesize: delta_sq = " << delta_sq << " outside the admissible interval [" << lo
           << ", " << hi << ")";
        throw DeltaOutOfRange(os.str());
    }

    const MareSolution sol = solve_mare({m, Q, delta_sq});
    const double inner = (m.B.transpose() * sol.P * m.B)(0, 0);

    ProtocolGain g;
    g.alpha = alpha;
    g.K = -(m.B.transpose() * sol.P * m.A) / inner;
    g.delta_sq = delta_sq;
    g.P = sol.P;
    g.Q = Q;
    g.validate(m);
    return g;
}

}  // namespace mscons
