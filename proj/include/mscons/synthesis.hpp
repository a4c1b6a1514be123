#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mscons/dynamics.hpp"
#include "mscons/errors.hpp"
#include "mscons/graph.hpp"

namespace mscons {

// Everything protocol synthesis produces: the scaling factor, the feedback row
// gain, and the Riccati data it came from. For synthesized gains
// K = -(B'PB)^-1 B'PA holds by construction; hand-built gains may leave P and
// Q empty, in which case the consistency check is skipped.
struct ProtocolGain {
    double alpha = 1.0;
    Eigen::RowVectorXd K;
    double delta_sq = 0.0;
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q;

    void validate(const DynamicsModel& m) const;
};

// Evaluation of the mean-square consensus condition
//   (alpha*lambda - 1)^2 + alpha^2 * sigma_eff^2 * lambda  <  1 / M(A)^2
// at the two extreme relevant eigenvalues. The left side is convex in lambda,
// so the extremes dominate the whole spectrum.
struct ConditionReport {
    GraphMode mode = GraphMode::undirected;
    std::vector<std::pair<double, double>> lhs_values;  // (lambda, lhs)
    double rhs = 0.0;                                   // 1 / M(A)^2
    bool holds = false;
    double sigma_effective = 0.0;  // mode-dependent worst-case variance
    std::string note;

    double max_lhs() const;
};

// Thrown by synthesize when the consensus condition fails at the chosen alpha.
class ConditionFails : public ToolkitError {
public:
    explicit ConditionFails(ConditionReport report);
    const ConditionReport& report() const noexcept { return report_; }

private:
    ConditionReport report_;
};

// Worst bidirectional-channel variance: max over undirected edges of the sum
// of the two per-direction variances.
double sigma_max_undirected(const NetworkTopology& t);

// Leader-follower variant: max over leader-link variances and
// follower-pair sums.
double sigma_max_leader_follower(const NetworkTopology& t);

// Left side of the consensus condition at one eigenvalue (per-link noise:
// undirected and leader-follower modes).
double condition_lhs(double alpha, double lambda, double sigma_sq);

// Input-channel variant: the per-agent uncertainty multiplies the whole
// aggregated input, so the noise term scales with lambda^2. This is the form
// the mean-square stability analysis supports; the lambda-linear variant
// admits demonstrably unstable loops once lambda_N > 1 (see the star-graph
// regression test).
double condition_lhs_input(double alpha, double lambda, double rho_sq);

// Mode-appropriate spectrum extremes and worst-case variance. In
// leader-follower mode the extremes are those of the follower-block Laplacian.
struct ConditionInputs {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double sigma_sq = 0.0;
};
ConditionInputs condition_inputs(const NetworkTopology& t);

// Validates the mode assumptions and evaluates the condition at both spectrum
// extremes against 1 / M(A)^2.
ConditionReport check_condition(const DynamicsModel& m, const NetworkTopology& t, double alpha);

// The equalizing scaling factor 2 / (lambda_min + lambda_max + sigma_sq); it
// makes the condition left side equal at both extremes and reduces to the
// ideal-channel choice when sigma_sq = 0.
double optimal_alpha(double lambda2, double lambdaN, double sigma_max_sq);

// Ideal-channel consensus test (1 - r) / (1 + r) < 1 / M with r the
// eigenratio; necessary and sufficient for noise-free channels.
bool noise_free_condition(double lambda2, double lambdaN, double mahler);

// Full synthesis: pick alpha (override or equalizer), check the condition,
// pick delta_sq (override or the midpoint of [max lhs, 1/M(A)^2)), solve the
// MARE and form K = -(B'PB)^-1 B'PA.
ProtocolGain synthesize(const DynamicsModel& m, const NetworkTopology& t, const Eigen::MatrixXd& Q,
                        std::optional<double> alpha_override = std::nullopt,
                        std::optional<double> delta_sq_override = std::nullopt);

}  // namespace mscons
