// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs the full 1000-trial benchmark ensemble, so expect a
// few seconds of wall time.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include "mscons/commands.hpp"
#include "mscons/errors.hpp"
#include "mscons/linalg.hpp"
#include "mscons/mare.hpp"
#include "mscons/moments.hpp"
#include "mscons/scenario_io.hpp"
#include "support/test_oracles.hpp"

using namespace mscons;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

DynamicsModel double_integrator() {
    DynamicsModel m;
    m.A = Eigen::MatrixXd{{1, 1}, {0, 1}};
    m.B = Eigen::VectorXd{{0, 1}};
    return m;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_cycle_spectrum() {
    const SpectralSummary s = laplacian_spectrum(NetworkTopology::cycle(6, 1.5));
    const bool ok = std::abs(s.lambda2 - 1.0) <= 1e-9 && std::abs(s.lambdaN - 4.0) <= 1e-9;
    report(1, "cycle-6 Laplacian extremes are 1 and 4",
           ok, "lambda2 = " + fmt(s.lambda2) + ", lambdaN = " + fmt(s.lambdaN));
}

// --- criteria 2 and 3 ------------------------------------------------------

void criterion_mare_and_gain() {
    // The published solution corresponds to an uncertainty level of
    // 0.81 = 0.9^2 in this solver's delta_sq convention (the benchmark's P and
    // K are mutually consistent only at that level).
    const auto sol =
        solve_mare({double_integrator(), 3.0 * Eigen::MatrixXd::Identity(2, 2), 0.81});
    const Eigen::MatrixXd printed = cycle6_reference::P();
    const double p_rel =
        ((sol.P - printed).cwiseAbs().cwiseQuotient(printed.cwiseAbs())).maxCoeff();
    report(2, "MARE solution within 1% of the published matrix", p_rel <= 0.01,
           "max elementwise rel err = " + fmt(p_rel));

    const ProtocolGain g = synthesize(double_integrator(), NetworkTopology::cycle(6, 1.5),
                                      3.0 * Eigen::MatrixXd::Identity(2, 2), 0.25, 0.81);
    const double k_err = (g.K - cycle6_reference::K()).cwiseAbs().maxCoeff();
    report(3, "synthesized gain within 1e-3 of the published gain", k_err <= 1e-3,
           "max abs err = " + fmt(k_err));
}

// --- criterion 4 -----------------------------------------------------------

void criterion_condition_arithmetic() {
    const double at1 = condition_lhs(0.25, 1.0, 3.0);
    const double at4 = condition_lhs(0.25, 4.0, 3.0);
    const double rhs = 1.0 / std::pow(mahler_measure(double_integrator()), 2);
    const bool ok = std::abs(at1 - 0.75) <= 1e-12 && std::abs(at4 - 0.75) <= 1e-12 &&
                    rhs == 1.0 && at1 < rhs && at4 < rhs;
    report(4, "condition left side equals 0.75 at both extremes, below 1/M(A)^2 = 1", ok,
           "lhs(1) = " + fmt(at1) + ", lhs(4) = " + fmt(at4));
}

// --- criterion 5 -----------------------------------------------------------

void criterion_benchmark_ensemble() {
    const ScenarioSpec spec = cycle6_benchmark_spec();
    const Scenario s = build_scenario(spec);
    const TrajectoryEnsemble e = run_ensemble(s);
    const std::vector<double> exact = exact_msd_trajectory(s, s.horizon);
    const double max_z = max_msd_z_score(e, exact);

    double max_ratio = 0.0;
    const int n = s.state_dim();
    for (int i = 1; i < s.topology.n_nodes; ++i) {
        const double initial = (spec.initial_states[i] - spec.initial_states[0]).norm();
        const double final_norm = e.mean_relative.block((i - 1) * n, e.horizon, n, 1).norm();
        max_ratio = std::max(max_ratio, final_norm / initial);
    }
    const bool ok = max_z <= 3.0 && max_ratio <= 0.01;
    report(5, "1000-trial ensemble tracks the exact moment curve and settles", ok,
           "max |z| = " + fmt(max_z) + " (<= 3), final mean-relative ratio = " + fmt(max_ratio) +
               " (<= 0.01)");
}

// --- criterion 6 -----------------------------------------------------------

void criterion_scalar_mare() {
    DynamicsModel m;
    m.A = Eigen::MatrixXd{{2.0}};
    m.B = Eigen::VectorXd{{1.0}};
    const auto sol = solve_mare({m, Eigen::MatrixXd{{1.0}}, 0.1});
    const bool closed_form_ok = std::abs(sol.P(0, 0) - 5.0 / 3.0) <= 1e-9;

    bool boundary_ok = false;
    std::string boundary_detail = "no error raised";
    try {
        (void)solve_mare({m, Eigen::MatrixXd{{1.0}}, 0.25});
    } catch (const DeltaOutOfRange&) {
        boundary_ok = true;
        boundary_detail = "DeltaOutOfRange at delta_sq = 0.25";
    } catch (const MareDiverged&) {
        boundary_ok = true;
        boundary_detail = "MareDiverged at delta_sq = 0.25";
    }
    report(6, "scalar MARE closed form 5/3 and the solvability boundary path",
           closed_form_ok && boundary_ok,
           "P = " + fmt(sol.P(0, 0)) + "; " + boundary_detail);
}

// --- criterion 7 -----------------------------------------------------------

void criterion_factorizations() {
    std::mt19937 rng(7001);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto t = testing::random_connected_topology(rng, 10, 1.3);
        const Eigen::MatrixXd d = incidence_matrix(t);
        const auto pairs = t.undirected_pairs();
        Eigen::VectorXd w(static_cast<Eigen::Index>(pairs.size()));
        for (std::size_t e = 0; e < pairs.size(); ++e)
            w(static_cast<Eigen::Index>(e)) =
                t.edge_variance(pairs[e].first, pairs[e].second) +
                t.edge_variance(pairs[e].second, pairs[e].first);
        worst = std::max(worst, (noise_moment_matrix(t) - d * w.asDiagonal() * d.transpose())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    for (int rep = 0; rep < 50; ++rep) {
        const auto t = testing::random_leader_follower_topology(rng, 10, 1.3);
        const int nf = t.n_nodes - 1;
        const auto leaders = t.leader_linked_followers();
        const auto pairs = t.undirected_pairs();
        Eigen::MatrixXd dbar(nf, static_cast<int>(leaders.size() + pairs.size()));
        Eigen::VectorXd w(dbar.cols());
        int c = 0;
        for (int f : leaders) {
            dbar.col(c).setZero();
            dbar(f - 1, c) = 1.0;
            w(c) = t.edge_variance(0, f);
            ++c;
        }
        const Eigen::MatrixXd ds = incidence_matrix(t);
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            dbar.col(c) = ds.col(static_cast<int>(e));
            w(c) = t.edge_variance(pairs[e].first, pairs[e].second) +
                   t.edge_variance(pairs[e].second, pairs[e].first);
            ++c;
        }
        worst = std::max(worst, (follower_noise_moment_matrix(t) -
                                 dbar * w.asDiagonal() * dbar.transpose())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    report(7, "noise-moment factorizations hold on 100 random topologies", worst <= 1e-12,
           "worst elementwise mismatch = " + fmt(worst));
}

// --- criterion 8 -----------------------------------------------------------

void criterion_soundness_sweep() {
    std::mt19937 rng(8001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int generated = 0, stable = 0;
    double worst_rho = 0.0;
    int guard = 0;

    while (generated < 50 && guard < 5000) {
        ++guard;
        const int mode_pick = generated % 3;
        const DynamicsModel m = testing::random_stabilizable_model(rng, 3, 1.8);

        // shrink the noise until the condition admits a synthesis
        NetworkTopology t;
        bool admitted = false;
        for (double scale : {1.0, 0.3, 0.1, 0.03, 0.01, 0.001, 0.0}) {
            if (mode_pick == 0) t = testing::random_connected_topology(rng, 8, scale);
            else if (mode_pick == 1) t = testing::random_leader_follower_topology(rng, 8, scale);
            else t = testing::random_input_channel_topology(rng, 8, scale);
            try {
                const ConditionInputs in = condition_inputs(t);
                const double alpha = optimal_alpha(in.lambda_min, in.lambda_max, in.sigma_sq);
                if (check_condition(m, t, alpha).holds) {
                    admitted = true;
                    break;
                }
            } catch (const ToolkitError&) {
                break;  // resample the model/topology
            }
        }
        if (!admitted) continue;

        Scenario s;
        s.model = m;
        s.topology = t;
        try {
            s.gain = synthesize(m, t, Eigen::MatrixXd::Identity(m.order(), m.order()),
                                std::nullopt, std::nullopt);
        } catch (const ToolkitError&) {
            continue;
        }
        s.noise = {NoiseDistribution::gaussian, 1};
        s.initial_states.assign(t.n_nodes, Eigen::VectorXd::Zero(m.order()));
        s.horizon = 1;
        s.trials = 1;

        const double rho = ms_spectral_radius(build_moment_operator(s));
        ++generated;
        worst_rho = std::max(worst_rho, rho);
        if (rho < 1.0) ++stable;
    }
    report(8, "50 synthesizable random scenarios are all mean-square stable",
           generated == 50 && stable == 50,
           fmt(stable) + "/" + fmt(generated) + " stable, worst radius = " + fmt(worst_rho));
}

// --- criterion 9 -----------------------------------------------------------

void criterion_two_agent_closed_form() {
    const double sbar2 = 0.5;
    Scenario s;
    DynamicsModel m;
    m.A = Eigen::MatrixXd{{1.0}};
    m.B = Eigen::VectorXd{{1.0}};
    s.model = m;
    NetworkTopology t;
    t.n_nodes = 2;
    t.edges = {{0, 1, sbar2}, {1, 0, sbar2}};
    s.topology = t;
    s.gain.alpha = 0.5;
    s.gain.K = Eigen::RowVectorXd::Constant(1, -1.0);  // edge gain -1/2
    s.noise = {NoiseDistribution::gaussian, 15};
    s.initial_states = {Eigen::VectorXd{{1.0}}, Eigen::VectorXd{{-1.0}}};
    s.horizon = 10;
    s.trials = 20000;

    const double rho = ms_spectral_radius(build_moment_operator(s));
    const bool rho_ok = std::abs(rho - sbar2 / 2.0) <= 1e-10;

    const TrajectoryEnsemble e = run_ensemble(s);
    bool track_ok = true;
    double worst_z = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double expected = std::pow(sbar2 / 2.0, k) * e.msd[0];
        const double z = std::abs(e.msd[k] - expected) /
                         std::max(e.msd_stderr[k], 1e-15 * e.msd[0]);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) track_ok = false;
    }
    report(9, "two-agent closed form: radius sbar^2/2 and tracked msd decay",
           rho_ok && track_ok,
           "radius err = " + fmt(std::abs(rho - sbar2 / 2.0)) + ", max |z| = " + fmt(worst_z));
}

// --- criterion 10 ----------------------------------------------------------

void criterion_noise_free_degeneration() {
    std::mt19937 rng(10001);
    std::uniform_real_distribution<double> lam(0.1, 6.0);
    std::uniform_real_distribution<double> mah(1.0, 3.0);

    // equivalence of the evaluated condition and the eigenratio test
    bool equiv_ok = true;
    for (int rep = 0; rep < 100; ++rep) {
        const double l2 = lam(rng);
        const double ln = l2 + lam(rng);
        const double m = mah(rng);
        const double alpha = optimal_alpha(l2, ln, 0.0);
        const double lhs = std::max(condition_lhs(alpha, l2, 0.0), condition_lhs(alpha, ln, 0.0));
        const bool general = lhs < 1.0 / (m * m);
        if (general != noise_free_condition(l2, ln, m)) equiv_ok = false;
    }

    // deterministic convergence of the synthesized noise-free loop
    bool decay_ok = true;
    double worst_ratio = 0.0;
    int built = 0;
    while (built < 5) {
        const auto t = testing::random_connected_topology(rng, 7, 0.0);
        const auto m = testing::random_stabilizable_model(rng, 2, 1.6);
        const auto s_spec = laplacian_spectrum(t);
        if (!noise_free_condition(s_spec.lambda2, s_spec.lambdaN, mahler_measure(m))) continue;

        Scenario s;
        s.model = m;
        s.topology = t;
        try {
            s.gain = synthesize(m, t, Eigen::MatrixXd::Identity(m.order(), m.order()),
                                std::nullopt, std::nullopt);
        } catch (const ToolkitError&) {
            continue;
        }
        s.noise = {NoiseDistribution::gaussian, 1};
        std::normal_distribution<double> g;
        s.initial_states.clear();
        for (int i = 0; i < t.n_nodes; ++i)
            s.initial_states.push_back(
                Eigen::VectorXd::NullaryExpr(m.order(), [&](Eigen::Index) { return g(rng); }));

        // horizon from the closed-loop modal decay rate, with transient slack
        const Eigen::MatrixXd bk = m.B * s.gain.K;
        double rho_det = 0.0;
        for (std::size_t i = 1; i < s_spec.eigenvalues.size(); ++i) {
            Eigen::EigenSolver<Eigen::MatrixXd> es(
                m.A + s.gain.alpha * s_spec.eigenvalues[i] * bk, false);
            for (Eigen::Index q = 0; q < es.eigenvalues().size(); ++q)
                rho_det = std::max(rho_det, std::abs(es.eigenvalues()(q)));
        }
        if (rho_det >= 0.999) continue;
        s.horizon = static_cast<int>(3.0 * std::log(1e-7) / std::log(rho_det)) + 60;
        s.trials = 1;

        const TrajectoryEnsemble e = run_ensemble(s);
        const double start = std::sqrt(e.msd.front());
        const double finish = std::sqrt(e.msd.back());
        worst_ratio = std::max(worst_ratio, finish / start);
        if (finish > 1e-6 * start) decay_ok = false;
        ++built;
    }

    report(10, "noise-free degeneration: eigenratio equivalence and deterministic decay",
           equiv_ok && decay_ok,
           std::string("equivalence ") + (equiv_ok ? "ok" : "broken") +
               ", worst decay ratio = " + fmt(worst_ratio));
}

}  // namespace

int main() {
    try {
        criterion_cycle_spectrum();
        criterion_mare_and_gain();
        criterion_condition_arithmetic();
        criterion_benchmark_ensemble();
        criterion_scalar_mare();
        criterion_factorizations();
        criterion_soundness_sweep();
        criterion_two_agent_closed_form();
        criterion_noise_free_degeneration();
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return 99;
    }
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
