#include "mscons/simulator.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mscons/errors.hpp"
#include "mscons/linalg.hpp"

namespace mscons {

void Scenario::validate() const {
    model.validate();
    topology.validate();
    gain.validate(model);
    if (static_cast<int>(initial_states.size()) != topology.n_nodes)
        throw ValidationError("scenario: need one initial state per agent");
    for (const auto& x : initial_states)
        if (x.size() != model.order())
            throw ValidationError("scenario: initial state dimension mismatch");
    if (horizon < 1) throw ValidationError("scenario: horizon must be >= 1");
    if (trials < 1) throw ValidationError("scenario: trials must be >= 1");
}

Eigen::VectorXd Scenario::stacked_initial() const {
    const int n = model.order();
    Eigen::VectorXd x(topology.n_nodes * n);
    for (int i = 0; i < topology.n_nodes; ++i) x.segment(i * n, n) = initial_states[i];
    return x;
}

Eigen::VectorXd consensus_error(const Eigen::VectorXd& x, int n_agents, int state_dim) {
    if (x.size() != static_cast<Eigen::Index>(n_agents) * state_dim)
        throw ValidationError("consensus_error: dimension mismatch");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(state_dim);
    for (int i = 0; i < n_agents; ++i) mean += x.segment(i * state_dim, state_dim);
    mean /= static_cast<double>(n_agents);
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < n_agents; ++i)
        out.segment(i * state_dim, state_dim) = x.segment(i * state_dim, state_dim) - mean;
    return out;
}

Eigen::VectorXd disagreement_vector(const Scenario& s, const Eigen::VectorXd& x) {
    const int n = s.state_dim();
    if (s.topology.mode == GraphMode::leader_follower) {
        Eigen::VectorXd e((s.topology.n_nodes - 1) * n);
        for (int i = 1; i < s.topology.n_nodes; ++i)
            e.segment((i - 1) * n, n) = x.segment(i * n, n) - x.segment(0, n);
        return e;
    }
    return consensus_error(x, s.topology.n_nodes, n);
}

namespace {

// Shared agent-wise update. leader_open_loop pins agent 0 to u = 0;
// per_agent_noise switches between per-link and per-agent uncertainty.
Eigen::VectorXd stepped(const Scenario& s, const Eigen::VectorXd& x, const NoiseDraw& d,
                        bool leader_open_loop, bool per_agent_noise) {
    const int n = s.state_dim();
    const int N = s.topology.n_nodes;
    if (x.size() != static_cast<Eigen::Index>(N) * n)
        throw ValidationError("step: stacked state dimension mismatch");

    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    if (per_agent_noise) {
        for (int i = 0; i < N; ++i) {
            double agg = 0.0;
            for (const auto& e : s.topology.edges)
                if (e.to == i)
                    agg += s.gain.K.dot(x.segment(i * n, n) - x.segment(e.from * n, n));
            u(i) = s.gain.alpha * (1.0 + d.input_values[i]) * agg;
        }
    } else {
        for (std::size_t idx = 0; idx < s.topology.edges.size(); ++idx) {
            const auto& e = s.topology.edges[idx];
            u(e.to) += s.gain.alpha * (1.0 + d.edge_values[idx]) *
                       s.gain.K.dot(x.segment(e.to * n, n) - x.segment(e.from * n, n));
        }
    }
    if (leader_open_loop) u(0) = 0.0;

    Eigen::VectorXd next(x.size());
    for (int i = 0; i < N; ++i)
        next.segment(i * n, n) = s.model.A * x.segment(i * n, n) + s.model.B * u(i);
    return next;
}

}  // namespace

Eigen::VectorXd step_undirected(const Scenario& s, const Eigen::VectorXd& x, const NoiseDraw& d) {
    if (s.topology.mode != GraphMode::undirected)
        throw ValidationError("step_undirected: wrong topology mode");
    return stepped(s, x, d, false, false);
}

Eigen::VectorXd step_leader_follower(const Scenario& s, const Eigen::VectorXd& x,
                                     const NoiseDraw& d) {
    if (s.topology.mode != GraphMode::leader_follower)
        throw ValidationError("step_leader_follower: wrong topology mode");
    return stepped(s, x, d, true, false);
}

Eigen::VectorXd step_input_channel(const Scenario& s, const Eigen::VectorXd& x,
                                   const NoiseDraw& d) {
    if (s.topology.mode != GraphMode::input_channel)
        throw ValidationError("step_input_channel: wrong topology mode");
    return stepped(s, x, d, false, true);
}

Eigen::VectorXd step_network(const Scenario& s, const Eigen::VectorXd& x, const NoiseDraw& d) {
    switch (s.topology.mode) {
        case GraphMode::undirected: return step_undirected(s, x, d);
        case GraphMode::leader_follower: return step_leader_follower(s, x, d);
        case GraphMode::input_channel: return step_input_channel(s, x, d);
    }
    throw ValidationError("step_network: unknown mode");
}

TrajectoryEnsemble run_ensemble(const Scenario& s) {
    s.validate();
    const int n = s.state_dim();
    const int N = s.topology.n_nodes;
    const int H = s.horizon;
    const int T = s.trials;

    TrajectoryEnsemble out;
    out.n_agents = N;
    out.state_dim = n;
    out.horizon = H;
    out.trials = T;
    out.paths.resize(T);

    const Eigen::VectorXd x0 = s.stacked_initial();
    for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd path(N * n, H + 1);
        Eigen::VectorXd x = x0;
        path.col(0) = x;
        for (int k = 0; k < H; ++k) {
            const NoiseDraw d = draw(s.noise, s.topology,
                                     static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k));
            x = step_network(s, x, d);
            path.col(k + 1) = x;
        }
        out.paths[t] = std::move(path);
    }

    // Statistics from the stored per-trial values with index-based pairwise
    // reductions: any execution or accumulation order gives identical bits.
    out.msd.assign(H + 1, 0.0);
    out.msd_stderr.assign(H + 1, 0.0);
    out.mean_relative = Eigen::MatrixXd::Zero((N - 1) * n, H + 1);

    std::vector<double> vals(T), sq(T);
    for (int k = 0; k <= H; ++k) {
        if (k == 0) {
            // The initial disagreement is shared by every trial; no estimation.
            out.msd[0] = disagreement_vector(s, x0).squaredNorm();
        } else {
            for (int t = 0; t < T; ++t)
                vals[t] = disagreement_vector(s, out.paths[t].col(k)).squaredNorm();
            const double mean = pairwise_mean(vals);
            out.msd[k] = mean;
            if (T > 1) {
                for (int t = 0; t < T; ++t) sq[t] = (vals[t] - mean) * (vals[t] - mean);
                out.msd_stderr[k] =
                    std::sqrt(pairwise_sum(sq) / (static_cast<double>(T) - 1.0) / T);
            }
        }
    }
    for (int i = 1; i < N; ++i) {
        for (int c = 0; c < n; ++c) {
            const int row = (i - 1) * n + c;
            for (int k = 0; k <= H; ++k) {
                for (int t = 0; t < T; ++t)
                    vals[t] = out.paths[t](i * n + c, k) - out.paths[t](c, k);
                out.mean_relative(row, k) = pairwise_mean(vals);
            }
        }
    }
    return out;
}

namespace {
void print_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}
}  // namespace

void write_trajectory_csv(const TrajectoryEnsemble& e, std::ostream& os) {
    os << "trial,k,agent,state_component_index,value\n";
    for (int t = 0; t < e.trials; ++t)
        for (int k = 0; k <= e.horizon; ++k)
            for (int i = 0; i < e.n_agents; ++i)
                for (int c = 0; c < e.state_dim; ++c) {
                    os << t << ',' << k << ',' << (i + 1) << ',' << c << ',';
                    print_double(os, e.paths[t](i * e.state_dim + c, k));
                    os << '\n';
                }
}

void write_summary_csv(const TrajectoryEnsemble& e, std::ostream& os) {
    os << "k,msd,msd_stderr";
    for (int i = 2; i <= e.n_agents; ++i)
        for (int c = 0; c < e.state_dim; ++c) os << ",mean_rel_a" << i << "_s" << c;
    os << '\n';
    for (int k = 0; k <= e.horizon; ++k) {
        os << k << ',';
        print_double(os, e.msd[k]);
        os << ',';
        print_double(os, e.msd_stderr[k]);
        for (int r = 0; r < e.mean_relative.rows(); ++r) {
            os << ',';
            print_double(os, e.mean_relative(r, k));
        }
        os << '\n';
    }
}

}  // namespace mscons
