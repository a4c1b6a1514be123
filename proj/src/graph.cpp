#include "mscons/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mscons/errors.hpp"
#include "mscons/linalg.hpp"

namespace mscons {

namespace {

constexpr double kZeroEigTol = 1e-10;
constexpr double kConnectivityTol = 1e-8;

std::string edge_str(int from, int to) {
    return "(" + std::to_string(from + 1) + " -> " + std::to_string(to + 1) + ")";
}

}  // namespace

const char* to_string(GraphMode mode) {
    switch (mode) {
        case GraphMode::undirected: return "undirected";
        case GraphMode::leader_follower: return "leader-follower";
        case GraphMode::input_channel: return "input-channel";
    }
    return "?";
}

void NetworkTopology::validate() const {
    if (n_nodes < 1) throw ValidationError("topology: need at least one node");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.from < 0 || e.from >= n_nodes || e.to < 0 || e.to >= n_nodes)
            throw ValidationError("topology: edge endpoint out of range " + edge_str(e.from, e.to));
        if (e.from == e.to)
            throw ValidationError("topology: self-loop " + edge_str(e.from, e.to));
        if (!(e.variance >= 0.0) || !std::isfinite(e.variance))
            throw ValidationError("topology: negative or non-finite variance on " + edge_str(e.from, e.to));
        if (!seen.insert({e.from, e.to}).second)
            throw ValidationError("topology: duplicate edge " + edge_str(e.from, e.to));
    }
    auto require_reciprocal = [&](int first_node) {
        for (const auto& e : edges) {
            if (e.from < first_node || e.to < first_node) continue;
            if (!seen.count({e.to, e.from}))
                throw ValidationError("topology: missing reciprocal edge for " + edge_str(e.from, e.to));
        }
    };
    switch (mode) {
        case GraphMode::undirected:
            require_reciprocal(0);
            if (!input_variances.empty())
                throw ValidationError("topology: input_variances only valid in input-channel mode");
            break;
        case GraphMode::leader_follower:
            for (const auto& e : edges)
                if (e.to == 0)
                    throw ValidationError("topology: leader must not receive; offending edge " +
                                          edge_str(e.from, e.to));
            require_reciprocal(1);  // follower subgraph bidirectional
            if (!input_variances.empty())
                throw ValidationError("topology: input_variances only valid in input-channel mode");
            break;
        case GraphMode::input_channel:
            require_reciprocal(0);
            if (static_cast<int>(input_variances.size()) != n_nodes)
                throw ValidationError("topology: input-channel mode needs one input variance per agent");
            for (double v : input_variances)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw ValidationError("topology: negative or non-finite input variance");
            for (const auto& e : edges)
                if (e.variance != 0.0)
                    throw ValidationError(
                        "topology: per-edge variances are unused in input-channel mode; set them to 0");
            break;
    }
}

bool NetworkTopology::has_edge(int from, int to) const {
    for (const auto& e : edges)
        if (e.from == from && e.to == to) return true;
    return false;
}

double NetworkTopology::edge_variance(int from, int to) const {
    for (const auto& e : edges)
        if (e.from == from && e.to == to) return e.variance;
    return 0.0;
}

std::vector<std::pair<int, int>> NetworkTopology::undirected_pairs() const {
    const int first = (mode == GraphMode::leader_follower) ? 1 : 0;
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : edges) {
        if (e.from < first || e.to < first) continue;
        pairs.insert({std::min(e.from, e.to), std::max(e.from, e.to)});
    }
    return {pairs.begin(), pairs.end()};
}

std::vector<int> NetworkTopology::leader_linked_followers() const {
    std::vector<int> out;
    for (const auto& e : edges)
        if (e.from == 0) out.push_back(e.to);
    std::sort(out.begin(), out.end());
    return out;
}

NetworkTopology NetworkTopology::cycle(int n_nodes, double per_direction_variance) {
    NetworkTopology t;
    t.n_nodes = n_nodes;
    for (int i = 0; i < n_nodes; ++i) {
        const int j = (i + 1) % n_nodes;
        if (j == i) continue;
        t.edges.push_back({i, j, per_direction_variance});
        t.edges.push_back({j, i, per_direction_variance});
    }
    return t;
}

NetworkTopology NetworkTopology::complete(int n_nodes, double per_direction_variance) {
    NetworkTopology t;
    t.n_nodes = n_nodes;
    for (int i = 0; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j)
            if (i != j) t.edges.push_back({i, j, per_direction_variance});
    return t;
}

Eigen::MatrixXd adjacency_matrix(const NetworkTopology& t) {
    t.validate();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(t.n_nodes, t.n_nodes);
    for (const auto& e : t.edges) a(e.to, e.from) = 1.0;
    return a;
}

Eigen::MatrixXd laplacian_matrix(const NetworkTopology& t) {
    const Eigen::MatrixXd a = adjacency_matrix(t);
    Eigen::MatrixXd l = -a;
    for (int i = 0; i < t.n_nodes; ++i) l(i, i) = a.row(i).sum();
    return l;
}

Eigen::MatrixXd incidence_matrix(const NetworkTopology& t) {
    t.validate();
    if (t.mode == GraphMode::input_channel)
        throw ValidationError("incidence_matrix: not defined for input-channel topologies");
    const int first = (t.mode == GraphMode::leader_follower) ? 1 : 0;
    const auto pairs = t.undirected_pairs();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(t.n_nodes - first, static_cast<int>(pairs.size()));
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        d(pairs[c].first - first, static_cast<int>(c)) = 1.0;   // head = smaller index
        d(pairs[c].second - first, static_cast<int>(c)) = -1.0;
    }
    return d;
}

bool is_connected(const NetworkTopology& t) {
    t.validate();
    if (t.mode == GraphMode::leader_follower)
        throw ValidationError("is_connected: use has_leader_spanning_tree for leader-follower mode");
    if (t.n_nodes == 1) return true;
    std::vector<char> seen(t.n_nodes, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& e : t.edges) {
            int v = -1;
            if (e.from == u) v = e.to;
            else if (e.to == u) v = e.from;
            if (v >= 0 && !seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == t.n_nodes;
}

bool has_leader_spanning_tree(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::leader_follower)
        throw ValidationError("has_leader_spanning_tree: leader-follower mode only");
    std::vector<char> seen(t.n_nodes, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& e : t.edges) {
            if (e.from == u && !seen[e.to]) {
                seen[e.to] = 1;
                ++count;
                stack.push_back(e.to);
            }
        }
    }
    return count == t.n_nodes;
}

SpectralSummary laplacian_spectrum(const NetworkTopology& t) {
    t.validate();
    if (t.mode == GraphMode::leader_follower)
        throw ValidationError("laplacian_spectrum: undirected topologies only");
    if (t.n_nodes < 2)
        throw ValidationError("laplacian_spectrum: need at least two nodes");
    if (!is_connected(t))
        throw DisconnectedGraph("laplacian_spectrum: graph is disconnected (Assumption 3 fails)");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_matrix(t), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NonConvergence("laplacian_spectrum: eigensolve failed");

    SpectralSummary s;
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + t.n_nodes);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    // Traversal said connected; the spectral gap is a consistency diagnostic.
    if (s.eigenvalues[1] < kConnectivityTol)
        throw DisconnectedGraph("laplacian_spectrum: zero eigenvalue is not numerically simple");
    s.lambda2 = s.eigenvalues[1];
    s.lambdaN = s.eigenvalues.back();
    s.eigenratio = s.lambda2 / s.lambdaN;
    return s;
}

FollowerLaplacian follower_laplacian(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::leader_follower)
        throw ValidationError("follower_laplacian: leader-follower mode only");
    if (t.n_nodes < 2)
        throw ValidationError("follower_laplacian: need at least one follower");

    const Eigen::MatrixXd l = laplacian_matrix(t);
    FollowerLaplacian out;
    out.grounded = l.bottomRightCorner(t.n_nodes - 1, t.n_nodes - 1);
    out.leader_column = l.bottomLeftCorner(t.n_nodes - 1, 1);
    if (min_symmetric_eigenvalue(out.grounded) < kZeroEigTol)
        throw AssumptionViolated(
            "follower_laplacian: follower block is not positive definite "
            "(no leader-rooted spanning tree; Assumption 4 fails)");
    return out;
}

}  // namespace mscons
