#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace mscons {

enum class GraphMode { undirected, leader_follower, input_channel };

const char* to_string(GraphMode mode);

// One directed communication link: `from` transmits, `to` receives.
// `variance` is the variance of the multiplicative uncertainty on this link.
struct DirectedEdge {
    int from = 0;
    int to = 0;
    double variance = 0.0;
};

// Communication topology over agents 0..n_nodes-1. In leader-follower mode
// agent 0 is the leader. Variances are stored per directed link even when the
// graph is undirected, since the two directions of a bidirectional channel may
// be perturbed differently.
struct NetworkTopology {
    int n_nodes = 0;
    GraphMode mode = GraphMode::undirected;
    std::vector<DirectedEdge> edges;
    std::vector<double> input_variances;  // input-channel mode only, one per agent

    // Throws ValidationError / AssumptionViolated when the mode invariants do
    // not hold (self-loops, missing reciprocal edges, incoming leader edges,
    // duplicate links, negative variances, ...).
    void validate() const;

    bool has_edge(int from, int to) const;
    double edge_variance(int from, int to) const;  // 0 when absent

    // Unordered node pairs {p, q}, p < q, sorted lexicographically. In
    // leader-follower mode this lists only follower-follower pairs.
    std::vector<std::pair<int, int>> undirected_pairs() const;

    // Followers with a link from the leader, ascending (leader-follower mode).
    std::vector<int> leader_linked_followers() const;

    // Convenience builders used by tests and fixtures. Pairs are 0-based.
    static NetworkTopology cycle(int n_nodes, double per_direction_variance);
    static NetworkTopology complete(int n_nodes, double per_direction_variance);
};

struct SpectralSummary {
    std::vector<double> eigenvalues;  // ascending, size N
    double lambda2 = 0.0;             // smallest nonzero
    double lambdaN = 0.0;             // largest
    double eigenratio = 0.0;          // lambda2 / lambdaN
};

// Per-edge weights for protocol purposes are unweighted 0/1; entry (i, j) is 1
// iff i receives from j.
Eigen::MatrixXd adjacency_matrix(const NetworkTopology& t);

// Degree-minus-adjacency; row sums are zero. Symmetric whenever the graph is
// undirected.
Eigen::MatrixXd laplacian_matrix(const NetworkTopology& t);

// Node-by-edge incidence with one +1/-1 pair per column. Orientation is fixed
// deterministically (head = smaller node index) and columns follow
// undirected_pairs() order. In leader-follower mode the incidence of the
// follower subgraph is returned (rows are followers). Rejects input-channel
// mode.
Eigen::MatrixXd incidence_matrix(const NetworkTopology& t);

// Sorted Laplacian spectrum of a connected undirected (or input-channel)
// topology. Throws DisconnectedGraph when the zero eigenvalue is not simple.
SpectralSummary laplacian_spectrum(const NetworkTopology& t);

// Graph traversal over bidirectional links; vacuously true for one node.
bool is_connected(const NetworkTopology& t);

// True iff every node is reachable from the leader along directed links.
bool has_leader_spanning_tree(const NetworkTopology& t);

struct FollowerLaplacian {
    Eigen::MatrixXd grounded;  // follower-block Laplacian, symmetric positive definite
    Eigen::VectorXd leader_column;
};

// Partition of the full Laplacian into the follower block and the leader
// column. Throws AssumptionViolated when the follower block is not positive
// definite (no leader-rooted spanning tree).
FollowerLaplacian follower_laplacian(const NetworkTopology& t);

}  // namespace mscons
