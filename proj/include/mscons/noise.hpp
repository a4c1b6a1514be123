#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mscons/graph.hpp"

namespace mscons {

enum class NoiseDistribution { gaussian, uniform };

const char* to_string(NoiseDistribution d);

// Zero-mean multiplicative channel uncertainty. Only the first two moments are
// pinned down; gaussian and uniform generators with matching variance are
// provided, and every second-moment computation downstream is
// distribution-free.
struct NoiseSpec {
    NoiseDistribution distribution = NoiseDistribution::gaussian;
    std::uint64_t seed = 0;
};

// One time step worth of uncertainty samples. edge_values aligns with
// NetworkTopology::edges; input_values (input-channel mode) holds one sample
// per agent.
struct NoiseDraw {
    std::vector<double> edge_values;
    std::vector<double> input_values;
};

// Counter-based generation: every sample is a pure hash of
// (seed, stream, trial, k), so distinct (edge, trial, time) triples get
// independent values and parallel trial execution cannot reorder anything.
NoiseDraw draw(const NoiseSpec& spec, const NetworkTopology& t, std::uint64_t trial,
               std::uint64_t k);

// Raw counter-hash primitives, exposed for tests and for anything else that
// needs reproducible substreams.
namespace counter_rng {
std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial, std::uint64_t k,
                   std::uint64_t idx);
double uniform01(std::uint64_t bits);                       // [0, 1)
double sample(NoiseDistribution d, double variance, std::uint64_t seed, std::uint64_t stream,
              std::uint64_t trial, std::uint64_t k);
std::uint64_t edge_stream(int from, int to);
std::uint64_t input_stream(int agent);
}  // namespace counter_rng

// Expected Gram matrix of the aggregated per-step channel perturbations of an
// undirected topology: a weighted Laplacian with weight (var_ij + var_ji) on
// each undirected edge.
Eigen::MatrixXd noise_moment_matrix(const NetworkTopology& t);

// Leader-follower counterpart on the follower index space: follower pairs
// contribute Laplacian-style entries, leader links only add to the diagonal.
Eigen::MatrixXd follower_noise_moment_matrix(const NetworkTopology& t);

}  // namespace mscons
