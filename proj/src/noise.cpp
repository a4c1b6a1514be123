#include "mscons/noise.hpp"

#include <cmath>
#include <numbers>

#include "mscons/errors.hpp"

namespace mscons {

const char* to_string(NoiseDistribution d) {
    return d == NoiseDistribution::gaussian ? "gaussian" : "uniform";
}

namespace counter_rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial, std::uint64_t k,
                   std::uint64_t idx) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ k);
    h = splitmix64(h ^ idx);
    return h;
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::uint64_t edge_stream(int from, int to) {
    return (static_cast<std::uint64_t>(from) << 24) | static_cast<std::uint64_t>(to);
}

std::uint64_t input_stream(int agent) {
    return (1ull << 52) | static_cast<std::uint64_t>(agent);
}

double sample(NoiseDistribution d, double variance, std::uint64_t seed, std::uint64_t stream,
              std::uint64_t trial, std::uint64_t k) {
    if (variance == 0.0) return 0.0;
    if (d == NoiseDistribution::uniform) {
        const double u = uniform01(hash(seed, stream, trial, k, 0));
        return (2.0 * u - 1.0) * std::sqrt(3.0 * variance);
    }
    // Box-Muller; u1 shifted into (0, 1] so the log is finite.
    const double u1 =
        (static_cast<double>(hash(seed, stream, trial, k, 0) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(hash(seed, stream, trial, k, 1));
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return std::sqrt(variance) * z;
}

}  // namespace counter_rng

NoiseDraw draw(const NoiseSpec& spec, const NetworkTopology& t, std::uint64_t trial,
               std::uint64_t k) {
    NoiseDraw d;
    if (t.mode == GraphMode::input_channel) {
        d.input_values.resize(t.n_nodes);
        for (int i = 0; i < t.n_nodes; ++i)
            d.input_values[i] =
                counter_rng::sample(spec.distribution, t.input_variances[i], spec.seed,
                                    counter_rng::input_stream(i), trial, k);
    } else {
        d.edge_values.resize(t.edges.size());
        for (std::size_t e = 0; e < t.edges.size(); ++e)
            d.edge_values[e] =
                counter_rng::sample(spec.distribution, t.edges[e].variance, spec.seed,
                                    counter_rng::edge_stream(t.edges[e].from, t.edges[e].to),
                                    trial, k);
    }
    return d;
}

Eigen::MatrixXd noise_moment_matrix(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::undirected)
        throw ValidationError("noise_moment_matrix: undirected mode only");
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(t.n_nodes, t.n_nodes);
    for (const auto& [p, q] : t.undirected_pairs()) {
        const double w = t.edge_variance(p, q) + t.edge_variance(q, p);
        theta(p, q) -= w;
        theta(q, p) -= w;
        theta(p, p) += w;
        theta(q, q) += w;
    }
    return theta;
}

Eigen::MatrixXd follower_noise_moment_matrix(const NetworkTopology& t) {
    t.validate();
    if (t.mode != GraphMode::leader_follower)
        throw ValidationError("follower_noise_moment_matrix: leader-follower mode only");
    const int nf = t.n_nodes - 1;
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(nf, nf);
    for (const auto& [p, q] : t.undirected_pairs()) {
        const double w = t.edge_variance(p, q) + t.edge_variance(q, p);
        theta(p - 1, q - 1) -= w;
        theta(q - 1, p - 1) -= w;
        theta(p - 1, p - 1) += w;
        theta(q - 1, q - 1) += w;
    }
    for (int f : t.leader_linked_followers()) theta(f - 1, f - 1) += t.edge_variance(0, f);
    return theta;
}

}  // namespace mscons
