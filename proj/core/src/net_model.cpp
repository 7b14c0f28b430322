#include "xlayer/net_model.hpp"

#include <cmath>

#include "xlayer/rng.hpp"

namespace xlayer {

Topology generate_topology(std::size_t n_nodes, double area_side, std::uint64_t seed) {
    if (n_nodes < 2) throw std::invalid_argument("generate_topology: need at least 2 nodes");
    if (!(area_side > 0.0)) throw std::invalid_argument("generate_topology: area_side must be positive");
    Rng rng(seed);
    Topology t;
    t.positions.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double x = rng.uniform(0.0, area_side);
        const double y = rng.uniform(0.0, area_side);
        t.positions.push_back({x, y});
    }
    return t;
}

LinkGainMatrix compute_link_gains(const Topology& topology, double path_loss_exp) {
    const auto n = static_cast<Eigen::Index>(topology.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& a = topology.positions[static_cast<std::size_t>(i)];
            const auto& b = topology.positions[static_cast<std::size_t>(j)];
            const double d = std::hypot(a.x - b.x, a.y - b.y);
            if (d == 0.0) throw CoincidentNodes(static_cast<NodeId>(i), static_cast<NodeId>(j));
            const double g = std::pow(d, -path_loss_exp);
            h(i, j) = g;
            h(j, i) = g;
        }
    }
    return LinkGainMatrix(std::move(h));
}

SessionSet generate_sessions(std::size_t n_nodes, std::uint64_t seed) {
    if (n_nodes < 2) throw std::invalid_argument("generate_sessions: need at least 2 nodes");
    Rng rng(seed);
    SessionSet sessions;
    sessions.reserve(n_nodes);
    for (NodeId s = 0; s < n_nodes; ++s) {
        NodeId d = static_cast<NodeId>(rng.below(n_nodes - 1));
        if (d >= s) ++d;
        sessions.push_back({s, d});
    }
    return sessions;
}

SpreadingCodebook generate_spreading_codebook(std::size_t n_nodes, std::size_t spreading_gain,
                                              std::uint64_t seed) {
    if (spreading_gain < 1) throw std::invalid_argument("generate_spreading_codebook: L must be >= 1");
    Rng rng(seed);
    const double chip = 1.0 / std::sqrt(static_cast<double>(spreading_gain));
    SpreadingCodebook book;
    book.sequences.resize(static_cast<Eigen::Index>(spreading_gain), static_cast<Eigen::Index>(n_nodes));
    for (Eigen::Index i = 0; i < book.sequences.cols(); ++i)
        for (Eigen::Index c = 0; c < book.sequences.rows(); ++c)
            book.sequences(c, i) = rng.coin() ? chip : -chip;
    return book;
}

Network make_network(const Scenario& scenario, std::uint64_t seed) {
    Network net;
    net.seed = seed;
    for (std::uint64_t attempt = 0;; ++attempt) {
        net.topology = generate_topology(scenario.n_nodes, scenario.area_side,
                                         derive_seed(seed, Stream::topology, attempt));
        try {
            net.gains = compute_link_gains(net.topology, scenario.path_loss_exp);
            break;
        } catch (const CoincidentNodes&) {
            ++net.regenerations;
        }
    }
    net.sessions = generate_sessions(scenario.n_nodes, derive_seed(seed, Stream::sessions));
    net.codebook = generate_spreading_codebook(scenario.n_nodes, scenario.spreading_gain,
                                               derive_seed(seed, Stream::codebook));
    return net;
}

}  // namespace xlayer
