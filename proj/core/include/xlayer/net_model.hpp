#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xlayer/scenario.hpp"
#include "xlayer/types.hpp"

namespace xlayer {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct Topology {
    std::vector<Position> positions;  // meters, indexed by node id
    std::size_t size() const { return positions.size(); }
};

/// Two nodes share a location, so a path-loss gain would be infinite. The
/// caller is expected to regenerate the topology.
class CoincidentNodes : public std::runtime_error {
public:
    CoincidentNodes(NodeId a, NodeId b)
        : std::runtime_error("coincident nodes " + std::to_string(a) + " and " + std::to_string(b)),
          a_(a), b_(b) {}
    NodeId first() const noexcept { return a_; }
    NodeId second() const noexcept { return b_; }

private:
    NodeId a_;
    NodeId b_;
};

/// Pairwise path-loss gains h(i,j) = d(i,j)^-n. The diagonal is stored as
/// zero and never read by the SIR formulas.
class LinkGainMatrix {
public:
    LinkGainMatrix() = default;
    explicit LinkGainMatrix(Eigen::MatrixXd gains) : gains_(std::move(gains)) {}

    double operator()(NodeId from, NodeId to) const { return gains_(from, to); }
    std::size_t size() const { return static_cast<std::size_t>(gains_.rows()); }
    const Eigen::MatrixXd& matrix() const { return gains_; }

private:
    Eigen::MatrixXd gains_;
};

struct Session {
    NodeId source = 0;
    NodeId destination = 0;
};

using SessionSet = std::vector<Session>;

/// Unit-norm spreading sequences, one column per node (L x n).
struct SpreadingCodebook {
    Eigen::MatrixXd sequences;

    std::size_t spreading_gain() const { return static_cast<std::size_t>(sequences.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(sequences.cols()); }
    auto sequence(NodeId i) const { return sequences.col(static_cast<Eigen::Index>(i)); }
};

Topology generate_topology(std::size_t n_nodes, double area_side, std::uint64_t seed);

/// Throws CoincidentNodes when two positions are identical.
LinkGainMatrix compute_link_gains(const Topology& topology, double path_loss_exp);

/// One session per node, destination uniform over the other nodes.
SessionSet generate_sessions(std::size_t n_nodes, std::uint64_t seed);

/// Binary +-1/sqrt(L) chips, drawn independently for every node.
SpreadingCodebook generate_spreading_codebook(std::size_t n_nodes, std::size_t spreading_gain,
                                              std::uint64_t seed);

/// Everything static about one network instance.
struct Network {
    Topology topology;
    LinkGainMatrix gains;
    SessionSet sessions;
    SpreadingCodebook codebook;
    std::uint64_t seed = 0;
    std::size_t regenerations = 0;  // topologies discarded for coincident nodes

    std::size_t size() const { return topology.size(); }
};

/// Builds topology, gains, sessions and codebook from `seed` using the
/// scenario's sizes. Coincident placements are redrawn from the next
/// topology sub-stream.
Network make_network(const Scenario& scenario, std::uint64_t seed);

}  // namespace xlayer
