#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xlayer/net_model.hpp"
#include "xlayer/phy.hpp"
#include "xlayer/power_control.hpp"
#include "xlayer/scenario.hpp"

namespace xlayer {

/// Per-node routing state: link gains, every node's power, and the extended
/// interference I~(i,j) = sum_{k != i,j} h(k,j) P_k + h(i,j) P_i.
class RoutingTable {
public:
    RoutingTable(const LinkGainMatrix& gains, PowerVector powers);

    std::size_t size() const { return powers_.size(); }
    double gain(NodeId i, NodeId j) const { return gains_(i, j); }
    const PowerVector& powers() const { return powers_; }
    double extended_interference(NodeId i, NodeId j) const { return extended_(i, j); }

private:
    LinkGainMatrix gains_;
    PowerVector powers_;
    Eigen::MatrixXd extended_;
};

/// h(i,j) P_i / ((I~(i,j) - h(i,j) P_i) / L + noise).
double estimated_sir(NodeId i, NodeId j, const RoutingTable& table, std::size_t spreading_gain,
                     double noise_power);

/// estimated_sir for every ordered pair; diagonal is zero.
Eigen::MatrixXd estimated_sir_matrix(const RoutingTable& table, std::size_t spreading_gain, double noise_power);

/// Achievable LMMSE output SIR for every ordered pair at powers p, using the
/// optimal filter for each pair. Diagonal is zero.
Eigen::MatrixXd lmmse_sir_matrix(const PowerVector& p, const LinkGainMatrix& gains,
                                 const SpreadingCodebook& codebook, double noise_power);

class LinkCostMatrix {
public:
    LinkCostMatrix() = default;
    explicit LinkCostMatrix(Eigen::MatrixXd costs) : costs_(std::move(costs)) {}

    double operator()(NodeId i, NodeId j) const { return costs_(i, j); }
    std::size_t size() const { return static_cast<std::size_t>(costs_.rows()); }
    const Eigen::MatrixXd& matrix() const { return costs_; }

private:
    Eigen::MatrixXd costs_;
};

/// cost(i,j) = P_i where sir(i,j) >= gate, +infinity otherwise (and on the
/// diagonal).
LinkCostMatrix gated_link_costs(const PowerVector& p, const Eigen::MatrixXd& sir, double gate);

/// Gated costs from the estimated SIR with gate = target SIR.
LinkCostMatrix build_link_costs(const RoutingTable& table, const PhyParams& phy);

struct Path {
    std::vector<NodeId> nodes;
    double cost = 0.0;
};

/// Dijkstra over finite entries. Among equal-cost paths the lexicographically
/// smallest node sequence wins. Returns nullopt when `dest` is unreachable.
std::optional<Path> shortest_path(const LinkCostMatrix& costs, NodeId source, NodeId dest);

struct RouteSet {
    std::vector<std::vector<NodeId>> paths;  // one per session, source first
    ActiveLinkSet active;

    static RouteSet from_paths(std::size_t n_nodes, std::vector<std::vector<NodeId>> paths);

    friend bool operator==(const RouteSet& a, const RouteSet& b) { return a.paths == b.paths; }
};

class RoutingFailure : public std::runtime_error {
public:
    explicit RoutingFailure(std::size_t session)
        : std::runtime_error("no finite-cost route for session " + std::to_string(session)), session_(session) {}
    std::size_t session() const noexcept { return session_; }

private:
    std::size_t session_;
};

/// Shortest path per session; throws RoutingFailure naming the first
/// unreachable session.
RouteSet assign_routes(const SessionSet& sessions, const LinkCostMatrix& costs);

/// Energy-per-bit link costs at powers p using the estimated SIR. Not gated:
/// every pair with nonzero success probability has a finite cost.
LinkCostMatrix energy_link_costs(const Scenario& scenario, const LinkGainMatrix& gains, const PowerVector& p);

/// Initial route assignment under energy-per-bit costs at p_init.
RouteSet initial_routes(const Scenario& scenario, const Network& network, const PowerVector& p_init);

}  // namespace xlayer
