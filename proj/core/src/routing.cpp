#include "xlayer/routing.hpp"

#include <algorithm>
#include <limits>

namespace xlayer {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RoutingTable::RoutingTable(const LinkGainMatrix& gains, PowerVector powers)
    : gains_(gains), powers_(std::move(powers)) {
    const std::size_t n = powers_.size();
    if (gains_.size() != n) throw std::invalid_argument("RoutingTable: gains and powers differ in size");
    extended_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (NodeId j = 0; j < n; ++j) {
        for (NodeId i = 0; i < n; ++i) {
            if (i == j) continue;
            double sum = 0.0;
            for (NodeId k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                sum += gains_(k, j) * powers_[k];
            }
            extended_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum + gains_(i, j) * powers_[i];
        }
    }
}

double estimated_sir(NodeId i, NodeId j, const RoutingTable& table, std::size_t spreading_gain,
                     double noise_power) {
    if (i == j) throw std::invalid_argument("estimated_sir: self-loop");
    const double own = table.gain(i, j) * table.powers()[i];
    const double others = table.extended_interference(i, j) - own;
    return own / (others / static_cast<double>(spreading_gain) + noise_power);
}

Eigen::MatrixXd estimated_sir_matrix(const RoutingTable& table, std::size_t spreading_gain, double noise_power) {
    const auto n = static_cast<Eigen::Index>(table.size());
    Eigen::MatrixXd sir = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                sir(i, j) = estimated_sir(static_cast<NodeId>(i), static_cast<NodeId>(j), table,
                                          spreading_gain, noise_power);
    return sir;
}

Eigen::MatrixXd lmmse_sir_matrix(const PowerVector& p, const LinkGainMatrix& gains,
                                 const SpreadingCodebook& codebook, double noise_power) {
    const std::size_t n = p.size();
    const auto L = static_cast<Eigen::Index>(codebook.spreading_gain());
    Eigen::MatrixXd sir = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (NodeId j = 0; j < n; ++j) {
        // R_j covers every transmitter except the receiver itself; removing
        // transmitter i is a rank-one downdate, so with q = s_i^T R_j^-1 s_i
        // and a = h(i,j) P_i the optimal output SIR is a q / (1 - a q).
        Eigen::MatrixXd r = noise_power * Eigen::MatrixXd::Identity(L, L);
        for (NodeId k = 0; k < n; ++k) {
            if (k == j || p[k] == 0.0) continue;
            r.selfadjointView<Eigen::Lower>().rankUpdate(codebook.sequence(k), p[k] * gains(k, j));
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(r.selfadjointView<Eigen::Lower>());
        const Eigen::MatrixXd solved = llt.solve(codebook.sequences);
        for (NodeId i = 0; i < n; ++i) {
            if (i == j) continue;
            const auto col = static_cast<Eigen::Index>(i);
            const double q = codebook.sequences.col(col).dot(solved.col(col));
            const double a = gains(i, j) * p[i];
            const double rest = 1.0 - a * q;
            sir(col, static_cast<Eigen::Index>(j)) = rest > 0.0 ? a * q / rest : kInf;
        }
    }
    return sir;
}

LinkCostMatrix gated_link_costs(const PowerVector& p, const Eigen::MatrixXd& sir, double gate) {
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, kInf);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && sir(i, j) >= gate) c(i, j) = p[static_cast<std::size_t>(i)];
    return LinkCostMatrix(std::move(c));
}

LinkCostMatrix build_link_costs(const RoutingTable& table, const PhyParams& phy) {
    return gated_link_costs(table.powers(), estimated_sir_matrix(table, phy.spreading_gain, phy.noise_power),
                            phy.target_sir);
}

std::optional<Path> shortest_path(const LinkCostMatrix& costs, NodeId source, NodeId dest) {
    const std::size_t n = costs.size();
    if (source >= n || dest >= n) throw std::out_of_range("shortest_path: node id out of range");
    if (source == dest) return Path{{source}, 0.0};

    std::vector<double> dist(n, kInf);
    std::vector<std::vector<NodeId>> path(n);
    std::vector<bool> done(n, false);
    dist[source] = 0.0;
    path[source] = {source};

    for (std::size_t round = 0; round < n; ++round) {
        NodeId u = n;
        for (NodeId v = 0; v < n; ++v) {
            if (done[v] || dist[v] == kInf) continue;
            if (u == n || dist[v] < dist[u] || (dist[v] == dist[u] && path[v] < path[u])) u = v;
        }
        if (u == n || u == dest) break;
        done[u] = true;
        for (NodeId v = 0; v < n; ++v) {
            if (done[v] || v == u) continue;
            const double c = costs(u, v);
            if (c == kInf) continue;
            const double alt = dist[u] + c;
            if (alt < dist[v]) {
                dist[v] = alt;
                path[v] = path[u];
                path[v].push_back(v);
            } else if (alt == dist[v]) {
                auto candidate = path[u];
                candidate.push_back(v);
                if (candidate < path[v]) path[v] = std::move(candidate);
            }
        }
    }
    if (dist[dest] == kInf) return std::nullopt;
    return Path{std::move(path[dest]), dist[dest]};
}

RouteSet RouteSet::from_paths(std::size_t n_nodes, std::vector<std::vector<NodeId>> paths) {
    std::vector<Link> links;
    for (const auto& route : paths)
        for (std::size_t h = 0; h + 1 < route.size(); ++h) links.push_back({route[h], route[h + 1]});
    RouteSet rs;
    rs.paths = std::move(paths);
    rs.active = ActiveLinkSet(n_nodes, std::move(links));
    return rs;
}

RouteSet assign_routes(const SessionSet& sessions, const LinkCostMatrix& costs) {
    std::vector<std::vector<NodeId>> paths;
    paths.reserve(sessions.size());
    for (std::size_t s = 0; s < sessions.size(); ++s) {
        auto route = shortest_path(costs, sessions[s].source, sessions[s].destination);
        if (!route) throw RoutingFailure(s);
        paths.push_back(std::move(route->nodes));
    }
    return RouteSet::from_paths(costs.size(), std::move(paths));
}

LinkCostMatrix energy_link_costs(const Scenario& scenario, const LinkGainMatrix& gains, const PowerVector& p) {
    const RoutingTable table(gains, p);
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, kInf);
    for (NodeId i = 0; i < p.size(); ++i) {
        for (NodeId j = 0; j < p.size(); ++j) {
            if (i == j) continue;
            const double sir = estimated_sir(i, j, table, scenario.spreading_gain, scenario.noise_power);
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                energy_per_bit_link({i, j}, p, sir, scenario.bit_rate(), scenario.packet_bits);
        }
    }
    return LinkCostMatrix(std::move(c));
}

RouteSet initial_routes(const Scenario& scenario, const Network& network, const PowerVector& p_init) {
    return assign_routes(network.sessions, energy_link_costs(scenario, network.gains, p_init));
}

}  // namespace xlayer
