#pragma once

#include <span>
#include <vector>

#include "xlayer/net_model.hpp"
#include "xlayer/phy.hpp"
#include "xlayer/types.hpp"

namespace xlayer {

/// Directed links used by a route assignment, with per-node outgoing lists.
class ActiveLinkSet {
public:
    ActiveLinkSet() = default;
    /// Sorts and deduplicates `links`; rejects self-loops and out-of-range ids.
    ActiveLinkSet(std::size_t n_nodes, std::vector<Link> links);

    std::size_t node_count() const { return outgoing_.size(); }
    const std::vector<Link>& links() const { return links_; }
    std::span<const NodeId> outgoing(NodeId i) const { return outgoing_.at(i); }
    bool transmits(NodeId i) const { return !outgoing_.at(i).empty(); }
    bool contains(Link link) const;

    friend bool operator==(const ActiveLinkSet& a, const ActiveLinkSet& b) { return a.links_ == b.links_; }

private:
    std::vector<Link> links_;
    std::vector<std::vector<NodeId>> outgoing_;
};

enum class PcStatus { converged, infeasible, max_iter };
enum class Schedule { synchronous, async_sweep };

std::string to_string(PcStatus status);

struct PcOptions {
    double tol = 1e-6;
    std::size_t max_iter = 10000;
    double power_cap = 1.0;
    Schedule schedule = Schedule::synchronous;

    static PcOptions from(const Scenario& s) { return {s.pc_tol, s.pc_max_iter, s.power_cap, Schedule::synchronous}; }
};

struct PcResult {
    PcStatus status = PcStatus::max_iter;
    PowerVector powers;
    std::size_t iterations = 0;
    std::vector<double> trace;  // total power of every iterate, starting with p0

    bool converged() const { return status == PcStatus::converged; }
};

/// T_i(p): the largest per-link power that meets the target SIR on every
/// outgoing link of node i, given everyone else's current power.
/// Throws std::invalid_argument if node i has no outgoing links.
double interference_target(NodeId i, const PowerVector& p, const ActiveLinkSet& active,
                           const LinkGainMatrix& gains, const PhyParams& phy);

/// Fixed-point iteration P <- T(p). Nodes without outgoing links are held at
/// zero. Converged when |P_i - T_i(p)| <= tol * max(P_i, tiny) for every node;
/// the returned powers are the point at which that test passed.
PcResult pc_iterate(const PowerVector& p0, const ActiveLinkSet& active, const LinkGainMatrix& gains,
                    const PhyParams& phy, const PcOptions& options = {});

enum class FilterMode {
    lmmse,          // filters re-optimized every iteration
    matched_exact,  // c_i = s_i with actual cross-correlations
};

struct PcMudResult {
    PcResult pc;
    FilterBank filters;                   // designed at the returned powers when converged
    std::size_t ill_conditioned = 0;      // filters flagged while iterating
};

/// Two-step iteration: design the receiver filter for every active link at
/// the current powers, then set each node's power so that its worst outgoing
/// link meets the target SIR through that filter.
PcMudResult pc_mud_iterate(const PowerVector& p0, const ActiveLinkSet& active, const LinkGainMatrix& gains,
                           const SpreadingCodebook& codebook, const PhyParams& phy,
                           const PcOptions& options = {}, FilterMode mode = FilterMode::lmmse);

}  // namespace xlayer
