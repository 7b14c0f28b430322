#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xlayer/net_model.hpp"
#include "xlayer/phy.hpp"
#include "xlayer/power_control.hpp"
#include "xlayer/routing.hpp"
#include "xlayer/scenario.hpp"

namespace xlayer {

enum class PhaseKind { initial, power_control, routing };
std::string to_string(PhaseKind kind);

struct PhaseRecord {
    PhaseKind kind = PhaseKind::initial;
    double total_power = 0.0;      // watts
    double energy_per_bit = 0.0;   // joules per delivered bit
};

/// Starts with the initial state, then one record per phase.
using IterationTrace = std::vector<PhaseRecord>;

enum class JointStatus { local_min, infeasible_init };
std::string to_string(JointStatus status);

struct JointOptions {
    /// Stop after this many power-control/routing phases even if routes keep
    /// changing, and ignore the improvement threshold until then.
    std::optional<std::size_t> phase_budget;
};

struct JointSolution {
    JointStatus status = JointStatus::infeasible_init;
    PowerVector powers;
    RouteSet routes;
    FilterBank filters;        // LMMSE receivers only
    IterationTrace trace;
    std::size_t phases = 0;    // phases executed, excluding the initial record
    PcResult initial_pc;       // diagnostics for the first power-control run
};

/// Equal P_t everywhere, or log-uniform on [P_t/spread, P_t*spread] drawn
/// from `seed`, depending on the scenario's initial power mode.
PowerVector initial_powers(const Scenario& scenario, std::uint64_t seed);

/// Log-uniform random initialization regardless of the scenario's mode.
PowerVector random_initial_powers(const Scenario& scenario, std::uint64_t seed);

/// Receiver filters for the active links at powers p (matched: c = s).
FilterBank design_filters(ReceiverKind receiver, const PowerVector& p, const ActiveLinkSet& active,
                          const Network& network, double noise_power);

/// Link SIR under the scenario's receiver model. LMMSE uses `filters`.
double link_sir(const Scenario& scenario, const Network& network, const PowerVector& p,
                const FilterBank& filters, Link link);

/// Average over sessions of the end-to-end energy per delivered bit, where
/// each hop costs P_i / (bit_rate * f(SIR)).
double network_energy_per_bit(const Scenario& scenario, const Network& network, const PowerVector& p,
                              const RouteSet& routes, const FilterBank& filters);

/// Alternates converged power control and gated minimum-power rerouting
/// until rerouting stops paying off.
JointSolution joint_optimize(const Scenario& scenario, const Network& network, const PowerVector& p_init,
                             const JointOptions& options = {});

struct NetworkMetrics {
    double total_power = 0.0;
    double energy_per_bit = 0.0;
    PowerVector per_node;
};

NetworkMetrics network_metrics(const JointSolution& solution, const Scenario& scenario, const Network& network);

/// Metrics of the un-optimized starting point: initial routes at p_init.
NetworkMetrics initial_state_metrics(const Scenario& scenario, const Network& network, const PowerVector& p_init);

struct TrialSummary {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    JointStatus status = JointStatus::infeasible_init;
    double initial_total_power = 0.0;
    double initial_energy_per_bit = 0.0;
    double total_power = 0.0;
    double energy_per_bit = 0.0;
    std::size_t phases = 0;
    PowerVector powers;
    std::vector<std::vector<NodeId>> paths;
};

struct MultiStartResult {
    std::optional<JointSolution> best;  // empty when every trial was infeasible
    std::size_t best_trial = 0;
    std::vector<TrialSummary> trials;   // ordered by trial index

    bool any_feasible() const { return best.has_value(); }
};

/// Runs joint_optimize from `trials` random initializations (trial t seeded
/// with derive_seed(seed, Stream::trial, t)) and keeps the lowest total
/// power. Trials may run on `threads` workers; results do not depend on it.
MultiStartResult multi_start(const Scenario& scenario, const Network& network, std::size_t trials,
                             std::uint64_t seed, const JointOptions& options = {}, unsigned threads = 1);

}  // namespace xlayer
