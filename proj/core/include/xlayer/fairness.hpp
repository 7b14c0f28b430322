#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xlayer/cross_layer.hpp"

namespace xlayer {

struct RouteCandidate {
    std::size_t trial = 0;
    double total_power = 0.0;
    PowerVector powers;
    std::vector<std::vector<NodeId>> paths;
};

/// Near-optimal route/power configurations plus the uniform-consumption
/// target P_av (mean node power of the best configuration).
struct RouteCandidateSet {
    std::vector<RouteCandidate> candidates;
    double average_power = 0.0;

    std::size_t size() const { return candidates.size(); }
    std::size_t node_count() const { return candidates.empty() ? 0 : candidates.front().powers.size(); }
};

/// Every converged trial whose total power is within (1 + threshold) of the
/// best one, in trial order. Throws if no trial converged.
RouteCandidateSet select_candidates(std::span<const TrialSummary> trials, double threshold = 0.10);

struct MixtureWeights {
    std::vector<double> w;
};

/// Normalized mixture objective ||P w - P_av 1||^2 / (N P_av^2), where column k
/// of P is candidate k's power vector.
double mixture_objective(const RouteCandidateSet& candidates, std::span<const double> w);
std::vector<double> mixture_gradient(const RouteCandidateSet& candidates, std::span<const double> w);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Minimizes mixture_objective over the simplex. Projected gradient from the
/// uniform point until the projected-gradient norm is <= 1e-9, then an exact
/// equality-constrained solve on the identified support.
MixtureWeights optimize_mixture(const RouteCandidateSet& candidates);

/// Time-averaged node powers P w.
PowerVector effective_node_powers(const RouteCandidateSet& candidates, const MixtureWeights& weights);

/// Random realization of the mixture: candidate index per epoch, drawn
/// i.i.d. with probabilities w.
std::vector<std::size_t> sample_schedule(const MixtureWeights& weights, std::size_t epochs, std::uint64_t seed);

/// Population variance of node powers.
double node_power_variance(std::span<const double> p);

}  // namespace xlayer
