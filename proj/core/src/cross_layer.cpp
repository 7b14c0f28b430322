#include "xlayer/cross_layer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "xlayer/rng.hpp"

namespace xlayer {

std::string to_string(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::initial: return "initial";
        case PhaseKind::power_control: return "power_control";
        case PhaseKind::routing: return "routing";
    }
    return "unknown";
}

std::string to_string(JointStatus status) {
    return status == JointStatus::local_min ? "local_min" : "infeasible_init";
}

PowerVector random_initial_powers(const Scenario& scenario, std::uint64_t seed) {
    Rng rng(derive_seed(seed, Stream::initial_power));
    const double lo = scenario.initial_power / scenario.random_power_spread;
    const double hi = scenario.initial_power * scenario.random_power_spread;
    PowerVector p(scenario.n_nodes);
    for (double& v : p) v = rng.log_uniform(lo, hi);
    return p;
}

PowerVector initial_powers(const Scenario& scenario, std::uint64_t seed) {
    if (scenario.initial_power_mode == InitialPowerMode::equal)
        return PowerVector(scenario.n_nodes, scenario.initial_power);
    return random_initial_powers(scenario, seed);
}

FilterBank design_filters(ReceiverKind receiver, const PowerVector& p, const ActiveLinkSet& active,
                          const Network& network, double noise_power) {
    FilterBank bank;
    for (const Link& l : active.links()) {
        if (receiver == ReceiverKind::lmmse)
            bank.emplace(l, lmmse_filter(l, p, network.gains, network.codebook, noise_power).coeffs);
        else
            bank.emplace(l, network.codebook.sequence(l.from));
    }
    return bank;
}

double link_sir(const Scenario& scenario, const Network& network, const PowerVector& p,
                const FilterBank& filters, Link link) {
    if (scenario.receiver == ReceiverKind::lmmse)
        return sir_lmmse(link, p, filters.at(link), network.gains, network.codebook, scenario.noise_power);
    return sir_matched(link, p, network.gains, scenario.spreading_gain, scenario.noise_power);
}

double network_energy_per_bit(const Scenario& scenario, const Network& network, const PowerVector& p,
                              const RouteSet& routes, const FilterBank& filters) {
    if (routes.paths.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& path : routes.paths) {
        for (std::size_t h = 0; h + 1 < path.size(); ++h) {
            const Link l{path[h], path[h + 1]};
            sum += energy_per_bit_link(l, p, link_sir(scenario, network, p, filters, l), scenario.bit_rate(),
                                       scenario.packet_bits);
        }
    }
    return sum / static_cast<double>(routes.paths.size());
}

namespace {

struct PcRun {
    PcResult pc;
    FilterBank filters;
};

PcRun run_power_control(const Scenario& scenario, const Network& network, const PowerVector& p0,
                        const RouteSet& routes) {
    const auto phy = PhyParams::from(scenario);
    const auto opts = PcOptions::from(scenario);
    if (scenario.receiver == ReceiverKind::lmmse) {
        auto r = pc_mud_iterate(p0, routes.active, network.gains, network.codebook, phy, opts);
        return {std::move(r.pc), std::move(r.filters)};
    }
    auto pc = pc_iterate(p0, routes.active, network.gains, phy, opts);
    FilterBank filters = design_filters(ReceiverKind::matched, pc.powers, routes.active, network,
                                        scenario.noise_power);
    return {std::move(pc), std::move(filters)};
}

// Gated minimum-power costs. A link admitted only if its SIR reaches the
// target, except links already in use, which keep their admission down to
// target * (1 - pc_tol): converged power control places them anywhere in
// that band.
LinkCostMatrix routing_costs(const Scenario& scenario, const Network& network, const PowerVector& p,
                             const ActiveLinkSet& current) {
    Eigen::MatrixXd sir;
    if (scenario.receiver == ReceiverKind::lmmse) {
        sir = lmmse_sir_matrix(p, network.gains, network.codebook, scenario.noise_power);
    } else {
        sir = estimated_sir_matrix(RoutingTable(network.gains, p), scenario.spreading_gain,
                                   scenario.noise_power);
    }
    Eigen::MatrixXd costs = gated_link_costs(p, sir, scenario.target_sir).matrix();
    const double relaxed = scenario.target_sir * (1.0 - scenario.pc_tol);
    for (const Link& l : current.links()) {
        const auto i = static_cast<Eigen::Index>(l.from);
        const auto j = static_cast<Eigen::Index>(l.to);
        if (sir(i, j) >= relaxed) costs(i, j) = p[l.from];
    }
    return LinkCostMatrix(std::move(costs));
}

PowerVector silence_idle(PowerVector p, const ActiveLinkSet& active) {
    for (NodeId i = 0; i < p.size(); ++i)
        if (!active.transmits(i)) p[i] = 0.0;
    return p;
}

}  // namespace

JointSolution joint_optimize(const Scenario& scenario, const Network& network, const PowerVector& p_init,
                             const JointOptions& options) {
    if (p_init.size() != network.size()) throw std::invalid_argument("joint_optimize: p_init size mismatch");
    JointSolution sol;
    sol.routes = initial_routes(scenario, network, p_init);
    {
        const auto filters = design_filters(scenario.receiver, p_init, sol.routes.active, network,
                                            scenario.noise_power);
        sol.trace.push_back({PhaseKind::initial, total_power(p_init),
                             network_energy_per_bit(scenario, network, p_init, sol.routes, filters)});
    }

    auto record = [&](PhaseKind kind, const PowerVector& p, const RouteSet& routes, const FilterBank& filters) {
        sol.trace.push_back({kind, total_power(p), network_energy_per_bit(scenario, network, p, routes, filters)});
        ++sol.phases;
    };

    PcRun run = run_power_control(scenario, network, p_init, sol.routes);
    sol.initial_pc = run.pc;
    if (!run.pc.converged()) {
        sol.status = JointStatus::infeasible_init;
        sol.powers = run.pc.powers;
        return sol;
    }
    sol.powers = run.pc.powers;
    sol.filters = run.filters;
    record(PhaseKind::power_control, sol.powers, sol.routes, sol.filters);

    const std::size_t cap = options.phase_budget ? std::min(*options.phase_budget, scenario.phase_cap)
                                                 : scenario.phase_cap;
    double last_pc_total = total_power(sol.powers);
    while (sol.phases < cap) {
        const auto costs = routing_costs(scenario, network, sol.powers, sol.routes.active);
        RouteSet next;
        try {
            next = assign_routes(network.sessions, costs);
        } catch (const RoutingFailure& e) {
            throw std::logic_error(std::string("joint_optimize: current routes lost admission: ") + e.what());
        }
        const PowerVector routed = silence_idle(sol.powers, next.active);
        const FilterBank routed_filters =
            design_filters(scenario.receiver, routed, next.active, network, scenario.noise_power);
        record(PhaseKind::routing, routed, next, routed_filters);

        if (next == sol.routes) break;
        sol.routes = std::move(next);
        sol.powers = routed;
        sol.filters = routed_filters;
        if (sol.phases >= cap) break;

        run = run_power_control(scenario, network, routed, sol.routes);
        if (!run.pc.converged()) {
            throw std::logic_error("joint_optimize: power control diverged on gated routes (" +
                                   to_string(run.pc.status) + ")");
        }
        sol.powers = run.pc.powers;
        sol.filters = run.filters;
        record(PhaseKind::power_control, sol.powers, sol.routes, sol.filters);

        const double total = total_power(sol.powers);
        const double improvement = last_pc_total > 0.0 ? (last_pc_total - total) / last_pc_total : 0.0;
        last_pc_total = total;
        if (!options.phase_budget && improvement < scenario.improvement_tol) break;
    }
    sol.status = JointStatus::local_min;
    return sol;
}

NetworkMetrics network_metrics(const JointSolution& solution, const Scenario& scenario, const Network& network) {
    NetworkMetrics m;
    m.per_node = solution.powers;
    m.total_power = total_power(solution.powers);
    m.energy_per_bit = network_energy_per_bit(scenario, network, solution.powers, solution.routes, solution.filters);
    return m;
}

NetworkMetrics initial_state_metrics(const Scenario& scenario, const Network& network, const PowerVector& p_init) {
    const RouteSet routes = initial_routes(scenario, network, p_init);
    const auto filters = design_filters(scenario.receiver, p_init, routes.active, network, scenario.noise_power);
    return {total_power(p_init), network_energy_per_bit(scenario, network, p_init, routes, filters), p_init};
}

MultiStartResult multi_start(const Scenario& scenario, const Network& network, std::size_t trials,
                             std::uint64_t seed, const JointOptions& options, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("multi_start: need at least one trial");
    std::vector<std::optional<JointSolution>> solutions(trials);
    MultiStartResult result;
    result.trials.resize(trials);

    auto run_trial = [&](std::size_t t) {
        TrialSummary& s = result.trials[t];
        s.trial = t;
        s.seed = derive_seed(seed, Stream::trial, t);
        const PowerVector p0 = random_initial_powers(scenario, s.seed);
        JointSolution sol = joint_optimize(scenario, network, p0, options);
        s.status = sol.status;
        s.initial_total_power = sol.trace.front().total_power;
        s.initial_energy_per_bit = sol.trace.front().energy_per_bit;
        s.phases = sol.phases;
        if (sol.status == JointStatus::local_min) {
            const auto m = network_metrics(sol, scenario, network);
            s.total_power = m.total_power;
            s.energy_per_bit = m.energy_per_bit;
            s.powers = sol.powers;
            s.paths = sol.routes.paths;
            solutions[t] = std::move(sol);
        } else {
            s.total_power = total_power(sol.powers);
            s.energy_per_bit = std::numeric_limits<double>::infinity();
        }
    };

    detail::parallel_for(trials, threads, run_trial);

    for (std::size_t t = 0; t < trials; ++t) {
        if (!solutions[t]) continue;
        if (!result.best || result.trials[t].total_power < result.trials[result.best_trial].total_power) {
            result.best_trial = t;
            result.best = std::move(solutions[t]);
        }
    }
    return result;
}

}  // namespace xlayer
