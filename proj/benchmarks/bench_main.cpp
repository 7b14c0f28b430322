#include <benchmark/benchmark.h>

#include "xlayer/cross_layer.hpp"
#include "xlayer/phy.hpp"
#include "xlayer/power_control.hpp"
#include "xlayer/routing.hpp"

using namespace xlayer;

namespace {

// first seed at this size whose initial routes admit a power solution
std::pair<Scenario, Network> feasible_network(std::size_t n) {
    Scenario s;
    s.n_nodes = n;
    for (std::uint64_t seed = 1;; ++seed) {
        auto net = make_network(s, seed);
        const auto p0 = initial_powers(s, seed);
        const auto routes = initial_routes(s, net, p0);
        if (pc_iterate(p0, routes.active, net.gains, PhyParams::from(s), PcOptions::from(s)).converged())
            return {s, std::move(net)};
    }
}

void BM_PowerControl(benchmark::State& state) {
    const auto [s, net] = feasible_network(static_cast<std::size_t>(state.range(0)));
    const auto p0 = initial_powers(s, 1);
    const auto routes = initial_routes(s, net, p0);
    for (auto _ : state)
        benchmark::DoNotOptimize(pc_iterate(p0, routes.active, net.gains, PhyParams::from(s), PcOptions::from(s)));
}
BENCHMARK(BM_PowerControl)->Arg(10)->Arg(20)->Arg(40);

void BM_ShortestPath(benchmark::State& state) {
    Scenario s;
    s.n_nodes = static_cast<std::size_t>(state.range(0));
    const auto net = make_network(s, 1);
    const auto costs = energy_link_costs(s, net.gains, initial_powers(s, 1));
    for (auto _ : state) benchmark::DoNotOptimize(shortest_path(costs, 0, s.n_nodes - 1));
}
BENCHMARK(BM_ShortestPath)->Arg(20)->Arg(55)->Arg(200);

void BM_LmmseFilter(benchmark::State& state) {
    Scenario s;
    s.spreading_gain = static_cast<std::size_t>(state.range(0));
    const auto net = make_network(s, 1);
    const auto p = initial_powers(s, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lmmse_filter({0, 1}, p, net.gains, net.codebook, s.noise_power));
}
BENCHMARK(BM_LmmseFilter)->Arg(32)->Arg(128);

void BM_JointLoop(benchmark::State& state) {
    const auto [s, net] = feasible_network(static_cast<std::size_t>(state.range(0)));
    const auto p0 = initial_powers(s, 1);
    for (auto _ : state) benchmark::DoNotOptimize(joint_optimize(s, net, p0));
}
BENCHMARK(BM_JointLoop)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
