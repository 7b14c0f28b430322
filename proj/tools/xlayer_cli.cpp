// xlayer: joint power control / routing experiments for CDMA ad hoc networks.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible scenario,
// 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xlayer/experiments.hpp"
#include "xlayer/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> receiver;
    std::optional<std::size_t> nodes;
    std::optional<std::size_t> spreading_gain;
    std::string out = "out";
    std::optional<std::size_t> phase_budget;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "Scenario JSON file or a manifest.json from an earlier run");
    cmd->add_option("--seed", f.seed, "Master seed (overrides the config)");
    cmd->add_option("--trials", f.trials, "Trials / random initializations / topologies per size");
    cmd->add_option("--receiver", f.receiver, "Receiver: matched or lmmse")->check(CLI::IsMember({"matched", "lmmse"}));
    cmd->add_option("--nodes", f.nodes, "Number of nodes");
    cmd->add_option("--spreading-gain", f.spreading_gain, "Spreading gain L");
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd->add_option("--phase-budget", f.phase_budget, "Fixed number of joint-loop phases");
    cmd->add_option("--threads", f.threads, "Worker threads (results do not depend on it)")->capture_default_str();
}

xlayer::ExperimentConfig build_config(xlayer::ExperimentKind kind, const CommonFlags& f) {
    xlayer::ExperimentConfig c;
    if (!f.config.empty()) {
        if (xlayer::is_manifest(f.config)) {
            c = xlayer::load_manifest(f.config);
            if (c.kind != kind)
                throw xlayer::ConfigError("--config", "manifest was written by '" + xlayer::to_string(c.kind) +
                                                          "', not '" + xlayer::to_string(kind) + "'");
        } else {
            c.scenario = xlayer::load_scenario(f.config);
        }
    }
    c.kind = kind;
    if (f.seed) c.scenario.master_seed = *f.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.receiver) c.scenario.receiver = xlayer::receiver_from_string(*f.receiver);
    if (f.nodes) c.scenario.n_nodes = *f.nodes;
    if (f.spreading_gain) c.scenario.spreading_gain = *f.spreading_gain;
    if (f.phase_budget) c.phase_budget = *f.phase_budget;
    c.out_dir = f.out;
    c.threads = f.threads;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-efficient ad hoc CDMA networks: joint power control, routing and multiuser detection"};
    app.require_subcommand(1);

    CommonFlags run_f, ms_f, fair_f, cap_f, sweep_f;
    auto* run = app.add_subcommand("run", "Joint power control and routing on one network");
    add_common(run, run_f);
    auto* ms = app.add_subcommand("multistart", "Best of many random power initializations");
    add_common(ms, ms_f);
    auto* fair = app.add_subcommand("fairness", "Route/power mixture for uniform node consumption");
    add_common(fair, fair_f);
    double threshold = 0.10;
    fair->add_option("--threshold", threshold, "Admission threshold relative to the best total power")
        ->capture_default_str();
    auto* cap = app.add_subcommand("capacity", "Largest network size that is feasible often enough");
    add_common(cap, cap_f);
    double target = 0.95;
    std::size_t min_nodes = 2, max_nodes = 200;
    bool joint = false;
    cap->add_option("--target", target, "Required feasibility rate")->capture_default_str();
    cap->add_option("--min-nodes", min_nodes, "First size scanned")->capture_default_str();
    cap->add_option("--max-nodes", max_nodes, "Scan ceiling")->capture_default_str();
    cap->add_flag("--joint", joint, "Judge feasibility with the full joint loop");
    auto* sweep = app.add_subcommand("sweep", "Joint loop over many independent topologies");
    add_common(sweep, sweep_f);

    auto* gain = app.add_subcommand("gain", "Normalized throughput gain (n_a L_b) / (L_a n_b)");
    std::size_t n_a = 0, l_a = 0, n_b = 0, l_b = 0;
    gain->add_option("n_a", n_a, "Users supported by receiver A")->required();
    gain->add_option("L_a", l_a, "Spreading gain of receiver A")->required();
    gain->add_option("n_b", n_b, "Users supported by receiver B")->required();
    gain->add_option("L_b", l_b, "Spreading gain of receiver B")->required();

    auto* plots = app.add_subcommand("emit-plots", "Write per-figure plot data from experiment artifacts");
    std::string plot_dir = "out";
    plots->add_option("--out", plot_dir, "Directory holding manifest.json and artifacts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (gain->parsed()) {
            std::printf("%.6f\n", xlayer::throughput_gain(n_a, l_a, n_b, l_b));
            return kExitOk;
        }
        if (plots->parsed()) {
            for (const auto& p : xlayer::emit_plot_data(plot_dir)) std::cout << p.string() << '\n';
            return kExitOk;
        }

        xlayer::ExperimentConfig config;
        if (run->parsed()) config = build_config(xlayer::ExperimentKind::run, run_f);
        else if (ms->parsed()) config = build_config(xlayer::ExperimentKind::multistart, ms_f);
        else if (fair->parsed()) {
            config = build_config(xlayer::ExperimentKind::fairness, fair_f);
            if (fair->count("--threshold")) config.fairness_threshold = threshold;
        } else if (cap->parsed()) {
            config = build_config(xlayer::ExperimentKind::capacity, cap_f);
            if (cap->count("--target")) config.feasibility_target = target;
            if (cap->count("--min-nodes")) config.capacity_min_nodes = min_nodes;
            if (cap->count("--max-nodes")) config.capacity_max_nodes = max_nodes;
            if (joint) config.capacity_joint = true;
        } else {
            config = build_config(xlayer::ExperimentKind::sweep, sweep_f);
        }

        const auto outcome = xlayer::run_experiment(config);
        std::cout << "wrote " << (config.out_dir / "manifest.json").string() << '\n';
        if (outcome == xlayer::ExperimentOutcome::infeasible) {
            std::cerr << "scenario infeasible (see manifest.json)\n";
            return kExitInfeasible;
        }
        return kExitOk;
    } catch (const xlayer::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const xlayer::MissingArtifact& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
