#include "xlayer/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "xlayer/cross_layer.hpp"
#include "xlayer/csv.hpp"
#include "xlayer/fairness.hpp"
#include "xlayer/rng.hpp"

#ifndef XLAYER_VERSION
#define XLAYER_VERSION "dev"
#endif

namespace xlayer {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::run: return "run";
        case ExperimentKind::multistart: return "multistart";
        case ExperimentKind::fairness: return "fairness";
        case ExperimentKind::capacity: return "capacity";
        case ExperimentKind::sweep: return "sweep";
    }
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& text) {
    for (auto k : {ExperimentKind::run, ExperimentKind::multistart, ExperimentKind::fairness,
                   ExperimentKind::capacity, ExperimentKind::sweep})
        if (to_string(k) == text) return k;
    throw ConfigError("kind", "unknown experiment '" + text + "'");
}

void ExperimentConfig::validate() const {
    scenario.validate();
    if (trials < 1) throw ConfigError("trials", "must be at least 1");
    if (phase_budget && *phase_budget < 1) throw ConfigError("phase_budget", "must be at least 1");
    if (fairness_threshold < 0.0) throw ConfigError("fairness_threshold", "must be non-negative");
    if (!(feasibility_target > 0.0 && feasibility_target <= 1.0))
        throw ConfigError("feasibility_target", "must be in (0, 1]");
    if (capacity_min_nodes < 2) throw ConfigError("capacity_min_nodes", "must be at least 2");
    if (capacity_max_nodes < capacity_min_nodes) throw ConfigError("capacity_max_nodes", "must be >= capacity_min_nodes");
}

double throughput_gain(std::size_t n_a, std::size_t L_a, std::size_t n_b, std::size_t L_b) {
    if (n_a < 1 || L_a < 1 || n_b < 1 || L_b < 1) throw std::invalid_argument("throughput_gain: inputs must be >= 1");
    return (static_cast<double>(n_a) * static_cast<double>(L_b)) /
           (static_cast<double>(L_a) * static_cast<double>(n_b));
}

namespace {

bool feasible_at(const Scenario& s, std::uint64_t seed, bool joint) {
    const Network net = make_network(s, seed);
    const PowerVector p0 = initial_powers(s, seed);
    if (joint) return joint_optimize(s, net, p0).status == JointStatus::local_min;
    const RouteSet routes = initial_routes(s, net, p0);
    const auto phy = PhyParams::from(s);
    const auto opts = PcOptions::from(s);
    if (s.receiver == ReceiverKind::lmmse)
        return pc_mud_iterate(p0, routes.active, net.gains, net.codebook, phy, opts).pc.converged();
    return pc_iterate(p0, routes.active, net.gains, phy, opts).converged();
}

}  // namespace

CapacityResult capacity_search(const Scenario& scenario_template, std::size_t spreading_gain,
                               const CapacityOptions& options) {
    if (options.trials < 1) throw std::invalid_argument("capacity_search: trials must be >= 1");
    if (!(options.feasibility_target > 0.0 && options.feasibility_target <= 1.0))
        throw std::invalid_argument("capacity_search: target must be in (0, 1]");
    if (options.min_nodes < 2 || options.max_nodes < options.min_nodes)
        throw std::invalid_argument("capacity_search: bad node range");

    CapacityResult result;
    result.spreading_gain = spreading_gain;
    std::vector<char> alive(options.trials, 1);
    std::vector<std::uint64_t> seeds(options.trials);
    for (std::size_t t = 0; t < options.trials; ++t) seeds[t] = derive_seed(options.seed, Stream::capacity, t);

    for (std::size_t n = options.min_nodes; n <= options.max_nodes; ++n) {
        Scenario s = scenario_template;
        s.n_nodes = n;
        s.spreading_gain = spreading_gain;
        detail::parallel_for(options.trials, options.threads, [&](std::size_t t) {
            if (alive[t] && !feasible_at(s, seeds[t], options.joint)) alive[t] = 0;
        });
        CapacityPoint point{n, static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1)), options.trials};
        result.rates.push_back(point);
        if (point.rate() < options.feasibility_target) return result;
        result.max_feasible_users = n;
    }
    result.hit_ceiling = true;
    return result;
}

namespace {

json experiment_json(const ExperimentConfig& c) {
    json e;
    e["kind"] = to_string(c.kind);
    e["trials"] = c.trials;
    e["phase_budget"] = c.phase_budget ? json(*c.phase_budget) : json(nullptr);
    e["fairness_threshold"] = c.fairness_threshold;
    e["feasibility_target"] = c.feasibility_target;
    e["capacity_min_nodes"] = c.capacity_min_nodes;
    e["capacity_max_nodes"] = c.capacity_max_nodes;
    e["capacity_joint"] = c.capacity_joint;
    return e;
}

class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}
    fs::path add(const std::string& name) {
        names_.push_back(name);
        return dir_ / name;
    }
    const std::vector<std::string>& names() const { return names_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void write_network(Artifacts& a, const Network& net) {
    write_topology_csv(a.add("topology.csv"), net.topology);
    write_sessions_csv(a.add("sessions.csv"), net.sessions);
    write_codebook_csv(a.add("codebook.csv"), net.codebook);
}

void write_trials(Artifacts& a, const MultiStartResult& ms) {
    CsvWriter w(a.add("trials.csv"), {"trial", "seed", "status", "initial_total_power_W", "initial_energy_per_bit_J",
                                      "total_power_W", "energy_per_bit_J", "phases"});
    for (const auto& t : ms.trials)
        w.row({std::to_string(t.trial), std::to_string(t.seed), to_string(t.status), format_real(t.initial_total_power),
               format_real(t.initial_energy_per_bit), format_real(t.total_power), format_real(t.energy_per_bit),
               std::to_string(t.phases)});
}

void write_solution(Artifacts& a, const Network& net, const JointSolution& sol) {
    write_trace_csv(a.add("trace.csv"), sol.trace);
    write_powers_csv(a.add("powers.csv"), net.topology, sol.powers);
    write_routes_csv(a.add("routes.csv"), sol.routes);
}

ExperimentOutcome do_run(const ExperimentConfig& c, Artifacts& a, json& summary) {
    const Scenario& s = c.scenario;
    const Network net = make_network(s, s.master_seed);
    write_network(a, net);
    const PowerVector p0 = initial_powers(s, s.master_seed);
    write_powers_csv(a.add("initial_powers.csv"), net.topology, p0);
    JointOptions opts;
    opts.phase_budget = c.phase_budget;
    const JointSolution sol = joint_optimize(s, net, p0, opts);
    write_pc_trace_csv(a.add("pc_trace.csv"), sol.initial_pc);
    write_solution(a, net, sol);
    summary["status"] = to_string(sol.status);
    summary["phases"] = sol.phases;
    summary["initial_total_power_W"] = sol.trace.front().total_power;
    summary["initial_energy_per_bit_J"] = sol.trace.front().energy_per_bit;
    summary["final_total_power_W"] = sol.trace.back().total_power;
    summary["final_energy_per_bit_J"] = sol.trace.back().energy_per_bit;
    summary["topology_regenerations"] = net.regenerations;
    return sol.status == JointStatus::local_min ? ExperimentOutcome::ok : ExperimentOutcome::infeasible;
}

MultiStartResult do_multistart(const ExperimentConfig& c, const Network& net, Artifacts& a, json& summary) {
    const Scenario& s = c.scenario;
    JointOptions opts;
    opts.phase_budget = c.phase_budget;
    MultiStartResult ms = multi_start(s, net, c.trials, s.master_seed, opts, c.threads);
    write_trials(a, ms);
    const auto initial = initial_state_metrics(s, net, PowerVector(s.n_nodes, s.initial_power));
    summary["equal_init_total_power_W"] = initial.total_power;
    summary["equal_init_energy_per_bit_J"] = initial.energy_per_bit;
    summary["feasible_trials"] = std::count_if(ms.trials.begin(), ms.trials.end(),
                                               [](const auto& t) { return t.status == JointStatus::local_min; });
    if (ms.best) {
        write_solution(a, net, *ms.best);
        const auto m = network_metrics(*ms.best, s, net);
        summary["best_trial"] = ms.best_trial;
        summary["best_total_power_W"] = m.total_power;
        summary["best_energy_per_bit_J"] = m.energy_per_bit;
    }
    return ms;
}

ExperimentOutcome do_fairness(const ExperimentConfig& c, Artifacts& a, json& summary) {
    const Scenario& s = c.scenario;
    const Network net = make_network(s, s.master_seed);
    write_network(a, net);
    const MultiStartResult ms = do_multistart(c, net, a, summary);
    if (!ms.best) return ExperimentOutcome::infeasible;

    const RouteCandidateSet set = select_candidates(ms.trials, c.fairness_threshold);
    const MixtureWeights w = optimize_mixture(set);
    const PowerVector after = effective_node_powers(set, w);
    const PowerVector& before = ms.best->powers;

    CsvWriter cw(a.add("candidates.csv"), {"candidate", "trial", "total_power_W", "weight"});
    for (std::size_t k = 0; k < set.size(); ++k)
        cw.row({std::to_string(k), std::to_string(set.candidates[k].trial),
                format_real(set.candidates[k].total_power), format_real(w.w[k])});
    CsvWriter fw(a.add("fairness_powers.csv"), {"node", "power_before_W", "power_after_W"});
    for (std::size_t i = 0; i < after.size(); ++i)
        fw.row({std::to_string(i), format_real(before[i]), format_real(after[i])});

    summary["candidates"] = set.size();
    summary["average_power_W"] = set.average_power;
    summary["objective_best_only"] = mixture_objective(set, [&] {
        std::vector<double> one(set.size(), 0.0);
        for (std::size_t k = 0; k < set.size(); ++k)
            if (set.candidates[k].trial == ms.best_trial) one[k] = 1.0;
        return one;
    }());
    summary["objective_mixture"] = mixture_objective(set, w.w);
    summary["variance_before_W2"] = node_power_variance(before);
    summary["variance_after_W2"] = node_power_variance(after);
    return ExperimentOutcome::ok;
}

ExperimentOutcome do_capacity(const ExperimentConfig& c, Artifacts& a, json& summary) {
    CapacityOptions o;
    o.trials = c.trials;
    o.feasibility_target = c.feasibility_target;
    o.seed = c.scenario.master_seed;
    o.min_nodes = c.capacity_min_nodes;
    o.max_nodes = c.capacity_max_nodes;
    o.joint = c.capacity_joint;
    o.threads = c.threads;
    const CapacityResult r = capacity_search(c.scenario, c.scenario.spreading_gain, o);
    CsvWriter w(a.add("capacity.csv"), {"n_nodes", "feasible", "trials", "rate"});
    for (const auto& p : r.rates)
        w.row({std::to_string(p.n_nodes), std::to_string(p.feasible), std::to_string(p.trials), format_real(p.rate())});
    summary["spreading_gain"] = r.spreading_gain;
    summary["max_feasible_users"] = r.max_feasible_users;
    summary["hit_ceiling"] = r.hit_ceiling;
    return ExperimentOutcome::ok;
}

ExperimentOutcome do_sweep(const ExperimentConfig& c, Artifacts& a, json& summary) {
    const Scenario& s = c.scenario;
    struct Row {
        std::uint64_t seed = 0;
        JointSolution sol;
    };
    std::vector<Row> rows(c.trials);
    JointOptions opts;
    opts.phase_budget = c.phase_budget;
    detail::parallel_for(c.trials, c.threads, [&](std::size_t k) {
        rows[k].seed = derive_seed(s.master_seed, Stream::sweep, k);
        const Network net = make_network(s, rows[k].seed);
        rows[k].sol = joint_optimize(s, net, initial_powers(s, rows[k].seed), opts);
    });
    CsvWriter w(a.add("sweep.csv"), {"index", "seed", "status", "phases", "initial_total_power_W", "final_total_power_W",
                                     "initial_energy_per_bit_J", "final_energy_per_bit_J"});
    std::size_t feasible = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& sol = rows[k].sol;
        if (sol.status == JointStatus::local_min) ++feasible;
        w.row({std::to_string(k), std::to_string(rows[k].seed), to_string(sol.status), std::to_string(sol.phases),
               format_real(sol.trace.front().total_power), format_real(sol.trace.back().total_power),
               format_real(sol.trace.front().energy_per_bit), format_real(sol.trace.back().energy_per_bit)});
    }
    summary["feasible"] = feasible;
    return feasible > 0 ? ExperimentOutcome::ok : ExperimentOutcome::infeasible;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw ConfigError("--out", "cannot create '" + config.out_dir.string() + "': " + ec.message());

    Artifacts artifacts(config.out_dir);
    json summary = json::object();
    ExperimentOutcome outcome = ExperimentOutcome::ok;
    switch (config.kind) {
        case ExperimentKind::run: outcome = do_run(config, artifacts, summary); break;
        case ExperimentKind::multistart: {
            const Network net = make_network(config.scenario, config.scenario.master_seed);
            write_network(artifacts, net);
            outcome = do_multistart(config, net, artifacts, summary).best ? ExperimentOutcome::ok
                                                                          : ExperimentOutcome::infeasible;
            break;
        }
        case ExperimentKind::fairness: outcome = do_fairness(config, artifacts, summary); break;
        case ExperimentKind::capacity: outcome = do_capacity(config, artifacts, summary); break;
        case ExperimentKind::sweep: outcome = do_sweep(config, artifacts, summary); break;
    }

    json manifest;
    manifest["tool"] = "xlayer";
    manifest["version"] = XLAYER_VERSION;
    manifest["experiment"] = experiment_json(config);
    manifest["scenario"] = json::parse(scenario_to_json(config.scenario));
    manifest["seeds"] = {{"master_seed", config.scenario.master_seed},
                         {"seed_rule", "splitmix64(master ^ splitmix64((stream << 32) ^ index))"}};
    manifest["outcome"] = outcome == ExperimentOutcome::ok ? "ok" : "infeasible";
    manifest["summary"] = summary;
    manifest["artifacts"] = artifacts.names();
    write_json(config.out_dir / "manifest.json", manifest);
    return outcome;
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

bool is_manifest(const fs::path& path) {
    const json j = read_json(path);
    return j.is_object() && j.contains("scenario") && j.contains("experiment");
}

ExperimentConfig load_manifest(const fs::path& path) {
    const json j = read_json(path);
    if (!j.is_object() || !j.contains("scenario") || !j.contains("experiment"))
        throw ConfigError("<file>", "not a manifest: '" + path.string() + "'");
    ExperimentConfig c;
    c.scenario = scenario_from_json(j.at("scenario").dump());
    const json& e = j.at("experiment");
    try {
        c.kind = experiment_from_string(e.at("kind").get<std::string>());
        c.trials = e.at("trials").get<std::size_t>();
        if (!e.at("phase_budget").is_null()) c.phase_budget = e.at("phase_budget").get<std::size_t>();
        c.fairness_threshold = e.at("fairness_threshold").get<double>();
        c.feasibility_target = e.at("feasibility_target").get<double>();
        c.capacity_min_nodes = e.at("capacity_min_nodes").get<std::size_t>();
        c.capacity_max_nodes = e.at("capacity_max_nodes").get<std::size_t>();
        c.capacity_joint = e.at("capacity_joint").get<bool>();
    } catch (const json::exception& ex) {
        throw ConfigError("experiment", std::string("bad manifest field: ") + ex.what());
    }
    c.validate();
    return c;
}

namespace {

void project_columns(const fs::path& in, const fs::path& out, const std::vector<std::string>& columns,
                     const std::vector<std::string>& renamed) {
    const CsvTable t = read_csv(in);
    std::vector<std::size_t> idx;
    for (const auto& c : columns) idx.push_back(t.column(c));
    CsvWriter w(out, renamed);
    for (const auto& r : t.rows) {
        std::vector<std::string> cells;
        for (auto i : idx) cells.push_back(r.at(i));
        w.row(cells);
    }
}

}  // namespace

std::vector<fs::path> emit_plot_data(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw MissingArtifact(manifest_path);
    const json manifest = read_json(manifest_path);
    std::vector<std::string> listed = manifest.at("artifacts").get<std::vector<std::string>>();
    auto has = [&](const std::string& name) {
        if (std::find(listed.begin(), listed.end(), name) == listed.end()) return false;
        if (!fs::exists(dir / name)) throw MissingArtifact(dir / name);
        return true;
    };

    std::vector<fs::path> written;
    auto emit = [&](const std::string& name) {
        written.push_back(dir / name);
        return dir / name;
    };
    if (has("trace.csv")) {
        project_columns(dir / "trace.csv", emit("plot_total_power.csv"), {"phase_index", "total_power_W"},
                        {"phase", "total_power_W"});
        project_columns(dir / "trace.csv", emit("plot_energy.csv"), {"phase_index", "energy_per_bit_J"},
                        {"phase", "energy_per_bit_J"});
    }
    if (has("powers.csv"))
        project_columns(dir / "powers.csv", emit("plot_node_powers.csv"), {"node", "power_W"}, {"node", "power_W"});
    if (has("initial_powers.csv"))
        project_columns(dir / "initial_powers.csv", emit("plot_initial_node_powers.csv"), {"node", "power_W"},
                        {"node", "power_W"});
    if (has("trials.csv")) {
        const CsvTable t = read_csv(dir / "trials.csv");
        const auto trial = t.column("trial"), status = t.column("status"), total = t.column("total_power_W");
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.rows[r].at(status) == "local_min") order.emplace_back(std::stod(t.rows[r].at(total)), r);
        std::sort(order.begin(), order.end());
        CsvWriter w(emit("plot_trial_spread.csv"), {"rank", "trial", "total_power_W"});
        for (std::size_t k = 0; k < order.size(); ++k)
            w.row({std::to_string(k), t.rows[order[k].second].at(trial), t.rows[order[k].second].at(total)});
    }
    if (has("fairness_powers.csv"))
        project_columns(dir / "fairness_powers.csv", emit("plot_fairness.csv"),
                        {"node", "power_before_W", "power_after_W"}, {"node", "power_before_W", "power_after_W"});
    if (has("capacity.csv"))
        project_columns(dir / "capacity.csv", emit("plot_capacity.csv"), {"n_nodes", "rate"}, {"n_nodes", "rate"});
    return written;
}

}  // namespace xlayer
