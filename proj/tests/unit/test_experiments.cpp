#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xlayer/csv.hpp"
#include "xlayer/experiments.hpp"
#include "xlayer/scenario.hpp"

using namespace xlayer;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("xlayer_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_same_tree(const fs::path& a, const fs::path& b) {
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto other = b / e.path().filename();
        REQUIRE(fs::exists(other));
        CHECK_MESSAGE(slurp(e.path()) == slurp(other), e.path().filename().string());
        ++files;
    }
    CHECK(files == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})));
}

ExperimentConfig small(ExperimentKind kind, const fs::path& out) {
    ExperimentConfig c;
    c.kind = kind;
    c.scenario.n_nodes = 8;
    c.scenario.master_seed = 1;
    c.trials = 6;
    c.out_dir = out;
    return c;
}

}  // namespace

TEST_CASE("throughput gain") {
    CHECK(throughput_gain(30, 32, 55, 128) == doctest::Approx(30.0 * 128 / (32.0 * 55)).epsilon(1e-15));
    CHECK(std::abs(throughput_gain(30, 32, 55, 128) - 2.18) <= 0.005);
    CHECK(throughput_gain(1, 1, 1, 1) == 1.0);
    CHECK_THROWS(throughput_gain(0, 1, 1, 1));
}

TEST_CASE("scenario configuration") {
    SUBCASE("defaults round trip") {
        const Scenario s;
        const Scenario t = scenario_from_json(scenario_to_json(s));
        CHECK(scenario_to_json(t) == scenario_to_json(s));
        CHECK(t.n_nodes == 55);
        CHECK(t.spreading_gain == 128);
        CHECK(t.bit_rate() == doctest::Approx(1e6 / 128));
    }
    SUBCASE("partial files keep defaults") {
        const Scenario s = scenario_from_json(R"({"n_nodes": 40, "receiver": "lmmse", "initial_power_mode": "random"})");
        CHECK(s.n_nodes == 40);
        CHECK(s.receiver == ReceiverKind::lmmse);
        CHECK(s.initial_power_mode == InitialPowerMode::random);
        CHECK(s.target_sir == 12.5);
    }
    SUBCASE("errors name the key") {
        auto key_of = [](const std::string& text) {
            try {
                scenario_from_json(text);
            } catch (const ConfigError& e) {
                return e.key();
            }
            return std::string("<none>");
        };
        CHECK(key_of(R"({"n_nodes": 1})") == "n_nodes");
        CHECK(key_of(R"({"n_nodez": 10})") == "n_nodez");
        CHECK(key_of(R"({"noise_power": -1})") == "noise_power");
        CHECK(key_of(R"({"receiver": "rake"})") == "receiver");
        CHECK(key_of(R"({"spreading_gain": "big"})") == "spreading_gain");
        CHECK(key_of(R"({"pc_tol": 2.0})") == "pc_tol");
        CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
    }
}

TEST_CASE("csv formatting") {
    CHECK(format_real(1.0) == "1.000000000000000e+00");
    CHECK(format_real(-2.5e-13) == "-2.500000000000000e-13");
    CHECK(format_real(INFINITY) == "inf");
    const auto dir = scratch("csv");
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "t.csv", {"a", "b"});
        w.row({"1", "x"});
        CHECK_THROWS(w.row({"1"}));
    }
    const auto t = read_csv(dir / "t.csv");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 1);
    CHECK(t.rows[0][t.column("b")] == "x");
    CHECK_THROWS(t.column("c"));
}

TEST_CASE("capacity search") {
    Scenario s;
    SUBCASE("vanishing target SIR is feasible up to the ceiling") {
        s.target_sir = 1e-9;
        CapacityOptions o;
        o.trials = 5;
        o.max_nodes = 12;
        const auto r = capacity_search(s, 128, o);
        CHECK(r.hit_ceiling);
        CHECK(r.max_feasible_users == 12);
        CHECK(r.rates.size() == 11);
    }
    SUBCASE("rates never increase and the answer sits at the crossing") {
        CapacityOptions o;
        o.trials = 20;
        o.max_nodes = 60;
        o.threads = 2;
        const auto r = capacity_search(s, 128, o);
        REQUIRE(!r.rates.empty());
        for (std::size_t k = 1; k < r.rates.size(); ++k) CHECK(r.rates[k].rate() <= r.rates[k - 1].rate());
        if (!r.hit_ceiling) CHECK(r.rates.back().rate() < 0.95);
        for (const auto& p : r.rates)
            if (p.n_nodes <= r.max_feasible_users) CHECK(p.rate() >= 0.95);
        CHECK(r.spreading_gain == 128);

        CapacityOptions one = o;
        one.threads = 1;
        const auto again = capacity_search(s, 128, one);
        CHECK(again.max_feasible_users == r.max_feasible_users);
        for (std::size_t k = 0; k < r.rates.size(); ++k) CHECK(again.rates[k].feasible == r.rates[k].feasible);
    }
    CapacityOptions bad;
    bad.feasibility_target = 0.0;
    CHECK_THROWS(capacity_search(s, 128, bad));
}

TEST_CASE("experiments write identical artifacts on rerun") {
    for (auto kind : {ExperimentKind::run, ExperimentKind::multistart, ExperimentKind::fairness,
                      ExperimentKind::capacity, ExperimentKind::sweep}) {
        CAPTURE(to_string(kind));
        const auto a = scratch("rerun_a_" + to_string(kind));
        const auto b = scratch("rerun_b_" + to_string(kind));
        auto ca = small(kind, a);
        if (kind == ExperimentKind::capacity) ca.capacity_max_nodes = 12;
        auto cb = ca;
        cb.out_dir = b;
        cb.threads = 3;
        CHECK(run_experiment(ca) == run_experiment(cb));
        check_same_tree(a, b);

        // rerun from the manifest itself
        auto cm = load_manifest(a / "manifest.json");
        CHECK(cm.kind == kind);
        const auto c = scratch("rerun_c_" + to_string(kind));
        cm.out_dir = c;
        run_experiment(cm);
        check_same_tree(a, c);
    }
}

TEST_CASE("run artifacts and plot data") {
    const auto dir = scratch("plots");
    REQUIRE(run_experiment(small(ExperimentKind::run, dir)) == ExperimentOutcome::ok);
    for (const char* f : {"manifest.json", "topology.csv", "sessions.csv", "codebook.csv", "initial_powers.csv",
                          "pc_trace.csv", "trace.csv", "powers.csv", "routes.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    const auto trace = read_csv(dir / "trace.csv");
    CHECK(trace.header ==
          std::vector<std::string>{"phase_index", "phase_kind", "total_power_W", "energy_per_bit_J"});
    CHECK(trace.rows.front()[1] == "initial");
    const auto routes = read_csv(dir / "routes.csv");
    CHECK(routes.header == std::vector<std::string>{"session", "hop", "node"});
    CHECK(read_csv(dir / "pc_trace.csv").header == std::vector<std::string>{"iteration", "total_power"});
    CHECK(read_csv(dir / "powers.csv").header == std::vector<std::string>{"node", "x", "y", "power_W"});

    const auto written = emit_plot_data(dir);
    CHECK(written.size() == 4);
    const auto tp = read_csv(dir / "plot_total_power.csv");
    CHECK(tp.rows.size() == trace.rows.size());

    fs::remove(dir / "powers.csv");
    CHECK_THROWS_AS(emit_plot_data(dir), MissingArtifact);
    CHECK_THROWS_AS(emit_plot_data(scratch("empty")), MissingArtifact);
}

TEST_CASE("infeasible scenarios are reported in the manifest") {
    const auto dir = scratch("infeasible");
    auto c = small(ExperimentKind::run, dir);
    c.scenario.master_seed = 3;
    CHECK(run_experiment(c) == ExperimentOutcome::infeasible);
    const std::string m = slurp(dir / "manifest.json");
    CHECK(m.find("\"outcome\": \"infeasible\"") != std::string::npos);
    CHECK(m.find("infeasible_init") != std::string::npos);
}

TEST_CASE("fairness experiment lowers or keeps the node power spread") {
    const auto dir = scratch("fairness");
    auto c = small(ExperimentKind::fairness, dir);
    c.trials = 12;
    c.fairness_threshold = 0.5;
    REQUIRE(run_experiment(c) == ExperimentOutcome::ok);
    const auto t = read_csv(dir / "candidates.csv");
    double sum = 0.0;
    for (const auto& r : t.rows) sum += std::stod(r[t.column("weight")]);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(emit_plot_data(dir).size() >= 4);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig c;
    c.trials = 0;
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "trials");
    }
    CHECK(experiment_from_string("sweep") == ExperimentKind::sweep);
    CHECK_THROWS_AS(experiment_from_string("nope"), ConfigError);
}
