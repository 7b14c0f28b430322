#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xlayer/scenario.hpp"

namespace xlayer {

enum class ExperimentKind { run, multistart, fairness, capacity, sweep };
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& text);

struct ExperimentConfig {
    Scenario scenario;
    ExperimentKind kind = ExperimentKind::run;
    std::size_t trials = 100;
    std::filesystem::path out_dir = "out";
    std::optional<std::size_t> phase_budget;
    double fairness_threshold = 0.10;
    double feasibility_target = 0.95;
    std::size_t capacity_min_nodes = 2;
    std::size_t capacity_max_nodes = 200;
    bool capacity_joint = false;
    unsigned threads = 1;  // does not affect any output byte

    void validate() const;
};

enum class ExperimentOutcome { ok, infeasible };

/// Executes the experiment and writes its CSV/JSON artifacts plus
/// manifest.json into config.out_dir (created if needed).
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Reads back a manifest written by run_experiment. The output directory is
/// not part of the manifest and is left at its default.
ExperimentConfig load_manifest(const std::filesystem::path& path);

/// True when the JSON file at `path` is a manifest rather than a plain
/// scenario file.
bool is_manifest(const std::filesystem::path& path);

struct CapacityPoint {
    std::size_t n_nodes = 0;
    std::size_t feasible = 0;
    std::size_t trials = 0;
    double rate() const { return trials ? static_cast<double>(feasible) / static_cast<double>(trials) : 0.0; }
};

struct CapacityResult {
    std::size_t spreading_gain = 0;
    std::size_t max_feasible_users = 0;  // 0 when even the smallest size fails
    std::vector<CapacityPoint> rates;    // one per scanned size, increasing
    bool hit_ceiling = false;            // scan stopped at max_nodes while still feasible
};

struct CapacityOptions {
    std::size_t trials = 100;
    double feasibility_target = 0.95;
    std::uint64_t seed = 1;
    std::size_t min_nodes = 2;
    std::size_t max_nodes = 200;
    bool joint = false;
    unsigned threads = 1;
};

/// Linear scan over network size. Trial t draws its nodes from one stream, so
/// the N-node topology is the first N nodes of the (N+1)-node one. A trial
/// counts as feasible at N only if power control converged for every size up
/// to N, which makes the rates non-increasing in N. The scan stops at the
/// first size whose rate falls below the target.
CapacityResult capacity_search(const Scenario& scenario_template, std::size_t spreading_gain,
                               const CapacityOptions& options);

/// (n_a * L_b) / (L_a * n_b).
double throughput_gain(std::size_t n_a, std::size_t L_a, std::size_t n_b, std::size_t L_b);

class MissingArtifact : public std::runtime_error {
public:
    explicit MissingArtifact(const std::filesystem::path& path)
        : std::runtime_error("missing artifact: " + path.string()), path_(path) {}
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Turns the artifacts listed in `dir`/manifest.json into per-figure files
/// (plot_*.csv). Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& dir);

}  // namespace xlayer
