#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "xlayer/types.hpp"

namespace xlayer {

enum class InitialPowerMode { equal, random };

/// Full experiment description. Defaults reproduce the reference 55-node,
/// L = 128, 200 m x 200 m matched-filter configuration.
struct Scenario {
    std::size_t n_nodes = 55;
    double area_side = 200.0;           // meters
    std::size_t spreading_gain = 128;   // L
    double target_sir = 12.5;           // gamma*
    double noise_power = 1e-13;         // watts
    double path_loss_exp = 2.0;
    ReceiverKind receiver = ReceiverKind::matched;

    InitialPowerMode initial_power_mode = InitialPowerMode::equal;
    double initial_power = 1e-6;        // P_t, watts
    // Random initial powers are log-uniform on [P_t / spread, P_t * spread].
    double random_power_spread = 10.0;

    std::size_t packet_bits = 80;       // M
    double chip_bandwidth = 1e6;        // W, hertz
    double power_cap = 1.0;             // watts

    double pc_tol = 1e-6;
    std::size_t pc_max_iter = 10000;
    double improvement_tol = 1e-4;
    std::size_t phase_cap = 100;

    std::uint64_t master_seed = 1;

    /// Information bit rate W / L.
    double bit_rate() const { return chip_bandwidth / static_cast<double>(spreading_gain); }

    /// Throws ConfigError naming the first field that violates its invariant.
    void validate() const;
};

std::string to_string(InitialPowerMode mode);

/// Reads a scenario from JSON text. Keys mirror the Scenario field names;
/// missing keys keep their defaults, unknown keys are rejected.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace xlayer
