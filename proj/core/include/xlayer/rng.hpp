#pragma once

#include <cstdint>
#include <random>

namespace xlayer {

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
    topology = 1,
    sessions = 2,
    codebook = 3,
    initial_power = 4,
    trial = 5,
    capacity = 6,
    sweep = 7,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed splitting rule: splitmix64(master ^ splitmix64((stream << 32) ^ index)).
/// Every generator in the library is seeded through this function.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept;

/// mt19937_64 plus distribution code that does not depend on the standard
/// library's (implementation-defined) distribution classes, so draws are
/// bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, bound), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t bound);

    /// exp(uniform(log lo, log hi)).
    double log_uniform(double lo, double hi);

    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace xlayer
