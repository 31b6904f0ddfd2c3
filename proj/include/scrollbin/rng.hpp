#pragma once

#include <cstdint>
#include <random>

namespace scrollbin {

/// The single seeded source of randomness threaded through training.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 42) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal(double mean, double stddev) { return std::normal_distribution<double>(mean, stddev)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace scrollbin
