#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavmec {

std::uint64_t splitmix64(std::uint64_t x);

/// Independent child seed for a named purpose (workload, exploration, ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view purpose, std::uint64_t index = 0);

/// mt19937_64 with distribution transforms written out so streams are
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double mean);

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace uavmec
