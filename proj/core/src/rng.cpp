#include <uavmec/rng.hpp>

#include <uavmec/io.hpp>

#include <cmath>

namespace uavmec {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view purpose, std::uint64_t index) {
    return splitmix64(splitmix64(parent ^ fnv1a64(purpose)) + index);
}

double Rng::exponential(double mean) {
    // 1 - U lies in (0, 1], so the log is finite.
    return -mean * std::log1p(-uniform01());
}

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % n;
}

}  // namespace uavmec
