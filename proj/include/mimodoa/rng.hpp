#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "mimodoa/numerics.hpp"

namespace mimodoa {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Two calls with the same arguments
/// always agree, so trials can run in any order on any worker.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Seedable generator with a circular complex Gaussian draw.
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Circular complex Gaussian with E|z|^2 = variance.
    Complex complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mimodoa
