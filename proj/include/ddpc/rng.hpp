#pragma once

// Deterministic, portable random number generation. All randomness in the
// library flows through Rng so that a fixed seed gives bit-identical
// results across runs and platforms.

#include <cmath>
#include <cstdint>
#include <random>

namespace ddpc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

/// mt19937_64 with hand-rolled uniform/normal transforms. The standard
/// distributions are not bit-portable across library implementations,
/// so we avoid them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    /// Uniform double in (0, 1].
    double uniform01() {
        // 53 random mantissa bits, shifted into (0,1].
        const std::uint64_t bits = eng_() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ddpc
