#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hywave/math.hpp"

namespace hywave {

// Deterministic RNG wrapper. All stochastic synthesis goes through this class with an
// explicit integer->double mapping so realizations are bit-identical across platforms
// (std::uniform_real_distribution is not guaranteed to be).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) using the top 53 bits of the engine output.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Phase in [0, 2*pi).
    double phase() { return 2.0 * pi * uniform(); }

    // Standard normal via Box-Muller (deterministic; one value per call, pair cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// splitmix64 step; used to derive independent stream seeds from a base seed plus indices
// (e.g. one stream per power-matrix cell) without correlation between streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(base ^ 0x5bf03635aca63f7bULL) + a * 0x100000001b3ULL + b);
}

} // namespace hywave
