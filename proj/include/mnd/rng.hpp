#pragma once

// Deterministic random source.  Every randomized routine in the library takes
// an explicit seed and derives sub-streams through fork(), so identical seeds
// reproduce identical runs bit for bit.  Doubles are produced straight from
// engine bits rather than through std::uniform_real_distribution, whose output
// is implementation-defined.

#include <cstdint>
#include <random>
#include <cmath>
#include <numbers>

#include "core.hpp"

namespace mnd {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double real() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double real(double lo, double hi) { return lo + (hi - lo) * real(); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // Modulo bias is irrelevant at our n << 2^64.
        return bits() % n;
    }

    cplx unit() {
        double a = real(0.0, 2.0 * std::numbers::pi);
        return {std::cos(a), std::sin(a)};
    }

    // Uniform on the unit disk.
    cplx disk() { return std::sqrt(real()) * unit(); }

    // Complex Gaussian-ish box sample, adequate for generic coefficients.
    cplx box() { return {real(-1.0, 1.0), real(-1.0, 1.0)}; }

    // Independent sub-stream; label picks which one.
    Rng fork(std::uint64_t label) const {
        return Rng(splitmix64(seed_ ^ (0x632be59bd9b4e019ull + label * 0x9e3779b97f4a7c15ull)));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace mnd
