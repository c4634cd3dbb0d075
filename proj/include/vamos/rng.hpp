#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vamos {

// splitmix64 step; used for seed mixing and for small fixed test streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and up to three
// stream tags (worker index, epoch, target index, ...).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ull * (a + 1);
    (void)splitmix64(s);
    s ^= 0xC2B2AE3D27D4EB4Full * (b + 1);
    (void)splitmix64(s);
    s ^= 0x165667B19E3779F9ull * (c + 1);
    return splitmix64(s);
}

// Deterministic RNG: mt19937_64 (bit-exact per the C++ standard) plus
// hand-rolled draws, so sequences are reproducible across platforms and
// standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling, exactly uniform.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t x = eng_();
            if (x >= threshold) return x % n;
        }
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Box-Muller; two draws per call, no cached state.
    double normal() {
        double u1 = u01();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace vamos
