#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stacey {

// Seed-derivation mixer; decorrelates (seed, stream, t) triples.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic RNG with hand-rolled distributions: std:: distribution
// objects are implementation-defined, the engine alone is portable.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng derived(std::uint64_t seed, std::uint64_t stream, std::uint64_t t = 0) {
        return Rng(splitmix64(splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL) + splitmix64(stream) +
                              0x1000000 * t + t));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one draw per call, the pair sibling is
    // discarded to keep the stream position independent of call parity.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Normal truncated to [-limit, limit] standard deviations, by rejection.
    double truncated_normal(double limit = 6.0) {
        for (;;) {
            double x = normal();
            if (std::fabs(x) <= limit) return x;
        }
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection to avoid modulo bias.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        std::uint64_t l = static_cast<std::uint64_t>(m);
        if (l < n) {
            std::uint64_t thresh = (0ULL - n) % n;
            while (l < thresh) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                l = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace stacey
