#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace flock {

/// Identifier written into output metadata. Bump the suffix whenever the
/// generator, the seed derivation or the normal transform changes.
inline constexpr const char* kRngAlgorithm =
    "xoshiro256** seeded by splitmix64; streams derived by splitmix64(seed ^ "
    "mix(a) ^ mix(b)); normals by Box-Muller on 53-bit uniforms; v1";

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

/// Child seed for stream (a, b) under `seed`. Distinct (a, b) pairs give
/// statistically independent xoshiro states.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b = 0) {
    return mix64(seed ^ mix64(a + 0x632BE59BD9B4E019ULL) ^
                 mix64(~b + 0x2545F4914F6CDD1DULL));
}

/// xoshiro256** with a cached Box-Muller partner for normal draws.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace flock
