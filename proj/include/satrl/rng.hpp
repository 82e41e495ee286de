#pragma once

// Deterministic random streams.
//
// One master seed fans out into independent named streams ("gyro", "torque",
// "init", ...): each stream is an xoshiro256++ generator whose state is
// derived from splitmix64(master ^ fnv1a(name) ^ index). Draw order inside a
// stream never depends on what other streams do, so adding a fault type or a
// logging call cannot perturb unrelated randomness. Gaussian variates come
// from Box-Muller on 53-bit uniforms rather than std::normal_distribution,
// which is implementation-defined and would break cross-platform replay.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace satrl {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Derived stream: deterministic function of (seed, name, index) only.
    static Rng stream(uint64_t master_seed, std::string_view name, uint64_t index = 0) {
        uint64_t sm = master_seed;
        uint64_t mixed = splitmix64(sm) ^ fnv1a64(name) ^ (0x9E3779B97F4A7C15ull * (index + 1));
        return Rng(mixed);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n) by rejection; exact, no modulo bias.
    uint64_t uniform_below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller; second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPiInternal * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPiInternal * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static constexpr double kPiInternal = 3.14159265358979323846;
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace satrl
