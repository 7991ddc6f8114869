#pragma once

#include <cmath>
#include <cstdint>

namespace tbdphd {

// Stateless mixing step of splitmix64. Advances s and returns the next word.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives a decorrelated substream seed from a master seed and two lane
// indices (typically replication number and a role tag). Used so that every
// replication/filter pair consumes an independent stream: adding or removing
// one consumer never shifts the draws of another.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t lane_a,
                                 std::uint64_t lane_b) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= lane_a + 0x632BE59BD9B4E019ull;
    h ^= splitmix64(s);
    s ^= lane_b + 0x9E6C63D0876A9F6Bull;
    h ^= splitmix64(s);
    return h;
}

// xoshiro256** with hand-rolled samplers. <random> distributions are not
// bit-pinned by the standard; result files must be byte-identical across
// toolchains, so everything downstream of next_u64() is spelled out here.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); rejects exact zeros so logs stay finite.
    double uniform01_open() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call
    // (no cached second variate, keeps replay independent of call sites).
    double normal() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Rayleigh with scale sigma; strictly positive output.
    double rayleigh(double sigma) {
        return sigma * std::sqrt(-2.0 * std::log(uniform01_open()));
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace tbdphd
