#pragma once

#include <cmath>
#include <cstdint>

namespace ohl {

// Identifies a deterministic random stream. Identical (seed, stream_id)
// pairs yield bit-identical sequences; distinct stream_ids are
// statistically independent and may be consumed in parallel.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    // Derive an independent child stream. Used to hand one stream per
    // Monte-Carlo batch so results do not depend on thread count.
    RngStream substream(std::uint64_t child) const {
        // splitmix64-style mixing of the child index into the stream id.
        std::uint64_t z = stream_id + 0x9E3779B97F4A7C15ULL * (child + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return RngStream{seed, z ^ (z >> 31)};
    }
};

// xoshiro256++ generator seeded from (seed, stream_id) via splitmix64.
class Rng {
public:
    explicit Rng(RngStream s) {
        std::uint64_t x = s.seed;
        auto split = [&x]() {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        };
        state_[0] = split();
        x ^= s.stream_id * 0xD1342543DE82EF95ULL + 1;
        state_[1] = split();
        state_[2] = split();
        state_[3] = split();
        // All-zero state is unreachable with splitmix64 seeding in practice,
        // but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1], 53-bit resolution. Never returns 0 so it is safe
    // inside log().
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    bool bit() { return (next_u64() >> 63) != 0; }

    // Standard normal pair via Box-Muller.
    void normal_pair(double& z0, double& z1) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double z0, z1;
        normal_pair(z0, z1);
        spare_ = z1;
        has_spare_ = true;
        return z0;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ohl
