#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace qkd {

// Deterministic random stream. Every draw the simulator makes goes through
// this wrapper instead of the std distributions, whose output is
// implementation defined; mt19937_64 itself is fully specified, so runs are
// reproducible bit-for-bit across platforms and compilers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix(seed)) {}

    // Stream for one shard of a sharded run. Shard streams are decorrelated
    // by the splitmix64 finalizer.
    static RngStream for_shard(std::uint64_t seed, std::uint64_t shard) {
        return RngStream(mix(seed) ^ mix(0x9e3779b97f4a7c15ULL * (shard + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, n).
    std::uint32_t uniform_int(std::uint32_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return static_cast<std::uint32_t>(x % n);
    }

    int coin() { return static_cast<int>(next_u64() & 1u); }

private:
    static std::uint64_t mix(std::uint64_t x) {  // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace qkd
