#pragma once

/// Deterministic random number generation.
///
/// All Monte Carlo work in this library runs on xoshiro256++ seeded through
/// splitmix64.  Both are fully specified algorithms over uint64, so a (seed,
/// call-tag) pair reproduces the same stream on every platform and under any
/// thread schedule.  std::mt19937 plus the standard distributions would not
/// give that guarantee (distribution algorithms are implementation-defined).

#include <cmath>
#include <cstdint>

namespace sdiv {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
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

    /// Uniform on (0, 1]; never returns 0, so log(u) is always finite.
    double next_unit() { return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one variate per pair of uniforms).
    double next_normal() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Derives an independent stream for one Monte Carlo call.  Streams with the
/// same (seed, tag) are identical; distinct tags decorrelate.
inline Xoshiro256 make_stream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed;
    const std::uint64_t mixed = splitmix64(s) ^ (tag * 0xD1B54A32D192ED03ULL);
    return Xoshiro256(mixed);
}

}  // namespace sdiv
