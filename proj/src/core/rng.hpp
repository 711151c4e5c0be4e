#pragma once

#include <cstdint>

namespace odeident {

/// Counter-based random stream built on the SplitMix64 finalizer.
///
/// Stream derivation: the (seed, stream) pair is hashed once into a base
/// state; the i-th variate is mix64(base + i * GOLDEN). Streams derived
/// from the same seed with distinct stream indices are independent for
/// the purposes of replication experiments, and a (seed, stream, i)
/// triple always yields the same value on every platform.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : base_(derive(seed, stream)) {}

    std::uint64_t next_u64() { return mix64(base_ + (++counter_) * GOLDEN); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  private:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return mix64(mix64(seed + GOLDEN) ^ mix64(stream * 0xD6E8FEB86659FD93ull + 1));
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace odeident
