#pragma once

#include <cstdint>

namespace srf {

// SplitMix64. Used everywhere randomness is needed so that runs are
// reproducible bit-for-bit across platforms and thread counts; the standard
// <random> distributions are implementation-defined and would break trace
// determinism.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    /// Deterministic child stream, decorrelated from this one.
    Rng fork(std::uint64_t tag) {
        return Rng(next_u64() ^ (tag * 0xD1B54A32D192ED03ull));
    }

private:
    std::uint64_t state_;
};

/// Stateless mix of a base seed and an index into an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    Rng r(base ^ (index * 0xA24BAED4963EE407ull + 0x9FB21C651E98DF25ull));
    return r.next_u64();
}

}  // namespace srf
