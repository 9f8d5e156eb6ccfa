#pragma once

#include <cstdint>
#include <random>

namespace symflow {

/// Deterministic RNG wrapper. std::mt19937_64 has a pinned algorithm, and the
/// double extraction below avoids std::uniform_real_distribution, whose output
/// is implementation-defined. Same seed -> same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace symflow
