#pragma once

#include <cstdint>
#include <random>

#include "qgmt/linalg.hpp"

namespace qgmt {

/// Deterministic random source for suites and generators.
///
/// The generator is std::mt19937_64 seeded directly with the suite seed.
/// Doubles are produced from the top 53 bits of each draw, so a given seed
/// yields the same stream on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    int index(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    Vec vector(int n, double lo, double hi) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace qgmt
