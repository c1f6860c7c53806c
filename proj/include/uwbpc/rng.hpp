#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace uwbpc {

namespace detail {

// SplitMix64 finalizer. Full-period mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: output i of stream (key) is a pure function of
/// (key, i), so independent substreams never share state. Substreams for
/// Monte-Carlo trials are derived from (seed, trial index), which makes
/// results independent of trial execution order.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(detail::mix64(seed) ^ (stream * 0xda942042e4dd58b5ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() { return detail::mix64(key_ ^ counter_++); }

    /// Uniform double in (0, 1].
    double uniform01() {
        return (static_cast<double>(operator()() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        double u = static_cast<double>(operator()() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    /// Standard normal via Box-Muller (deterministic across platforms).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace uwbpc
