#pragma once

#include <cstdint>
#include <limits>

namespace graper {

/// Counter-based 64-bit generator (SplitMix64 finaliser over a Weyl counter).
///
/// Output k of stream (seed, stream) is mix(key + (k + 1) * 0x9E3779B97F4A7C15)
/// with key = mix(seed) ^ mix(~stream). Distinct streams of one seed are
/// therefore independent counters, and sequences are identical on every
/// platform. Normal and uniform variates are derived here rather than via
/// <random> distributions, whose algorithms are implementation-defined.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on the open interval (0, 1), 53 bits.
    double uniform();
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace graper
