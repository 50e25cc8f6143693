#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace divergent {

/// Counter-based 64-bit generator. Output i is a pure function of (key, i),
/// so a run is reproducible from its seed alone and independent streams can
/// be derived without sharing state.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Independent stream keyed by (this key, stream id). Does not advance *this.
    Rng derive(std::uint64_t stream) const { return Rng(mix(key_ ^ mix(stream + 0xbb67ae8584caa73bULL))); }

    std::uint64_t counter() const { return counter_; }

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(*this); }

    /// Uniform integer in the closed range [lo, hi].
    template <typename Int>
    Int uniform_int(Int lo, Int hi)
    {
        return std::uniform_int_distribution<Int>(lo, hi)(*this);
    }

    bool bernoulli(double p) { return p > 0.0 && (p >= 1.0 || uniform() < p); }

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace divergent
