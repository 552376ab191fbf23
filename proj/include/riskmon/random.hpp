#pragma once
// Counter-based deterministic random streams.
//
// Generator: SplitMix64 (Steele, Lea & Flood 2014) evaluated in counter mode:
// the i-th output is finalize(stream_seed + (i+1) * 0x9E3779B97F4A7C15). The
// same (seed, stream, counter) triple yields the same value on any platform,
// and streams can be split without coordination. Gaussian variates go through
// the AS 241 inverse CDF, so fixtures reproduce across languages that follow
// the same recipe.

#include <cstdint>
#include <stdexcept>

#include "riskmon/math.hpp"

namespace riskmon {

namespace detail {
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(detail::splitmix64_finalize(
              seed ^ detail::splitmix64_finalize(stream + 0x9E3779B97F4A7C15ull))),
          counter_(0) {}

    std::uint64_t next_u64() {
        counter_ += 1;
        return detail::splitmix64_finalize(seed_ + counter_ * 0x9E3779B97F4A7C15ull);
    }

    // Uniform on the open interval (0,1): 53 mantissa bits, half-ulp offset.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile(next_unit()); }

    bool next_bernoulli(double p) {
        if (p < 0.0 || p > 1.0) throw std::domain_error("next_bernoulli: p outside [0,1]");
        return next_unit() < p;
    }

    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace riskmon
