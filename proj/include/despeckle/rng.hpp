#pragma once

#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (seed, counter), so trials and observations can be generated in any
// order, or in parallel, and still reproduce bit-identically.
//
// Gaussian variates come from the inverse normal CDF applied to a 53-bit
// uniform. A port in another language that uses the same stream derivation
// and inverse CDF reproduces the samples exactly; one that does not will
// still match at the statistics level.

namespace despeckle::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the sub-stream `index` under `seed` (trial streams, per-point
/// streams). Independent of how many other sub-streams exist.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index));
}

/// splitmix64 sequence generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in the open interval (0,1); never returns 0 or 1.
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Inverse of the standard normal CDF, accurate to ~1 ulp
/// (Acklam's rational approximation plus one Halley refinement).
double normal_icdf(double p);

/// Standard normal variate number `draw` of sub-stream `index` under `seed`.
double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t draw);

}  // namespace despeckle::rng
