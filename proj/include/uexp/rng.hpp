#pragma once

#include <cmath>
#include <cstdint>

namespace uexp {

/// Counter-based substream: SplitMix64 output over a Weyl sequence whose start is
/// derived from (seed, stream index). Stream r of a run depends only on the seed and
/// r, so replications can be generated in any order or on any thread.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(mix(seed ^ mix(index + kStreamSalt))) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix(state_);
    }

    /// Uniform on the open interval (0, 1): 53 random bits, centred in their cell.
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Inverse-CDF draw from exp(lambda).
    double exponential(double lambda) noexcept { return -std::log(uniform_open()) / lambda; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kStreamSalt = 0x632be59bd9b4e019ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace uexp
