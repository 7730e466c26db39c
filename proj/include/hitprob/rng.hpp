#pragma once

#include <array>
#include <cstdint>

namespace hitprob::rng {

// Philox-4x32-10 block cipher (Salmon et al., SC 2011). Counter-based:
// every 128-bit output block is a pure function of (key, counter), so any
// sample index can be generated independently on any thread in any order.
namespace detail {

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kM0, ctr[0], lo0, hi0);
    mul_hi_lo(kM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key64, std::array<std::uint32_t, 4> ctr) {
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64),
                                        static_cast<std::uint32_t>(key64 >> 32)};
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(ctr, key);
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

/// Uniform draw in the open interval (0,1), indexed by (seed, sample index,
/// component, stream). 53-bit mantissa shifted to bin centers so neither
/// endpoint can occur.
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint32_t component,
                        std::uint32_t stream = 0) {
    const auto out = philox4x32(seed, {static_cast<std::uint32_t>(index),
                                       static_cast<std::uint32_t>(index >> 32), component, stream});
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse of the standard normal CDF, Acklam's rational approximation
/// (absolute error of the quantile below 1.2e-9 over (0,1)).
double inverse_normal_cdf(double p);

inline double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint32_t component,
                              std::uint32_t stream = 0) {
    return inverse_normal_cdf(uniform01(seed, index, component, stream));
}

}  // namespace hitprob::rng
