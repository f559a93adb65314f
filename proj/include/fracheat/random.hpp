#pragma once

// Counter-based Gaussian variates. Philox4x32-10 maps a 128-bit counter and
// a 64-bit key to 128 random bits; every lattice cell of every sample has its
// own counter, so any variate can be regenerated in isolation.

#include <array>
#include <cstdint>

namespace fracheat::random {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Standard normal variate for (seed, stream, index): Box-Muller (cosine
/// branch) on two 53-bit uniforms drawn from one Philox block with counter
/// (index, stream) and key seed.
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace fracheat::random
