#pragma once

#include <cmath>
#include <random>

namespace spectraldiff::detail {

// Platform-stable draws: the standard distributions are implementation
// defined, so sampling is done directly from the raw 64-bit stream.

inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;  // in (0, 1]
}

inline double normal01(std::mt19937_64& g) {
  const double u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace spectraldiff::detail
