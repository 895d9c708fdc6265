#include "spectraldiff/faddeeva.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "spectraldiff/errors.hpp"

namespace spectraldiff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;
constexpr int kWeidemanN = 64;

// Polynomial coefficients of the Weideman rational approximation, highest
// power first, computed once from the transform of exp(-t^2) (L^2 + t^2).
const std::array<double, kWeidemanN>& weideman_coefficients() {
  static const std::array<double, kWeidemanN> coeffs = [] {
    const int n = kWeidemanN;
    const int m = 2 * n;
    const int m2 = 2 * m;
    const double big_l = std::sqrt(n / std::sqrt(2.0));

    std::vector<double> f(m2, 0.0);
    for (int k = -m + 1; k <= m - 1; ++k) {
      const double theta = k * kPi / m;
      const double t = big_l * std::tan(0.5 * theta);
      f[k + m] = std::exp(-t * t) * (big_l * big_l + t * t);
    }
    // fftshift then DFT; only the real parts of bins 1..n are needed.
    std::vector<double> g(m2);
    for (int i = 0; i < m2; ++i) g[i] = f[(i + m) % m2];

    std::array<double, kWeidemanN> out{};
    for (int j = 1; j <= n; ++j) {
      double re = 0;
      for (int idx = 0; idx < m2; ++idx) re += g[idx] * std::cos(-2.0 * kPi * j * idx / m2);
      out[n - j] = re / m2;
    }
    return out;
  }();
  return coeffs;
}

std::complex<double> weideman_w(std::complex<double> z) {
  const double big_l = std::sqrt(kWeidemanN / std::sqrt(2.0));
  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> denom = big_l - iz;
  const std::complex<double> big_z = (big_l + iz) / denom;

  std::complex<double> p(0.0, 0.0);
  for (const double c : weideman_coefficients()) p = p * big_z + c;
  return 2.0 * p / (denom * denom) + std::complex<double>(0.0, kInvSqrtPi) / denom;
}

std::complex<double> continued_fraction_w(std::complex<double> z) {
  std::complex<double> r(0.0, 0.0);
  for (int m = 16; m >= 1; --m) r = (0.5 * m) / (z - r);
  return std::complex<double>(0.0, kInvSqrtPi) / (z - r);
}

}  // namespace

std::complex<double> faddeeva_w(std::complex<double> z) {
  if (z.imag() < 0)
    throw ConfigError("faddeeva_w: defined here for the upper half-plane only");
  return std::abs(z) >= 8.0 ? continued_fraction_w(z) : weideman_w(z);
}

std::complex<double> erf_complex(std::complex<double> z) {
  if (z.real() < 0) return -erf_complex(-z);
  if (z.imag() == 0) return std::erf(z.real());
  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> expf = std::exp(-z * z);
  return 1.0 - expf * faddeeva_w(iz);
}

}  // namespace spectraldiff
