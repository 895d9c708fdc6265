#include "spectraldiff/detail/chebyshev_transform.hpp"

#include <cmath>

#include "spectraldiff/errors.hpp"

namespace spectraldiff::detail {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft_inplace: size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> dct_ii(const std::vector<double>& in) {
  const std::size_t m = in.size();
  if (m == 0 || (m & (m - 1)) != 0) throw ConfigError("dct_ii: size must be a power of two");

  // Even/odd reshuffle, one FFT of the same length, then a phase twist.
  std::vector<std::complex<double>> v(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) v[i] = in[2 * i];
  for (std::size_t i = 0; i < m / 2; ++i) v[m - 1 - i] = in[2 * i + 1];
  fft_inplace(v);

  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double ang = -kPi * static_cast<double>(j) / (2.0 * static_cast<double>(m));
    out[j] = (std::complex<double>(std::cos(ang), std::sin(ang)) * v[j]).real();
  }
  return out;
}

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int count,
                                           std::size_t samples) {
  if (count <= 0) return {};
  if (samples < static_cast<std::size_t>(count))
    throw ConfigError("chebyshev_coefficients: need more samples than coefficients");

  std::vector<double> g(samples);
  for (std::size_t mIdx = 0; mIdx < samples; ++mIdx) {
    const double theta = kPi * (static_cast<double>(mIdx) + 0.5) / static_cast<double>(samples);
    g[mIdx] = f(std::cos(theta));
  }
  std::vector<double> dct = dct_ii(g);
  std::vector<double> coeffs(count);
  const double scale = 2.0 / static_cast<double>(samples);
  for (int j = 0; j < count; ++j) coeffs[j] = scale * dct[j];
  coeffs[0] *= 0.5;
  return coeffs;
}

double chebyshev_eval(const std::vector<double>& coeffs, double x) {
  double b1 = 0, b2 = 0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    const double b0 = coeffs[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? 0.0 : coeffs[0] + x * b1 - b2;
}

}  // namespace spectraldiff::detail
