#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace spectraldiff::detail {

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a);

/// DCT-II: out[j] = sum_m in[m] cos(pi j (2m+1) / (2M)), j in [0, M).
/// Computed through a same-length FFT; size must be a power of two.
std::vector<double> dct_ii(const std::vector<double>& in);

/// First `count` Chebyshev interpolation coefficients of f on [-1, 1],
/// computed from `samples` Chebyshev points (power of two, > count).
std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int count,
                                           std::size_t samples);

/// Clenshaw evaluation of sum_k coeffs[k] T_k(x).
double chebyshev_eval(const std::vector<double>& coeffs, double x);

}  // namespace spectraldiff::detail
