#pragma once

#include <complex>

namespace spectraldiff {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
/// Rational approximation in the bulk, Laplace continued fraction far out.
std::complex<double> faddeeva_w(std::complex<double> z);

/// erf on the complex plane via the Faddeeva function.  Overflows for
/// |Im z|^2 - |Re z|^2 beyond ~700; the analytic-overlap routines use a
/// pre-scaled combination instead of calling this directly.
std::complex<double> erf_complex(std::complex<double> z);

}  // namespace spectraldiff
