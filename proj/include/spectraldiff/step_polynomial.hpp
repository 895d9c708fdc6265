#pragma once

#include <vector>

#include "spectraldiff/errors.hpp"

namespace spectraldiff {

/// Bounded Chebyshev polynomial approximating the descending unit step:
/// S(x) >= 1 - tail_bound for x <= -threshold_width,
/// |S(x)| <= tail_bound for x >= +threshold_width, and |S| <= 1 on [-1, 1].
struct StepPolynomial {
  int degree = 0;
  std::vector<double> chebyshev_coeffs;  // T_0..T_degree
  double threshold_width = 0.0;
  double tail_bound = 0.0;
};

inline constexpr int kDefaultDegreeCap = 262144;

/// Builds the step polynomial with threshold_width = eps / (2 alpha) and
/// tail_bound = eps_prime / 2, from a Chebyshev expansion of a smoothed
/// error-function step.  The degree is found by doubling until a dense
/// sample check passes, then trimmed by bisection; exceeding the cap is an
/// error suggesting a looser eps_prime or a higher cap.
StepPolynomial build_step_polynomial(double alpha, double eps, double eps_prime,
                                     int degree_cap = kDefaultDegreeCap);

/// Clenshaw evaluation at a scalar point in [-1, 1].
double step_poly_eval(const StepPolynomial& p, double x);

}  // namespace spectraldiff
