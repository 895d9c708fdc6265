#include "spectraldiff/step_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectraldiff/detail/chebyshev_transform.hpp"

namespace spectraldiff {

namespace {

double erfc_inv(double p) {
  if (p <= 0 || p >= 2) throw ConfigError("erfc_inv: argument outside (0, 2)");
  double t = (p < 0.5) ? std::sqrt(std::log(1.0 / p)) : 0.5;
  if (p > 1.5) t = -std::sqrt(std::log(1.0 / (2.0 - p)));
  for (int it = 0; it < 60; ++it) {
    const double f = std::erfc(t) - p;
    const double df = -2.0 / std::sqrt(3.141592653589793238462643383279) * std::exp(-t * t);
    const double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Sample points: plateaus clustered toward the threshold plus a uniform
// spread across [-1, 1] for the boundedness check.
struct CheckPoints {
  std::vector<double> xs;
  std::size_t n_plateau = 0;  // xs[0..n) right plateau, xs[n..2n) left plateau
};

CheckPoints make_check_points(double w) {
  CheckPoints pts;
  const int n_plateau = 400;
  pts.n_plateau = n_plateau + 1;
  for (int i = 0; i <= n_plateau; ++i) {
    const double u = static_cast<double>(i) / n_plateau;
    pts.xs.push_back(w + (1.0 - w) * u * u * u);
  }
  for (std::size_t i = 0; i < pts.n_plateau; ++i) pts.xs.push_back(-pts.xs[i]);
  const int n_all = 2000;
  for (int i = 0; i <= n_all; ++i)
    pts.xs.push_back(-1.0 + 2.0 * static_cast<double>(i) / n_all);
  return pts;
}

std::vector<double> candidate_coefficients(double sharpness, int degree) {
  auto target = [sharpness](double x) { return 0.5 * std::erfc(sharpness * x); };
  const std::size_t samples = next_pow2(std::max<std::size_t>(4 * (degree + 1), 256));
  return detail::chebyshev_coefficients(target, degree + 1, samples);
}

// One evaluation pass per point; normalization is a linear rescale of the
// stored values, so no second pass is needed.
bool normalize_and_check(std::vector<double>& coeffs, const CheckPoints& pts, double tail) {
  std::vector<double> vals(pts.xs.size());
  double max_abs = 0;
  for (std::size_t i = 0; i < pts.xs.size(); ++i) {
    vals[i] = detail::chebyshev_eval(coeffs, pts.xs[i]);
    max_abs = std::max(max_abs, std::abs(vals[i]));
  }
  if (max_abs > 1.0) {
    const double s = (1.0 - 1e-12) / max_abs;
    for (double& c : coeffs) c *= s;
    for (double& v : vals) v *= s;
  }
  for (std::size_t i = 0; i < pts.n_plateau; ++i)
    if (std::abs(vals[i]) > tail) return false;  // right plateau
  for (std::size_t i = pts.n_plateau; i < 2 * pts.n_plateau; ++i)
    if (vals[i] < 1.0 - tail) return false;  // left plateau
  return true;
}

}  // namespace

StepPolynomial build_step_polynomial(double alpha, double eps, double eps_prime, int degree_cap) {
  if (!(alpha > 0) || !(eps > 0)) throw ConfigError("build_step_polynomial: need alpha, eps > 0");
  if (!(eps_prime > 0) || eps_prime >= 2)
    throw ConfigError("build_step_polynomial: eps_prime outside (0, 2)");
  const double w = eps / (2.0 * alpha);
  if (w >= 1.0) throw ConfigError("build_step_polynomial: eps/(2 alpha) must be < 1");
  const double tail = eps_prime / 2.0;

  const double sharpness = erfc_inv(0.9 * tail) / w;
  const CheckPoints pts = make_check_points(w);

  auto try_degree = [&](int degree, std::vector<double>* out) {
    std::vector<double> coeffs = candidate_coefficients(sharpness, degree);
    if (!normalize_and_check(coeffs, pts, tail)) return false;
    if (out) *out = std::move(coeffs);
    return true;
  };

  int hi = 32;
  std::vector<double> accepted;
  while (!try_degree(hi, &accepted)) {
    if (hi >= degree_cap)
      throw EstimatorError("build_step_polynomial: tolerance unattainable at the degree cap (" +
                           std::to_string(degree_cap) + "); lower eps_prime or raise the cap");
    hi = std::min(hi * 2, degree_cap);
  }

  int lo = hi / 2;
  while (hi - lo > std::max(8, hi / 64)) {
    const int mid = lo + (hi - lo) / 2;
    std::vector<double> coeffs;
    if (try_degree(mid, &coeffs)) {
      hi = mid;
      accepted = std::move(coeffs);
    } else {
      lo = mid;
    }
  }

  StepPolynomial poly;
  poly.degree = hi;
  poly.chebyshev_coeffs = std::move(accepted);
  poly.threshold_width = w;
  poly.tail_bound = tail;
  return poly;
}

double step_poly_eval(const StepPolynomial& p, double x) {
  return detail::chebyshev_eval(p.chebyshev_coeffs, x);
}

}  // namespace spectraldiff
