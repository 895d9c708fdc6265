#include "spectraldiff/inflation.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "spectraldiff/faddeeva.hpp"

namespace spectraldiff::inflation {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kReduction = 24.0 * kPi * kPi;  // V / (24 pi^2 mpl^4)
}  // namespace

PotentialModel make_quantum_well(double v0, double phi_f, double mpl) {
  if (!(v0 > 0) || !(phi_f > 0)) throw ConfigError("quantum well: need v0, phi_f > 0");
  PotentialModel m;
  m.kind = PotentialKind::QuantumWell;
  m.v0 = v0;
  m.phi_f = phi_f;
  m.mpl = mpl;
  return m;
}

PotentialModel make_inflection_well(double v0, double phi_f, double mpl) {
  PotentialModel m = make_quantum_well(v0, phi_f, mpl);
  m.kind = PotentialKind::InflectionWell;
  return m;
}

PotentialModel make_hybrid(double V0, double M, double phi_c, double beta, double mpl) {
  if (!(V0 > 0) || !(M > 0) || !(phi_c > 0) || !(beta > 0))
    throw ConfigError("hybrid model: need V0, M, phi_c, beta > 0");
  PotentialModel m;
  m.kind = PotentialKind::Hybrid;
  m.V0 = V0;
  m.M = M;
  m.phi_c = phi_c;
  m.beta = beta;
  m.mpl = mpl;
  return m;
}

ReducedPotential reduced_potential(const PotentialModel& model) {
  ReducedPotential rp;
  rp.dim = model.dim();

  if (model.kind != PotentialKind::Hybrid) {
    const double v0 = model.v0;
    rp.v = [v0](const Vector&) { return v0; };
    rp.grad = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
    rp.hess_diag = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
    return rp;
  }

  const double v0 = model.V0 / (kReduction * std::pow(model.mpl, 4));
  const double mpl = model.mpl;
  const double M = model.M, phi_c = model.phi_c, beta = model.beta;

  // v(phi, psi) = v0 [ beta ((phi-phi_c)/mpl)^3
  //                    + (1 - (psi/M)^2)^2 + 2 (phi psi / (phi_c M))^2 ]
  auto value = [=](const Vector& x) {
    const double dphi = (x[0] - phi_c) / mpl;
    const double s = x[1] / M;
    const double c = x[0] / phi_c;
    const double wf = (1.0 - s * s) * (1.0 - s * s) + 2.0 * c * c * s * s;
    return v0 * (beta * dphi * dphi * dphi + wf);
  };
  auto gradient = [=](const Vector& x) {
    const double dphi = (x[0] - phi_c) / mpl;
    const double s = x[1] / M;
    Vector g(2);
    g[0] = v0 * (3.0 * beta * dphi * dphi / mpl + 4.0 * x[0] * s * s / (phi_c * phi_c));
    g[1] = v0 * (-4.0 * s * (1.0 - s * s) / M +
                 4.0 * x[0] * x[0] * x[1] / (phi_c * phi_c * M * M));
    return g;
  };
  auto hessian = [=](const Vector& x) {
    const double dphi = (x[0] - phi_c) / mpl;
    const double s = x[1] / M;
    Vector h(2);
    h[0] = v0 * (6.0 * beta * dphi / (mpl * mpl) + 4.0 * s * s / (phi_c * phi_c));
    h[1] = v0 * (-4.0 * (1.0 - 3.0 * s * s) / (M * M) +
                 4.0 * x[0] * x[0] / (phi_c * phi_c * M * M));
    return h;
  };

  rp.v = value;
  rp.grad = gradient;
  rp.hess_diag = hessian;

  // Positivity probe on the nominal working box (inset from the corners
  // where the inflection branch can reach zero).
  const double r_phi = std::pow(beta, -1.0 / 3.0) * mpl;
  const double psi_probe = M;
  bool bad = false;
  double bad_phi = 0, bad_psi = 0;
  Vector x(2);
  for (int i = 1; i < 32 && !bad; ++i) {
    for (int j = 1; j < 32 && !bad; ++j) {
      x[0] = phi_c - r_phi + 2.0 * r_phi * (i / 32.0);
      x[1] = -psi_probe + 2.0 * psi_probe * (j / 32.0);
      if (!(value(x) > 0)) {
        bad = true;
        bad_phi = x[0];
        bad_psi = x[1];
      }
    }
  }
  if (bad)
    throw NumericError("reduced_potential: v <= 0 near (phi=" + std::to_string(bad_phi) +
                       ", psi=" + std::to_string(bad_psi) + ")");
  return rp;
}

HermitizedCoefficients hermitized_coefficients(const ReducedPotential& rp, double mpl) {
  if (!rp.v || !rp.grad || !rp.hess_diag)
    throw ConfigError("hermitized_coefficients: incomplete reduced potential");
  HermitizedCoefficients hc;
  hc.dim = rp.dim;
  const double mpl2 = mpl * mpl;

  auto v_fn = rp.v;
  auto grad_fn = rp.grad;
  auto hess_fn = rp.hess_diag;

  for (int axis = 0; axis < rp.dim; ++axis)
    hc.a.push_back([v_fn, mpl2](Eigen::Ref<const Vector> x) { return mpl2 * v_fn(x); });

  hc.a0 = [v_fn, grad_fn, hess_fn, mpl2](Eigen::Ref<const Vector> x) {
    const double v = v_fn(x);
    if (!(v > 0)) throw NumericError("hermitized a0: v <= 0");
    const Vector g = grad_fn(x);
    const Vector h = hess_fn(x);
    double sum = 0;
    for (int i = 0; i < g.size(); ++i)
      sum += 2.0 * v * v * (1.0 + v) * h[i] - (1.0 + 4.0 * v + v * v) * g[i] * g[i];
    return -mpl2 * sum / (4.0 * v * v * v);
  };

  hc.weight = [v_fn](Eigen::Ref<const Vector> x) {
    const double v = v_fn(x);
    if (!(v > 0)) throw NumericError("hermitization weight: v <= 0");
    return std::exp(1.0 / v) / v;
  };
  return hc;
}

WellEigenpair quantum_well_eigensystem(const PotentialModel& model, int n,
                                       WellBoundary boundary) {
  if (model.kind == PotentialKind::Hybrid)
    throw ConfigError("quantum_well_eigensystem: well models only");
  if (n < 1) throw ConfigError("quantum_well_eigensystem: n must be >= 1");

  const double phi_f = model.phi_f;
  const double mode = boundary == WellBoundary::AbsorbingBoth ? n : n - 0.5;
  WellEigenpair pair;
  pair.lambda = mode * mode * kPi * kPi * model.mpl * model.mpl * model.v0 / (4.0 * phi_f * phi_f);
  pair.psi = [mode, phi_f](double phi) {
    return std::sin(mode * kPi * (phi + phi_f) / (2.0 * phi_f)) / std::sqrt(phi_f);
  };
  return pair;
}

std::function<double(double)> gaussian_test_function(TestFunctionVariant variant, double r,
                                                     double phi_f) {
  if (!(r > 0) || !(phi_f > 0)) throw ConfigError("gaussian_test_function: need r, phi_f > 0");
  if (variant == TestFunctionVariant::Hilltop) {
    const double norm = 1.0 / std::sqrt(std::sqrt(kPi) * r * phi_f * std::erf(1.0 / r));
    return [norm, r, phi_f](double phi) {
      const double u = phi / (r * phi_f);
      return norm * std::exp(-0.5 * u * u);
    };
  }
  const double norm = 1.0 / std::sqrt(0.5 * std::sqrt(kPi) * r * phi_f * std::erf(2.0 / r));
  return [norm, r, phi_f](double phi) {
    const double u = (phi - phi_f) / (r * phi_f);
    return norm * std::exp(-0.5 * u * u);
  };
}

double analytic_well_overlap(TestFunctionVariant variant, int n, double r) {
  if (n < 1) throw ConfigError("analytic_well_overlap: n must be >= 1");
  if (!(r > 0)) throw ConfigError("analytic_well_overlap: r must be > 0");

  // Both variants reduce to pref * e^{-y^2} (erf(x+iy) + erf(x-iy)) with
  // y^2 equal to the Gaussian prefactor exponent, so the product is
  // evaluated as 2 e^{-y^2} - 2 e^{-x^2} Re[e^{-2ixy} w(-y + ix)], which
  // never overflows.
  double x = 0, y = 0, pref = 0, sign = 1;
  if (variant == TestFunctionVariant::Hilltop) {
    if (n % 2 == 0) return 0.0;
    x = 1.0 / (std::sqrt(2.0) * r);
    y = n * kPi * r / (2.0 * std::sqrt(2.0));
    pref = std::pow(kPi, 0.25) * std::sqrt(r) / std::sqrt(2.0 * std::erf(1.0 / r));
    sign = (((n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  } else {
    x = std::sqrt(2.0) / r;
    y = (2.0 * n - 1.0) * kPi * r / (4.0 * std::sqrt(2.0));
    pref = std::pow(kPi, 0.25) * std::sqrt(r) / (2.0 * std::sqrt(std::erf(2.0 / r)));
    sign = (n % 2 == 1) ? 1.0 : -1.0;  // -(-1)^n
  }

  const std::complex<double> w = faddeeva_w(std::complex<double>(-y, x));
  const std::complex<double> phase(std::cos(2.0 * x * y), -std::sin(2.0 * x * y));
  const double bracket = 2.0 * std::exp(-y * y) - 2.0 * std::exp(-x * x) * (phase * w).real();
  return sign * pref * bracket;
}

InflationDiagnostics diagnostics(const ReducedPotential& rp, double mpl) {
  if (rp.dim != 1) throw ConfigError("diagnostics: single-field models only");
  const double mpl2 = mpl * mpl;
  auto v_fn = rp.v;
  auto grad_fn = rp.grad;
  auto hess_fn = rp.hess_diag;
  auto at = [](double phi) {
    Vector x(1);
    x[0] = phi;
    return x;
  };

  InflationDiagnostics d;
  d.p_zeta = [=](double phi) {
    const Vector x = at(phi);
    const double v = v_fn(x), vp = grad_fn(x)[0];
    if (vp == 0) return std::numeric_limits<double>::infinity();
    return 2.0 * v * v * v / (vp * vp * mpl2);
  };
  d.eta_sto = [=](double phi) {
    const Vector x = at(phi);
    const double v = v_fn(x), vp = grad_fn(x)[0], vpp = hess_fn(x)[0];
    if (vp == 0)
      return vpp >= 0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    return v * v * vpp / (vp * vp);
  };
  d.eta_v = [=](double phi) {
    const Vector x = at(phi);
    return mpl2 * hess_fn(x)[0] / v_fn(x);
  };
  // Equal to -(1 - 2 Lambda p_zeta - 2 eta_sto) / (2 mpl^2 v p_zeta), written
  // so flat points stay finite.
  d.omega_n_sq = [=](double lambda, double phi) {
    const Vector x = at(phi);
    const double v = v_fn(x), vp = grad_fn(x)[0], vpp = hess_fn(x)[0];
    return lambda / (mpl2 * v) + vpp / (2.0 * v * v) - vp * vp / (4.0 * v * v * v * v);
  };
  return d;
}

}  // namespace spectraldiff::inflation
