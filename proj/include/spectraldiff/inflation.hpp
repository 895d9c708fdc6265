#pragma once

#include <functional>

#include "spectraldiff/fd_matrix.hpp"

namespace spectraldiff::inflation {

using spectraldiff::ScalarField;
using spectraldiff::Vector;

/// GeV value of the reduced Planck mass, for converting model files that
/// quote dimensionful parameters in GeV.
inline constexpr double kPlanckMassGeV = 2.435e18;

enum class PotentialKind { QuantumWell, InflectionWell, Hybrid };

/// Inflaton potential in reduced-Planck units (mpl = 1 internally).
/// Well variants are parameterized directly by the reduced height v0 and the
/// half-width phi_f.  The hybrid model couples a cubic inflection potential
/// in phi to a waterfall field psi:
///   V = V0 beta (phi - phi_c)^3 / mpl^3
///     + V0 [ (1 - (psi/M)^2)^2 + 2 (phi psi / (phi_c M))^2 ].
struct PotentialModel {
  PotentialKind kind = PotentialKind::QuantumWell;
  double v0 = 0, phi_f = 0;                    // wells
  double V0 = 0, M = 0, phi_c = 0, beta = 0;   // hybrid
  double mpl = 1.0;

  int dim() const { return kind == PotentialKind::Hybrid ? 2 : 1; }
};

PotentialModel make_quantum_well(double v0, double phi_f, double mpl = 1.0);
PotentialModel make_inflection_well(double v0, double phi_f, double mpl = 1.0);
PotentialModel make_hybrid(double V0, double M, double phi_c, double beta, double mpl = 1.0);

/// Reduced potential v = V / (24 pi^2 mpl^4) with closed-form gradient and
/// diagonal Hessian.
struct ReducedPotential {
  int dim = 1;
  std::function<double(const Vector&)> v;
  std::function<Vector(const Vector&)> grad;
  std::function<Vector(const Vector&)> hess_diag;
};

ReducedPotential reduced_potential(const PotentialModel& model);

/// Coefficients of the symmetrized generator: per-axis diffusion
/// a_i = mpl^2 v and zero-order term
/// a_0 = -mpl^2 sum_i [2 v^2 (1+v) v_ii - (1 + 4v + v^2) v_i^2] / (4 v^3),
/// together with the similarity weight w = e^{1/v} / v.
struct HermitizedCoefficients {
  int dim = 1;
  ScalarField a0;
  std::vector<ScalarField> a;
  ScalarField weight;
};

HermitizedCoefficients hermitized_coefficients(const ReducedPotential& rp, double mpl);

enum class WellBoundary { AbsorbingBoth, AbsorbingReflective };

struct WellEigenpair {
  double lambda = 0;
  std::function<double(double)> psi;  // normalized: integral of psi^2 is 1
};

/// Analytic eigensystem of the constant well on [-phi_f, phi_f]:
/// sin(n pi (phi + phi_f) / (2 phi_f)) with lambda_n = n^2 pi^2 mpl^2 v0 /
/// (4 phi_f^2); the reflective variant replaces n by n - 1/2.
WellEigenpair quantum_well_eigensystem(const PotentialModel& model, int n, WellBoundary boundary);

enum class TestFunctionVariant { Hilltop, Inflection };

/// Normalized Gaussian test function: centered at 0 (hilltop) or at the
/// reflective wall phi_f (inflection), with width r phi_f.
std::function<double(double)> gaussian_test_function(TestFunctionVariant variant, double r,
                                                     double phi_f);

/// Closed-form overlap of the Gaussian test function with the n-th well
/// eigenfunction, evaluated through the Faddeeva function in a form immune
/// to exp overflow.  Hilltop overlaps vanish for even n.
double analytic_well_overlap(TestFunctionVariant variant, int n, double r);

/// Single-field diagnostic fields.  p_zeta and eta_sto return +/-infinity at
/// flat points v' = 0; omega_n_sq uses an algebraically equivalent form that
/// stays finite there.
struct InflationDiagnostics {
  std::function<double(double)> p_zeta;    // 2 v^3 / (v'^2 mpl^2)
  std::function<double(double)> eta_sto;   // v^2 v'' / v'^2
  std::function<double(double)> eta_v;     // mpl^2 v'' / v
  std::function<double(double, double)> omega_n_sq;  // (Lambda, phi)
};

InflationDiagnostics diagnostics(const ReducedPotential& rp, double mpl);

}  // namespace spectraldiff::inflation
