#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "spectraldiff/fd_matrix.hpp"

namespace spectraldiff {

/// Eigenpairs sorted ascending.  Eigenvectors are l2-normalized with the
/// sign convention that the first entry of largest magnitude is positive.
struct EigenResult {
  std::vector<double> eigenvalues;
  std::vector<Vector> eigenvectors;
  std::vector<double> residuals;  // ||Av - lambda v||_2 per unit vector
};

inline constexpr Index kDenseCap = 4096;

EigenResult dense_smallest_eigs(const SparseMat& A, int k, Index dense_cap = kDenseCap);
EigenResult dense_smallest_eigs(const FDMatrix& m, int k, Index dense_cap = kDenseCap);

/// Lanczos with full reorthogonalization and a seeded start vector.
/// Deterministic given the seed.  max_iter <= 0 picks min(N, 5000).
EigenResult lanczos_smallest_eigs(const SparseMat& A, int k, double tol = 1e-10,
                                  int max_iter = 0, std::uint64_t seed = 20240901);
EigenResult lanczos_smallest_eigs(const FDMatrix& m, int k, double tol = 1e-10,
                                  int max_iter = 0, std::uint64_t seed = 20240901);

/// Lanczos on (A - sigma I)^{-1} via a sparse LDLT factorization; returns
/// the k eigenvalues of A nearest sigma, sorted ascending.  The scalable
/// route when the spectrum spans many orders of magnitude.
EigenResult shift_invert_smallest_eigs(const SparseMat& A, int k, double sigma = 0.0,
                                       double tol = 1e-12, int max_iter = 300,
                                       std::uint64_t seed = 20240901);

/// Normalize eigenvectors so that grid_norm = 1 (keeps the sign convention).
void grid_normalize(EigenResult& r, const UniformGrid& grid);

/// |<u, v>| / (||u|| ||v||), in [0, 1].
double overlap(const Vector& u, const Vector& v);
double overlap(const GridVector& u, const GridVector& v);

/// Checks <u|v> / (||u|| ||v||) >= 1 - 2 (U-L)^{d/2} eps for a grid-normalized
/// v and ||u - v||_max <= eps.  Returns the truth of the inequality.
bool lemma1_bound_check(const GridVector& u, const GridVector& v, double eps);

/// Checks |<phi|zeta>| >= gamma/2 given |<phi|psi>| >= gamma and
/// |<psi|zeta>| >= eta(gamma); all vectors normalized internally.
bool lemma2_bound_check(const Vector& phi, const Vector& psi, const Vector& zeta, double gamma);

/// Fit of the eigenvalue error decay |lambda(n) - reference| ~ C / n^order.
struct ConvergenceFit {
  double order = 0;
  double constant_estimate = 0;  // C so that |lambda(n) - ref| <= C / n^2
  double d_constant = std::numeric_limits<double>::quiet_NaN();  // eigenvector max-norm constant
  double reference = 0;
};

/// Assembles and solves the k-th eigenvalue across the given resolutions and
/// fits the convergence order.  Without an analytic reference the two finest
/// grids supply a Richardson-extrapolated one.  The eigenvector constant is
/// fitted when resolutions are nested (n' = 2n + 1).
ConvergenceFit richardson_fit(const OperatorSpec& spec, const std::vector<int>& resolutions,
                              int k, std::optional<double> analytic_reference = std::nullopt);

}  // namespace spectraldiff
