#include "spectraldiff/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "spectraldiff/detail/rng.hpp"
#include "spectraldiff/qsvt.hpp"

namespace spectraldiff {

namespace {

void fix_sign(Vector& v) {
  Index arg = 0;
  double best = 0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v[arg] < 0) v = -v;
}

double sparse_max_abs(const SparseMat& A) {
  double m = 0;
  for (Index r = 0; r < A.outerSize(); ++r)
    for (SparseMat::InnerIterator it(A, r); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

using ApplyFn = std::function<void(const Vector&, Vector&)>;

enum class RitzSelect { Smallest, LargestAbs };

struct LanczosOut {
  std::vector<double> theta;
  std::vector<Vector> vectors;
  int iterations = 0;
  bool exhausted_space = false;
};

std::vector<int> select_targets(const Eigen::VectorXd& evals, int k, RitzSelect mode) {
  std::vector<int> idx(evals.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (mode == RitzSelect::Smallest) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return evals[a] < evals[b]; });
  } else {
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(evals[a]) > std::abs(evals[b]); });
  }
  if (static_cast<int>(idx.size()) > k) idx.resize(k);
  return idx;
}

// Lanczos with full reorthogonalization on an abstract symmetric operator.
// Checks run on the tridiagonal eigenvalues (cheap); residual estimates via
// the last eigenvector row confirm convergence before exit.
LanczosOut lanczosDriver(const ApplyFn& apply, Index n, int k, double tol, int max_iter,
                         std::uint64_t seed, RitzSelect mode) {
  LanczosOut out;
  if (k <= 0) return out;
  max_iter = static_cast<int>(std::min<Index>(max_iter, n));
  std::mt19937_64 rng(seed);

  Eigen::MatrixXd V(n, max_iter);
  std::vector<double> alpha, beta;
  alpha.reserve(max_iter);
  beta.reserve(max_iter);

  {
    Vector v0(n);
    for (Index i = 0; i < n; ++i) v0[i] = detail::normal01(rng);
    V.col(0) = v0 / v0.norm();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  auto solve_tri = [&](int m, bool vectors) {
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub =
        m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
              : Eigen::VectorXd();
    tri.computeFromTridiagonal(diag, sub,
                               vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  };

  Vector vin(n), w(n);
  std::vector<double> prev_theta;
  int m = 0;
  double b = 0;

  while (true) {
    vin = V.col(m);
    apply(vin, w);
    const double a = vin.dot(w);
    alpha.push_back(a);
    w -= a * vin;
    if (m > 0) w -= beta[m - 1] * V.col(m - 1);
    for (int pass = 0; pass < 2; ++pass)
      w.noalias() -= V.leftCols(m + 1) * (V.leftCols(m + 1).transpose() * w).eval();
    b = w.norm();
    ++m;

    if (!(b > 1e-300) || m == max_iter || static_cast<Index>(m) == n) {
      out.exhausted_space = !(b > 1e-300) || static_cast<Index>(m) == n;
      break;
    }
    V.col(m) = w / b;
    beta.push_back(b);

    const int check_every = (m <= 64) ? 8 : (m <= 512 ? 16 : 32);
    if (m > k && m % check_every == 0) {
      solve_tri(m, false);
      const auto targets = select_targets(tri.eigenvalues(), k, mode);
      std::vector<double> theta;
      for (int t : targets) theta.push_back(tri.eigenvalues()[t]);
      double scale = 1.0;
      for (double th : theta) scale = std::max(scale, std::abs(th));

      bool stable = prev_theta.size() == theta.size();
      for (std::size_t i = 0; stable && i < theta.size(); ++i)
        stable = std::abs(theta[i] - prev_theta[i]) <= std::max(0.01 * tol * scale, 1e-14 * scale);
      prev_theta = theta;
      if (!stable) continue;

      solve_tri(m, true);
      const auto tsel = select_targets(tri.eigenvalues(), k, mode);
      bool ok = true;
      for (int t : tsel)
        ok = ok && b * std::abs(tri.eigenvectors()(m - 1, t)) <= tol * scale;
      if (ok) break;
    }
  }

  solve_tri(m, true);
  const auto targets = select_targets(tri.eigenvalues(), std::min(k, m), mode);
  for (int t : targets) {
    Vector y = V.leftCols(m) * tri.eigenvectors().col(t).head(m);
    y.normalize();
    out.theta.push_back(tri.eigenvalues()[t]);
    out.vectors.push_back(std::move(y));
  }
  out.iterations = m;
  return out;
}

EigenResult finalizeAscending(std::vector<double> lambdas, std::vector<Vector> vectors,
                              const ApplyFn& apply_orig) {
  std::vector<int> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lambdas[a] < lambdas[b]; });
  EigenResult res;
  Vector tmp;
  for (int i : order) {
    Vector& v = vectors[i];
    fix_sign(v);
    tmp.resize(v.size());
    apply_orig(v, tmp);
    res.eigenvalues.push_back(lambdas[i]);
    res.residuals.push_back((tmp - lambdas[i] * v).norm());
    res.eigenvectors.push_back(std::move(v));
  }
  return res;
}

}  // namespace

EigenResult dense_smallest_eigs(const SparseMat& A, int k, Index dense_cap) {
  if (k < 0) throw ConfigError("dense_smallest_eigs: k must be >= 0");
  if (A.rows() > dense_cap)
    throw ConfigError("dense_smallest_eigs: dimension " + std::to_string(A.rows()) +
                      " exceeds the dense cap " + std::to_string(dense_cap));
  EigenResult res;
  if (k == 0) return res;
  const int kk = static_cast<int>(std::min<Index>(k, A.rows()));

  Eigen::MatrixXd dense(A);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw NumericError("dense_smallest_eigs: eigendecomposition failed");

  for (int i = 0; i < kk; ++i) {
    Vector v = solver.eigenvectors().col(i);
    fix_sign(v);
    res.eigenvalues.push_back(solver.eigenvalues()[i]);
    res.residuals.push_back((A * v - solver.eigenvalues()[i] * v).norm());
    res.eigenvectors.push_back(std::move(v));
  }
  return res;
}

EigenResult dense_smallest_eigs(const FDMatrix& m, int k, Index dense_cap) {
  EigenResult res = dense_smallest_eigs(m.mat, k, dense_cap);
  grid_normalize(res, m.grid);
  return res;
}

EigenResult lanczos_smallest_eigs(const SparseMat& A, int k, double tol, int max_iter,
                                  std::uint64_t seed) {
  if (k < 0) throw ConfigError("lanczos_smallest_eigs: k must be >= 0");
  if (k == 0) return {};
  if (A.rows() != A.cols()) throw ConfigError("lanczos_smallest_eigs: matrix not square");
  const Index n = A.rows();
  if (max_iter <= 0) max_iter = static_cast<int>(std::min<Index>(n, 5000));

  ApplyFn apply = [&A](const Vector& x, Vector& y) { y.noalias() = A * x; };
  LanczosOut lz = lanczosDriver(apply, n, k, tol, max_iter, seed, RitzSelect::Smallest);
  if (static_cast<int>(lz.theta.size()) < std::min<Index>(k, n))
    throw NumericError("lanczos_smallest_eigs: Krylov space too small for requested count");

  EigenResult res = finalizeAscending(lz.theta, lz.vectors, apply);
  const double scale = std::max(1.0, sparse_max_abs(A));
  if (!lz.exhausted_space) {
    for (double r : res.residuals) {
      if (r > tol * scale) {
        std::ostringstream msg;
        msg << "lanczos_smallest_eigs: no convergence within " << max_iter
            << " iterations; best residuals:";
        for (double rr : res.residuals) msg << " " << rr;
        throw NumericError(msg.str());
      }
    }
  }
  return res;
}

EigenResult lanczos_smallest_eigs(const FDMatrix& m, int k, double tol, int max_iter,
                                  std::uint64_t seed) {
  EigenResult res = lanczos_smallest_eigs(m.mat, k, tol, max_iter, seed);
  grid_normalize(res, m.grid);
  return res;
}

EigenResult shift_invert_smallest_eigs(const SparseMat& A, int k, double sigma, double tol,
                                       int max_iter, std::uint64_t seed) {
  if (k < 0) throw ConfigError("shift_invert_smallest_eigs: k must be >= 0");
  if (k == 0) return {};
  if (A.rows() != A.cols()) throw ConfigError("shift_invert_smallest_eigs: matrix not square");
  const Index n = A.rows();

  Eigen::SparseMatrix<double> shifted = A;
  if (sigma != 0.0) {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    shifted -= sigma * id;
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw NumericError("shift_invert_smallest_eigs: factorization failed (singular shift?)");

  ApplyFn apply_inv = [&factor](const Vector& x, Vector& y) { y = factor.solve(x); };
  LanczosOut lz = lanczosDriver(apply_inv, n, k, tol, max_iter, seed, RitzSelect::LargestAbs);
  if (static_cast<int>(lz.theta.size()) < std::min<Index>(k, n))
    throw NumericError("shift_invert_smallest_eigs: Krylov space too small for requested count");

  std::vector<double> lambdas;
  for (double theta : lz.theta) {
    if (theta == 0.0)
      throw NumericError("shift_invert_smallest_eigs: zero Ritz value in inverted spectrum");
    lambdas.push_back(sigma + 1.0 / theta);
  }
  ApplyFn apply_orig = [&A](const Vector& x, Vector& y) { y.noalias() = A * x; };
  return finalizeAscending(lambdas, lz.vectors, apply_orig);
}

void grid_normalize(EigenResult& r, const UniformGrid& grid) {
  const double factor = std::sqrt(std::pow(grid.spacing(), grid.box.dim));
  for (auto& v : r.eigenvectors) {
    const double l2 = v.norm();
    if (l2 == 0) continue;
    v /= (l2 * factor);
  }
}

double overlap(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw ConfigError("overlap: size mismatch");
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) throw ConfigError("overlap: zero vector");
  return std::min(1.0, std::abs(u.dot(v)) / (nu * nv));
}

double overlap(const GridVector& u, const GridVector& v) {
  if (u.grid.n_gr != v.grid.n_gr || u.grid.box.dim != v.grid.box.dim)
    throw ConfigError("overlap: grid mismatch");
  return overlap(u.values, v.values);
}

bool lemma1_bound_check(const GridVector& u, const GridVector& v, double eps) {
  if (eps < 0) throw ConfigError("lemma1_bound_check: eps must be >= 0");
  if (u.values.size() != v.values.size()) throw ConfigError("lemma1_bound_check: size mismatch");
  if (std::abs(grid_norm(v) - 1.0) > 1e-8)
    throw ConfigError("lemma1_bound_check: v must have grid_norm 1");
  if ((u.values - v.values).lpNorm<Eigen::Infinity>() > eps * (1 + 1e-12))
    throw ConfigError("lemma1_bound_check: ||u - v||_max exceeds eps");

  const double rhs = 1.0 - 2.0 * std::pow(v.grid.box.length(), v.grid.box.dim / 2.0) * eps;
  const double nu = u.values.norm(), nv = v.values.norm();
  if (nu == 0) return rhs <= 0.0;
  const double ip = u.values.dot(v.values) / (nu * nv);
  return ip >= rhs - 1e-14;
}

bool lemma2_bound_check(const Vector& phi, const Vector& psi, const Vector& zeta, double gamma) {
  if (gamma <= 0 || gamma >= 1) throw ConfigError("lemma2_bound_check: gamma outside (0,1)");
  Vector p = phi / phi.norm();
  Vector s = psi / psi.norm();
  Vector z = zeta / zeta.norm();
  const double target = eta(gamma);
  if (std::abs(p.dot(s)) < gamma * (1 - 1e-12))
    throw ConfigError("lemma2_bound_check: |<phi|psi>| below gamma");
  if (std::abs(s.dot(z)) < target * (1 - 1e-12))
    throw ConfigError("lemma2_bound_check: |<psi|zeta>| below eta(gamma)");
  return std::abs(p.dot(z)) >= gamma / 2.0 - 1e-12;
}

ConvergenceFit richardson_fit(const OperatorSpec& spec, const std::vector<int>& resolutions,
                              int k, std::optional<double> analytic_reference) {
  if (resolutions.size() < 3) throw ConfigError("richardson_fit: need at least 3 resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1])
      throw ConfigError("richardson_fit: resolutions must be strictly ascending");
  if (k < 1) throw ConfigError("richardson_fit: k must be >= 1");
  spec.validate();

  {  // ellipticity precondition: diffusion coefficients positive on a sample
    UniformGrid coarse(spec.domain, resolutions.front());
    Vector x(spec.domain.dim);
    const Index probe = std::min<Index>(coarse.total(), 256);
    for (Index K = 0; K < probe; ++K) {
      x = coarse.point(K);
      for (int i = 0; i < spec.domain.dim; ++i)
        if (!(spec.a[i](x) > 0))
          throw ConfigError("richardson_fit: diffusion coefficient not positive (ellipticity)");
    }
  }

  std::vector<double> lambdas;
  std::vector<GridVector> vectors;
  for (int n : resolutions) {
    FDMatrix m = assemble_fd_matrix(spec, n);
    EigenResult r;
    if (m.dim() <= kDenseCap) {
      r = dense_smallest_eigs(m, k);
    } else {
      r = shift_invert_smallest_eigs(m.mat, k, 0.0);
      grid_normalize(r, m.grid);
    }
    if (static_cast<int>(r.eigenvalues.size()) < k)
      throw NumericError("richardson_fit: solver returned too few eigenpairs");
    lambdas.push_back(r.eigenvalues[k - 1]);
    vectors.push_back(GridVector{r.eigenvectors[k - 1], m.grid});
  }

  ConvergenceFit fit;
  const std::size_t last = resolutions.size() - 1;
  if (analytic_reference) {
    fit.reference = *analytic_reference;
  } else {
    const double n1 = resolutions[last - 1], n2 = resolutions[last];
    fit.reference = (n2 * n2 * lambdas[last] - n1 * n1 * lambdas[last - 1]) / (n2 * n2 - n1 * n1);
  }

  std::vector<double> log_n, log_e;
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const double e = std::abs(lambdas[i] - fit.reference);
    if (e < 1e-300) continue;
    log_n.push_back(std::log(static_cast<double>(resolutions[i])));
    log_e.push_back(std::log(e));
    fit.constant_estimate =
        std::max(fit.constant_estimate, e * resolutions[i] * static_cast<double>(resolutions[i]));
  }
  if (log_n.size() < 2) throw NumericError("richardson_fit: degenerate fit (identical values)");

  const double n_pts = static_cast<double>(log_n.size());
  const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / n_pts;
  const double my = std::accumulate(log_e.begin(), log_e.end(), 0.0) / n_pts;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
    sxy += (log_n[i] - mx) * (log_e[i] - my);
  }
  if (sxx == 0) throw NumericError("richardson_fit: degenerate fit (identical resolutions)");
  fit.order = -sxy / sxx;

  // Eigenvector constant from nested grids: fine node 2j+1 sits on coarse node j.
  bool nested = true;
  for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
    nested = nested && (resolutions[i + 1] == 2 * resolutions[i] + 1);
  if (nested) {
    double d_best = 0;
    const int d = spec.domain.dim;
    for (std::size_t i = 0; i + 1 < resolutions.size(); ++i) {
      const GridVector& vc = vectors[i];
      const GridVector& vf = vectors[i + 1];
      const int nc = resolutions[i];
      Vector restricted(vc.values.size());
      for (Index K = 0; K < vc.values.size(); ++K) {
        MultiIndex jc = unflatten_index(K, nc, d);
        MultiIndex jf(d);
        for (int ax = 0; ax < d; ++ax) jf[ax] = 2 * jc[ax] + 1;
        restricted[K] = vf.values[flatten_index(jf, resolutions[i + 1])];
      }
      if (vc.values.dot(restricted) < 0) restricted = -restricted;
      const double diff = (vc.values - restricted).lpNorm<Eigen::Infinity>();
      const double ratio2 = static_cast<double>(nc) * nc /
                            (static_cast<double>(resolutions[i + 1]) * resolutions[i + 1]);
      d_best = std::max(d_best, diff * nc * nc / (1.0 - ratio2));
    }
    fit.d_constant = d_best;
  }
  return fit;
}

}  // namespace spectraldiff
