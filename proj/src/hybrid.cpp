#include "spectraldiff/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spectraldiff::inflation {

namespace {

// Bisection on f = 0 inside [lo, hi] with a sign change; relative tolerance.
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((hi - lo) <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) return mid;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Geometric scan from `start` by factor 2 until the sign of f changes, then
// bisect.  Errors carry the scanned sign profile.
double scan_and_bisect(const std::function<double(double)>& f, double start, double limit,
                       const char* what) {
  double lo = start;
  double flo = f(lo);
  std::ostringstream profile;
  profile << what << ": sign profile";
  for (double hi = 2.0 * start; hi <= limit * (1 + 1e-12); hi *= 2.0) {
    const double fhi = f(hi);
    profile << " f(" << hi << ")=" << fhi;
    if ((fhi > 0) != (flo > 0)) return bisect(f, lo, hi, flo);
    lo = hi;
    flo = fhi;
  }
  // Last partial interval up to the limit.
  const double fhi = f(limit);
  if ((fhi > 0) != (flo > 0)) return bisect(f, lo, limit, flo);
  throw RootFindError(std::string("build_hybrid_grid: no sign change for ") + what + "; " +
                      profile.str());
}

// Symmetric node block spanning [-R, R] with `count` uniformly spaced points
// constructed as exact +/- pairs (plus 0 when count is odd).
std::vector<double> symmetric_linear_block(double R, int count) {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(0.0);
    return out;
  }
  const int half = count / 2;
  std::vector<double> pos;
  if (count % 2 == 0) {
    for (int j = 1; j <= half; ++j) pos.push_back(R * (2.0 * j - 1.0) / (count - 1));
  } else {
    for (int j = 1; j <= half; ++j) pos.push_back(R * (2.0 * j) / (count - 1));
  }
  for (int j = half - 1; j >= 0; --j) out.push_back(-pos[j]);
  if (count % 2 == 1) out.push_back(0.0);
  for (int j = 0; j < half; ++j) out.push_back(pos[j]);
  return out;
}

// Log-spaced radii in (r_in, r_out], count points, ascending.
std::vector<double> log_block(double r_in, double r_out, int count) {
  std::vector<double> out;
  out.reserve(count);
  const double l0 = std::log(r_in), l1 = std::log(r_out);
  for (int i = 1; i <= count; ++i)
    out.push_back(std::exp(l0 + (l1 - l0) * static_cast<double>(i) / count));
  out.back() = r_out;
  return out;
}

std::vector<double> forward_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) w[i] = nodes[i + 1] - nodes[i];
  return w;
}

}  // namespace

NonuniformGrid2D build_hybrid_grid(const PotentialModel& model, double resolution_scale) {
  if (model.kind != PotentialKind::Hybrid)
    throw ConfigError("build_hybrid_grid: hybrid model required");
  if (!(resolution_scale > 0) || resolution_scale > 1)
    throw ConfigError("build_hybrid_grid: resolution_scale outside (0, 1]");

  const ReducedPotential rp = reduced_potential(model);
  const double mpl = model.mpl;
  const double phi_c = model.phi_c;

  auto at = [](double phi, double psi) {
    Vector x(2);
    x[0] = phi;
    x[1] = psi;
    return x;
  };
  auto eta_sto_phi = [&](double phi) {
    const Vector x = at(phi, 0.0);
    const double v = rp.v(x), vp = rp.grad(x)[0], vpp = rp.hess_diag(x)[0];
    return v * v * vpp / (vp * vp);
  };

  NonuniformGrid2D g;
  const double r_phi = std::pow(model.beta, -1.0 / 3.0) * mpl;
  g.phi_min = phi_c - r_phi;
  g.phi_max = phi_c + r_phi;

  // Stochasticity window in phi: eta_sto crosses 0.1 on the gentle side.
  const double dphi_sto = scan_and_bisect(
      [&](double d) { return eta_sto_phi(phi_c + d) - 0.1; }, r_phi * 1e-12, r_phi,
      "phi stochastic threshold");
  g.phi_sto_plus = phi_c + dphi_sto;
  g.phi_sto_minus = phi_c - dphi_sto;

  // psi endpoints: second slow-roll parameter for psi reaches 1 at phi_c.
  const double psi_end = scan_and_bisect(
      [&](double psi) {
        const Vector x = at(phi_c, psi);
        return mpl * mpl * std::abs(rp.hess_diag(x)[1] / rp.v(x)) - 1.0;
      },
      model.M * 1e-12, model.M * 1e6, "psi endpoint");
  g.psi_max = psi_end;
  g.psi_min = -psi_end;

  // Stochasticity window in psi, evaluated along phi = phi_sto_plus.
  const double psi_sto = scan_and_bisect(
      [&](double psi) {
        const Vector x = at(g.phi_sto_plus, psi);
        const double v = rp.v(x), vp = rp.grad(x)[1], vpp = rp.hess_diag(x)[1];
        return v * v * vpp / (vp * vp) - 0.1;
      },
      model.M * 1e-12, psi_end, "psi stochastic threshold");
  g.psi_sto_plus = psi_sto;
  g.psi_sto_minus = -psi_sto;

  const int n_lin = static_cast<int>(std::ceil(1000.0 * resolution_scale));
  const int n_log = static_cast<int>(std::ceil(500.0 * resolution_scale));
  if (n_lin < 2 || n_log < 1) throw ConfigError("build_hybrid_grid: resolution_scale too small");

  auto build_axis = [&](double center, double r_sto, double r_out) {
    std::vector<double> nodes;
    const std::vector<double> outer = log_block(r_sto, r_out, n_log);
    for (auto it = outer.rbegin(); it != outer.rend(); ++it) nodes.push_back(center - *it);
    for (double t : symmetric_linear_block(r_sto, n_lin)) nodes.push_back(center + t);
    for (double t : outer) nodes.push_back(center + t);
    return nodes;
  };

  g.phi_nodes = build_axis(phi_c, dphi_sto, r_phi);
  g.psi_nodes = build_axis(0.0, psi_sto, psi_end);
  g.phi_weights = forward_weights(g.phi_nodes);
  g.psi_weights = forward_weights(g.psi_nodes);

  for (std::size_t i = 1; i < g.phi_nodes.size(); ++i)
    if (!(g.phi_nodes[i] > g.phi_nodes[i - 1]))
      throw NumericError("build_hybrid_grid: phi nodes not strictly increasing");
  for (std::size_t i = 1; i < g.psi_nodes.size(); ++i)
    if (!(g.psi_nodes[i] > g.psi_nodes[i - 1]))
      throw NumericError("build_hybrid_grid: psi nodes not strictly increasing");
  return g;
}

FPNonuniformOperator assemble_fp_matrix_nonuniform(const HermitizedCoefficients& coeffs,
                                                   const NonuniformGrid2D& grid) {
  if (coeffs.dim != 2 || coeffs.a.size() != 2)
    throw ConfigError("assemble_fp_matrix_nonuniform: two-axis coefficients required");
  const auto& fn = grid.phi_nodes;
  const auto& sn = grid.psi_nodes;
  if (fn.size() < 3 || sn.size() < 3)
    throw ConfigError("assemble_fp_matrix_nonuniform: need at least one interior node per axis");
  for (std::size_t i = 1; i < fn.size(); ++i)
    if (!(fn[i] > fn[i - 1]))
      throw ConfigError("assemble_fp_matrix_nonuniform: non-monotone phi nodes");
  for (std::size_t i = 1; i < sn.size(); ++i)
    if (!(sn[i] > sn[i - 1]))
      throw ConfigError("assemble_fp_matrix_nonuniform: non-monotone psi nodes");

  FPNonuniformOperator op;
  op.grid = grid;
  op.n_phi_interior = static_cast<Index>(fn.size()) - 2;
  op.n_psi_interior = static_cast<Index>(sn.size()) - 2;
  const Index np = op.n_phi_interior;
  const Index n_total = op.unknowns();

  auto cell = [](const std::vector<double>& nodes, Index i) {
    return 0.5 * (nodes[i + 1] - nodes[i - 1]);  // i is a node index
  };

  op.sqrt_cell.resize(n_total);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_total) * 5);

  Vector x(2);
  for (Index l = 1; l <= op.n_psi_interior; ++l) {
    for (Index k = 1; k <= np; ++k) {
      const Index row = (k - 1) + np * (l - 1);
      const double cphi = cell(fn, k);
      const double cpsi = cell(sn, l);
      op.sqrt_cell[row] = std::sqrt(cphi * cpsi);

      x[0] = fn[k];
      x[1] = sn[l];
      double diag = coeffs.a0(x);

      // phi-direction fluxes
      {
        const double d_plus = fn[k + 1] - fn[k];
        const double d_minus = fn[k] - fn[k - 1];
        x[0] = 0.5 * (fn[k] + fn[k + 1]);
        const double a_plus = coeffs.a[0](x);
        x[0] = 0.5 * (fn[k - 1] + fn[k]);
        const double a_minus = coeffs.a[0](x);
        x[0] = fn[k];
        diag += (a_plus / d_plus + a_minus / d_minus) / cphi;
        if (k + 1 <= np)
          triplets.emplace_back(row, row + 1,
                                -a_plus / (d_plus * std::sqrt(cphi * cell(fn, k + 1))));
        if (k - 1 >= 1)
          triplets.emplace_back(row, row - 1,
                                -a_minus / (d_minus * std::sqrt(cphi * cell(fn, k - 1))));
      }
      // psi-direction fluxes
      {
        const double d_plus = sn[l + 1] - sn[l];
        const double d_minus = sn[l] - sn[l - 1];
        x[1] = 0.5 * (sn[l] + sn[l + 1]);
        const double a_plus = coeffs.a[1](x);
        x[1] = 0.5 * (sn[l - 1] + sn[l]);
        const double a_minus = coeffs.a[1](x);
        x[1] = sn[l];
        diag += (a_plus / d_plus + a_minus / d_minus) / cpsi;
        if (l + 1 <= op.n_psi_interior)
          triplets.emplace_back(row, row + np,
                                -a_plus / (d_plus * std::sqrt(cpsi * cell(sn, l + 1))));
        if (l - 1 >= 1)
          triplets.emplace_back(row, row - np,
                                -a_minus / (d_minus * std::sqrt(cpsi * cell(sn, l - 1))));
      }
      triplets.emplace_back(row, row, diag);
    }
  }

  op.sym.resize(n_total, n_total);
  op.sym.setFromTriplets(triplets.begin(), triplets.end());
  op.sym.makeCompressed();
  return op;
}

std::vector<double> FPNonuniformOperator::node_values(const Vector& sym_vector) const {
  if (sym_vector.size() != unknowns())
    throw ConfigError("node_values: dimension mismatch");
  const Index cols = static_cast<Index>(grid.phi_nodes.size());
  const Index rows = static_cast<Index>(grid.psi_nodes.size());
  std::vector<double> out(static_cast<std::size_t>(cols * rows), 0.0);
  for (Index l = 1; l <= n_psi_interior; ++l)
    for (Index k = 1; k <= n_phi_interior; ++k) {
      const Index u = (k - 1) + n_phi_interior * (l - 1);
      out[static_cast<std::size_t>(k + cols * l)] = sym_vector[u] / sqrt_cell[u];
    }
  return out;
}

std::function<double(double, double)> hybrid_test_function(const PotentialModel& model,
                                                           const NonuniformGrid2D& grid) {
  if (model.kind != PotentialKind::Hybrid)
    throw ConfigError("hybrid_test_function: hybrid model required");
  const double phi_c = model.phi_c;
  const double wphi = grid.phi_sto_plus - phi_c;
  const double wpsi = grid.psi_sto_plus;
  return [phi_c, wphi, wpsi](double phi, double psi) {
    const double u = (phi - phi_c) / wphi;
    const double s = psi / wpsi;
    return std::exp(-0.5 * u * u - 0.5 * s * s);
  };
}

std::vector<double> overlap_spectrum(const std::function<double(double, double)>& test,
                                     const std::vector<std::vector<double>>& eigenfunctions,
                                     const NonuniformGrid2D& grid, int count) {
  if (count > static_cast<int>(eigenfunctions.size()))
    throw ConfigError("overlap_spectrum: fewer eigenfunctions than requested");
  const std::size_t cols = grid.phi_nodes.size();
  const std::size_t rows = grid.psi_nodes.size();

  std::vector<double> fvals(cols * rows);
  double f_norm = 0;
  for (std::size_t l = 0; l < rows; ++l)
    for (std::size_t k = 0; k < cols; ++k) {
      const double w = grid.phi_weights[k] * grid.psi_weights[l];
      const double f = test(grid.phi_nodes[k], grid.psi_nodes[l]);
      fvals[k + cols * l] = f;
      f_norm += f * f * w;
    }
  if (!(f_norm > 0)) throw ConfigError("overlap_spectrum: zero-norm test function");

  std::vector<double> out;
  for (int n = 0; n < count; ++n) {
    const auto& psi = eigenfunctions[n];
    if (psi.size() != cols * rows) throw ConfigError("overlap_spectrum: eigenfunction size");
    double cross = 0, g_norm = 0;
    for (std::size_t l = 0; l < rows; ++l)
      for (std::size_t k = 0; k < cols; ++k) {
        const double w = grid.phi_weights[k] * grid.psi_weights[l];
        cross += fvals[k + cols * l] * psi[k + cols * l] * w;
        g_norm += psi[k + cols * l] * psi[k + cols * l] * w;
      }
    if (!(g_norm > 0)) throw ConfigError("overlap_spectrum: zero-norm eigenfunction");
    out.push_back(cross * cross / (f_norm * g_norm));
  }
  return out;
}

}  // namespace spectraldiff::inflation
