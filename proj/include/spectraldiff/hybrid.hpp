#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "spectraldiff/inflation.hpp"

namespace spectraldiff::inflation {

using spectraldiff::Index;

/// Tensor grid for the two-field model: linear spacing inside the
/// high-stochasticity window, log spacing outside, antisymmetric in psi.
/// Node lists include the boundary endpoints (Dirichlet rows are dropped
/// from the assembled operator).  Cell weights are forward differences
/// Delta_k = node[k+1] - node[k], with the last weight zero.
struct NonuniformGrid2D {
  std::vector<double> phi_nodes;
  std::vector<double> psi_nodes;
  std::vector<double> phi_weights;
  std::vector<double> psi_weights;

  double phi_sto_plus = 0, phi_sto_minus = 0;
  double psi_sto_plus = 0, psi_sto_minus = 0;
  double phi_min = 0, phi_max = 0, psi_min = 0, psi_max = 0;
};

/// Builds the grid for a hybrid model.  Thresholds come from bisection:
/// the stochasticity parameter reaching 0.1 fixes the window, the
/// psi second-slow-roll parameter reaching 1 fixes the psi endpoints, and
/// |phi - phi_c| <= beta^{-1/3} mpl fixes the phi endpoints.  Node counts
/// scale as ceil(1000 s) linear plus 2 ceil(500 s) log-spaced per axis.
NonuniformGrid2D build_hybrid_grid(const PotentialModel& model, double resolution_scale);

/// Conservative flux-form discretization on the nonuniform grid, assembled
/// directly in the cell-weighted inner product so the stored matrix is
/// symmetric.  Interior unknowns exclude the outermost node lines.
struct FPNonuniformOperator {
  Eigen::SparseMatrix<double> sym;     // weighted-symmetrized matrix
  std::vector<double> sqrt_cell;       // sqrt(cell_phi * cell_psi) per unknown
  NonuniformGrid2D grid;
  Index n_phi_interior = 0;
  Index n_psi_interior = 0;

  Index unknowns() const { return n_phi_interior * n_psi_interior; }

  /// Scatter a symmetrized eigenvector to node values on the full grid
  /// (boundary lines zero), undoing the W^{1/2} scaling.
  std::vector<double> node_values(const Vector& sym_vector) const;
};

FPNonuniformOperator assemble_fp_matrix_nonuniform(const HermitizedCoefficients& coeffs,
                                                   const NonuniformGrid2D& grid);

/// Gaussian test function of the hybrid model, centered at (phi_c, 0) with
/// widths set by the stochasticity window (unnormalized).
std::function<double(double, double)> hybrid_test_function(const PotentialModel& model,
                                                           const NonuniformGrid2D& grid);

/// Squared overlaps |sum f g w|^2 / (sum f^2 w * sum g^2 w) with the
/// forward-difference weights w = Delta_phi_k Delta_psi_l, for the first
/// count eigenfunctions given as full node-value arrays.
std::vector<double> overlap_spectrum(const std::function<double(double, double)>& test,
                                     const std::vector<std::vector<double>>& eigenfunctions,
                                     const NonuniformGrid2D& grid, int count);

}  // namespace spectraldiff::inflation
