#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectraldiff/domain.hpp"

namespace spectraldiff {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Coefficients of  -sum_i d/dx_i (a_i d/dx_i) + a_0  on a box.
struct OperatorSpec {
  DomainBox domain;
  ScalarField a0;
  std::vector<ScalarField> a;  // one diffusion coefficient per axis

  void validate() const;
};

/// Coefficient-sign findings collected during assembly.  Nonpositive
/// diffusion samples and negative a_0 are reported, not rejected; the
/// Hermitized inflation operators legitimately produce negative a_0.
struct AssemblyReport {
  Index nonpositive_diffusion_samples = 0;
  Index negative_a0_samples = 0;
  std::string first_warning;
};

/// Sparse symmetric finite-difference discretization plus grid metadata.
struct FDMatrix {
  SparseMat mat;
  UniformGrid grid;
  int sparsity = 0;  // 2d+1
  double max_abs_entry = 0.0;

  Index dim() const { return mat.rows(); }
};

/// Second-order flux-form discretization: diagonal entries
/// sum_i [a_i(x+h/2 e_i)+a_i(x-h/2 e_i)]/h^2 + a_0(x), neighbor entries
/// -a_i(x +- h/2 e_i)/h^2.  Neighbors beyond the boundary are absent
/// (homogeneous Dirichlet).
FDMatrix assemble_fd_matrix(const OperatorSpec& spec, int n_gr, AssemblyReport* report = nullptr);

GridVector apply_fd_operator(const FDMatrix& m, const GridVector& v);

/// Triplet CSV preceded by a `# n_gr=.. d=.. h=..` metadata line.
void export_fd_matrix_csv(const FDMatrix& m, std::ostream& os);

}  // namespace spectraldiff
