#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "spectraldiff/errors.hpp"

namespace spectraldiff {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;
using MultiIndex = Eigen::VectorXi;

/// Scalar field on (a subset of) R^d.  Fields must be pure functions:
/// identical arguments yield bitwise-identical values.
using ScalarField = std::function<double(Eigen::Ref<const Vector>)>;

/// Open box (lower, upper)^dim with the same interval on every axis.
struct DomainBox {
  double lower = 0.0;
  double upper = 1.0;
  int dim = 1;

  DomainBox() = default;
  DomainBox(double lo, double up, int d);

  double length() const { return upper - lower; }
};

/// Uniform tensor grid of n_gr interior points per axis with spacing
/// h = (upper - lower) / (n_gr + 1).  Boundary points carry homogeneous
/// Dirichlet values and are not stored.
struct UniformGrid {
  DomainBox box;
  int n_gr = 1;

  UniformGrid() = default;
  UniformGrid(DomainBox b, int n);

  double spacing() const { return box.length() / (n_gr + 1); }
  Index total() const;  // n_gr^dim

  /// Coordinate of interior node j (j in [0, n_gr)) along any axis.
  double node_coord(int j) const { return box.lower + (j + 1) * spacing(); }

  /// Coordinate of the midpoint between node j_low and node j_low + 1.
  /// Valid for j_low = -1 (face adjacent to the lower boundary).
  double face_coord(int j_low) const { return box.lower + (j_low + 1.5) * spacing(); }

  Vector point(const MultiIndex& j) const;
  Vector point(Index K) const;
};

/// Row-major flattening J(j) = sum_i n_gr^(i-1) j_i.
Index flatten_index(const MultiIndex& j, int n_gr);

/// Inverse of flatten_index via the base-n_gr division cascade.
MultiIndex unflatten_index(Index K, int n_gr, int dim);

/// Function values on all interior nodes, in flatten_index order.
struct GridVector {
  Vector values;
  UniformGrid grid;
};

/// sqrt(h^d sum_J v_J^2).  Eigenvectors are normalized to 1 in this norm.
double grid_norm(const GridVector& v);

GridVector sample_function(const ScalarField& f, const UniformGrid& grid);

}  // namespace spectraldiff
