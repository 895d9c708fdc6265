#include "spectraldiff/domain.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace spectraldiff {

DomainBox::DomainBox(double lo, double up, int d) : lower(lo), upper(up), dim(d) {
  if (!(up > lo)) throw ConfigError("DomainBox: upper must exceed lower");
  if (d < 1) throw ConfigError("DomainBox: dim must be >= 1");
}

UniformGrid::UniformGrid(DomainBox b, int n) : box(b), n_gr(n) {
  if (n < 1) throw ConfigError("UniformGrid: n_gr must be >= 1");
  total();
}

Index UniformGrid::total() const {
  Index t = 1;
  for (int i = 0; i < box.dim; ++i) {
    if (t > std::numeric_limits<Index>::max() / n_gr)
      throw ConfigError("UniformGrid: n_gr^dim overflows the index type");
    t *= n_gr;
  }
  return t;
}

Vector UniformGrid::point(const MultiIndex& j) const {
  Vector x(box.dim);
  for (int i = 0; i < box.dim; ++i) x[i] = node_coord(j[i]);
  return x;
}

Vector UniformGrid::point(Index K) const { return point(unflatten_index(K, n_gr, box.dim)); }

Index flatten_index(const MultiIndex& j, int n_gr) {
  Index J = 0;
  Index stride = 1;
  for (int i = 0; i < j.size(); ++i) {
    if (j[i] < 0 || j[i] >= n_gr)
      throw ConfigError("flatten_index: component " + std::to_string(i) + " outside [0, n_gr)");
    J += stride * j[i];
    stride *= n_gr;
  }
  return J;
}

MultiIndex unflatten_index(Index K, int n_gr, int dim) {
  Index total = 1;
  for (int i = 0; i < dim; ++i) total *= n_gr;
  if (K < 0 || K >= total) throw ConfigError("unflatten_index: K outside [0, n_gr^dim)");
  MultiIndex j(dim);
  for (int i = 0; i < dim; ++i) {
    j[i] = static_cast<int>(K % n_gr);
    K /= n_gr;
  }
  return j;
}

double grid_norm(const GridVector& v) {
  const double h = v.grid.spacing();
  return std::sqrt(std::pow(h, v.grid.box.dim)) * v.values.norm();
}

GridVector sample_function(const ScalarField& f, const UniformGrid& grid) {
  if (!f) throw ConfigError("sample_function: empty field");
  const Index n = grid.total();
  const int d = grid.box.dim;
  GridVector out{Vector(n), grid};
  MultiIndex j = MultiIndex::Zero(d);
  Vector x(d);
  for (Index K = 0; K < n; ++K) {
    for (int i = 0; i < d; ++i) x[i] = grid.node_coord(j[i]);
    double val = 0;
    try {
      val = f(x);
    } catch (const std::exception& e) {
      throw NumericError("sample_function: evaluation failed at J=" + std::to_string(K) + ": " +
                         e.what());
    }
    if (!std::isfinite(val))
      throw NumericError("sample_function: non-finite value at J=" + std::to_string(K));
    out.values[K] = val;
    for (int i = 0; i < d; ++i) {
      if (++j[i] < grid.n_gr) break;
      j[i] = 0;
    }
  }
  return out;
}

}  // namespace spectraldiff
