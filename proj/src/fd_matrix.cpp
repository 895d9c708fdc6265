#include "spectraldiff/fd_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace spectraldiff {

void OperatorSpec::validate() const {
  if (!a0) throw ConfigError("OperatorSpec: a0 is not set");
  if (static_cast<int>(a.size()) != domain.dim)
    throw ConfigError("OperatorSpec: need one diffusion coefficient per axis");
  for (const auto& ai : a)
    if (!ai) throw ConfigError("OperatorSpec: unset diffusion coefficient");
}

namespace {

std::string point_string(const Vector& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

double eval_field(const ScalarField& f, const Vector& x, const char* what, Index row) {
  double val = 0;
  try {
    val = f(x);
  } catch (const std::exception& e) {
    throw NumericError(std::string("assemble_fd_matrix: ") + what + " failed at row J=" +
                       std::to_string(row) + ", x=" + point_string(x) + ": " + e.what());
  }
  if (!std::isfinite(val))
    throw NumericError(std::string("assemble_fd_matrix: ") + what + " non-finite at row J=" +
                       std::to_string(row) + ", x=" + point_string(x));
  return val;
}

}  // namespace

FDMatrix assemble_fd_matrix(const OperatorSpec& spec, int n_gr, AssemblyReport* report) {
  spec.validate();
  UniformGrid grid(spec.domain, n_gr);
  const int d = spec.domain.dim;
  const Index n_total = grid.total();
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_total) * (2 * d + 1));

  AssemblyReport rep;
  auto note_warning = [&rep](const std::string& msg) {
    if (rep.first_warning.empty()) rep.first_warning = msg;
  };

  MultiIndex j = MultiIndex::Zero(d);
  Vector x(d), xf(d);
  double max_abs = 0.0;

  for (Index J = 0; J < n_total; ++J) {
    for (int i = 0; i < d; ++i) x[i] = grid.node_coord(j[i]);

    // Same accumulation order as entry_oracle: a_0 first, then per-axis flux
    // pairs.  Face coordinates come from UniformGrid::face_coord so that the
    // two rows sharing a face evaluate a_i at bitwise-identical points.
    double diag = eval_field(spec.a0, x, "a0", J);
    if (diag < 0) {
      ++rep.negative_a0_samples;
      note_warning("a0 < 0 at x=" + point_string(x));
    }

    Index stride = 1;
    for (int i = 0; i < d; ++i) {
      xf = x;
      xf[i] = grid.face_coord(j[i]);
      const double a_plus = eval_field(spec.a[i], xf, "a_i", J);
      if (a_plus <= 0) {
        ++rep.nonpositive_diffusion_samples;
        note_warning("a_" + std::to_string(i + 1) + " <= 0 at x=" + point_string(xf));
      }
      xf[i] = grid.face_coord(j[i] - 1);
      const double a_minus = eval_field(spec.a[i], xf, "a_i", J);
      if (a_minus <= 0) {
        ++rep.nonpositive_diffusion_samples;
        note_warning("a_" + std::to_string(i + 1) + " <= 0 at x=" + point_string(xf));
      }

      diag += (a_plus + a_minus) * inv_h2;
      if (j[i] + 1 < n_gr) triplets.emplace_back(J, J + stride, -a_plus * inv_h2);
      if (j[i] >= 1) triplets.emplace_back(J, J - stride, -a_minus * inv_h2);
      max_abs = std::max({max_abs, std::abs(a_plus) * inv_h2, std::abs(a_minus) * inv_h2});
      stride *= n_gr;
    }
    triplets.emplace_back(J, J, diag);
    max_abs = std::max(max_abs, std::abs(diag));

    for (int i = 0; i < d; ++i) {
      if (++j[i] < n_gr) break;
      j[i] = 0;
    }
  }

  FDMatrix out;
  out.grid = grid;
  out.sparsity = 2 * d + 1;
  out.max_abs_entry = max_abs;
  out.mat.resize(n_total, n_total);
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  out.mat.makeCompressed();
  if (report) *report = rep;
  return out;
}

GridVector apply_fd_operator(const FDMatrix& m, const GridVector& v) {
  if (v.values.size() != m.dim())
    throw ConfigError("apply_fd_operator: dimension mismatch");
  if (v.grid.n_gr != m.grid.n_gr || v.grid.box.dim != m.grid.box.dim)
    throw ConfigError("apply_fd_operator: grid mismatch");
  return GridVector{m.mat * v.values, m.grid};
}

void export_fd_matrix_csv(const FDMatrix& m, std::ostream& os) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# n_gr=%d d=%d h=%.17g\n", m.grid.n_gr, m.grid.box.dim,
                m.grid.spacing());
  os << buf << "row,col,value\n";
  for (Index r = 0; r < m.mat.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(m.mat, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      os << buf;
    }
  }
}

}  // namespace spectraldiff
