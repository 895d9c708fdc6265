#include "spectraldiff/oracles.hpp"

#include <cmath>
#include <string>

namespace spectraldiff {

Index oracle_sentinel(const FDMatrix& m, Index i) { return i + m.grid.total(); }

Index row_oracle(const FDMatrix& m, Index i, int k) {
  const int d = m.grid.box.dim;
  const int n = m.grid.n_gr;
  if (i < 0 || i >= m.grid.total()) throw ConfigError("row_oracle: row index out of range");
  if (k < 1 || k > 2 * d + 1) throw ConfigError("row_oracle: k outside [1, 2d+1]");

  if (k == d + 1) return i;  // zero shift
  const int axis = (k <= d) ? k - 1 : k - d - 2;
  const int delta = (k <= d) ? -1 : +1;

  MultiIndex j = unflatten_index(i, n, d);
  j[axis] += delta;
  if (j[axis] < 0 || j[axis] >= n) return oracle_sentinel(m, i);
  return flatten_index(j, n);
}

Index col_oracle(const FDMatrix& m, int k, Index i) { return row_oracle(m, i, k); }

double entry_oracle(const OperatorSpec& spec, const UniformGrid& grid, Index K, Index Kp,
                    QueryLedger* ledger) {
  spec.validate();
  const int d = grid.box.dim;
  const int n = grid.n_gr;
  const Index total = grid.total();
  if (K < 0 || K >= total || Kp < 0 || Kp >= total)
    throw ConfigError("entry_oracle: index out of range");

  const MultiIndex jk = unflatten_index(K, n, d);
  const MultiIndex jp = unflatten_index(Kp, n, d);

  // Evaluate all 2d+1 coefficients up front, mirroring the oracle's data
  // flow, then select the entry from the index difference.
  Vector x(d), xf(d);
  for (int i = 0; i < d; ++i) x[i] = grid.node_coord(jk[i]);
  const double a0_val = spec.a0(x);
  Vector a_plus(d), a_minus(d);
  for (int i = 0; i < d; ++i) {
    xf = x;
    xf[i] = grid.face_coord(jk[i]);
    a_plus[i] = spec.a[i](xf);
    xf[i] = grid.face_coord(jk[i] - 1);
    a_minus[i] = spec.a[i](xf);
  }
  if (ledger) {
    ledger->entry_oracle_calls += 1;
    ledger->coefficient_evals += static_cast<std::uint64_t>(2 * d + 1);
  }

  int shift_axis = -1;
  int shift_sign = 0;
  bool diagonal = true;
  for (int i = 0; i < d; ++i) {
    const int diff = jp[i] - jk[i];
    if (diff == 0) continue;
    diagonal = false;
    if ((diff != 1 && diff != -1) || shift_axis >= 0) return 0.0;  // not a unit shift
    shift_axis = i;
    shift_sign = diff;
  }

  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  if (diagonal) {
    double val = a0_val;
    for (int i = 0; i < d; ++i) val += (a_plus[i] + a_minus[i]) * inv_h2;
    return val;
  }
  return (shift_sign > 0 ? -a_plus[shift_axis] : -a_minus[shift_axis]) * inv_h2;
}

}  // namespace spectraldiff
