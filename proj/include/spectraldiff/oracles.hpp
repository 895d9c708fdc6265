#pragma once

#include "spectraldiff/fd_matrix.hpp"
#include "spectraldiff/query_ledger.hpp"

namespace spectraldiff {

/// Sentinel returned for structural neighbors outside the grid: i + N_gr.
Index oracle_sentinel(const FDMatrix& m, Index i);

/// Flattened index of the k-th structural neighbor of row i, with k in
/// [1, 2d+1] enumerating the shifts -e_1..-e_d, 0, +e_1..+e_d.  Shifts that
/// leave the grid yield the sentinel.
Index row_oracle(const FDMatrix& m, Index i, int k);

/// Column counterpart; identical table by symmetry of the matrix.
Index col_oracle(const FDMatrix& m, int k, Index i);

/// (L)_{K,K'} recomputed on the fly from the coefficient fields, without
/// reading the assembled storage.  Every call evaluates all 2d+1
/// coefficients (a_0 at the node, a_i at both half-steps) and accounts them
/// in the ledger.
double entry_oracle(const OperatorSpec& spec, const UniformGrid& grid, Index K, Index Kp,
                    QueryLedger* ledger = nullptr);

}  // namespace spectraldiff
