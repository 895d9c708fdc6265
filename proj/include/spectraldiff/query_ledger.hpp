#pragma once

#include <cstdint>
#include <vector>

namespace spectraldiff {

/// Per-bisection-level trace of the simulated estimator.
struct LevelRecord {
  int level = 0;
  double mu = 0;
  double prob_estimate = 0;  // squared-amplitude estimate used for the decision
  bool below = false;
  std::uint64_t circuit_runs = 0;
  std::uint64_t entry_oracle_calls = 0;
  std::uint64_t row_col_oracle_calls = 0;
  std::uint64_t state_prep_calls = 0;
};

/// Audited counts of oracle uses during a run.  The oracle fields count the
/// logical queries of the simulated algorithm, every repetition included.
/// matvec_count records matrix-vector products actually executed, which can
/// be lower when repeated decisions reuse one computed probability.
struct QueryLedger {
  std::uint64_t entry_oracle_calls = 0;
  std::uint64_t row_col_oracle_calls = 0;
  std::uint64_t state_prep_calls = 0;
  std::uint64_t matvec_count = 0;
  std::uint64_t coefficient_evals = 0;
  std::vector<LevelRecord> levels;

  void merge(const QueryLedger& other) {
    entry_oracle_calls += other.entry_oracle_calls;
    row_col_oracle_calls += other.row_col_oracle_calls;
    state_prep_calls += other.state_prep_calls;
    matvec_count += other.matvec_count;
    coefficient_evals += other.coefficient_evals;
    levels.insert(levels.end(), other.levels.begin(), other.levels.end());
  }
};

}  // namespace spectraldiff
