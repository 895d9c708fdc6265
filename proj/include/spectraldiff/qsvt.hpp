#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>

#include "spectraldiff/fd_matrix.hpp"
#include "spectraldiff/query_ledger.hpp"
#include "spectraldiff/step_polynomial.hpp"

namespace spectraldiff {

/// eta(x) = (x^2 + sqrt(4 - 5x^2 + x^4)) / 2 on (0, 1); decreasing from 1
/// toward 1/2.
double eta(double x);

/// Grid size guaranteeing that discretization and eigenvector drift both
/// stay inside the accuracy budget:
/// ceil(max{ sqrt(2 C1/eps), sqrt(2 D1/(1 - eta(gamma))) (U-L)^{d/4} }).
int select_grid_size(double eps, double gamma, double c1, double d1, const DomainBox& box);

struct EstimatorConfig {
  double eps = 0.1;
  double delta = 0.05;
  double gamma = 0.5;
  enum class Sampling { Exact, Bernoulli } sampling = Sampling::Exact;
  std::uint64_t shots = 0;  // 0 = auto: ceil(8 log(levels/delta) / gamma^2)
  std::uint64_t seed = 0;
  double c1 = 0.0;  // eigenvalue convergence constant (end-to-end runs)
  double d1 = 0.0;  // eigenvector convergence constant
  int degree_cap = kDefaultDegreeCap;

  void validate() const;
};

/// Block-encoding bookkeeping: normalization alpha = s ||H||_max, the
/// ancilla-count formula, and the entrywise tolerance budget
/// eps_tilde = (eps'/(8 deg))^2 alpha.
struct BlockEncodingParams {
  double alpha = 0;
  int a_qubits = 0;
  double eps_tilde = 0;
};

/// Handle for a symmetric matrix exposed through sparse-access oracles.
struct SymOperator {
  const SparseMat* mat = nullptr;
  int sparsity = 0;
  double max_abs_entry = 0;
  int coeff_evals_per_entry = 0;  // 2d+1 when backed by coefficient fields

  double alpha() const { return sparsity * max_abs_entry; }
};

SymOperator as_operator(const FDMatrix& m);

/// S((H - shift I)/scale) v via the Chebyshev three-term recurrence.
/// Accounts one block-encoding use per Chebyshev step: degree matvecs,
/// 2*degree row/column queries, 2*degree entry queries.
Vector apply_matrix_polynomial(const SymOperator& H, double shift, double scale,
                               const StepPolynomial& poly, const Vector& v,
                               QueryLedger* ledger = nullptr);

/// Memoizes exact success amplitudes per bisection midpoint so that batch
/// runs over seeds share the numeric work.  Ledgers still count every
/// logical query.
struct ProjCache {
  std::unordered_map<std::uint64_t, double> amplitude;
};

/// ||S((H - mu I)/(alpha + |mu|)) phi1||_2 in exact mode, or the mean of
/// `shots` Bernoulli draws of its square in sampling mode.
double proj_success_probability(const SymOperator& H, double mu, const EstimatorConfig& config,
                                const StepPolynomial& poly, const Vector& phi1,
                                QueryLedger* ledger, std::mt19937_64* rng = nullptr,
                                ProjCache* cache = nullptr);

enum class Decision { Below, Above };

/// Squared-amplitude threshold test: Below when the estimate reaches the
/// midpoint of (gamma - eps'/2)^2 and (eps'/2)^2; ties resolve to Below.
Decision fuzzy_bisection_decision(double prob_estimate, double gamma, double eps_prime);

struct EstEigResult {
  double lambda_hat = 0;
  QueryLedger ledger;
  BlockEncodingParams block;
  int poly_degree = 0;
  int levels = 0;
  std::uint64_t shots_per_level = 0;
};

/// Fuzzy-bisection estimate of the smallest eigenvalue: the search interval
/// starts at [-alpha, alpha] and each level queries the step-polynomial
/// filter at the midpoint.  The trial vector is assumed to overlap the
/// ground vector with amplitude >= gamma/2.
EstEigResult est_eig(const SymOperator& H, const Vector& trial, const EstimatorConfig& config,
                     ProjCache* cache = nullptr);
EstEigResult est_eig(const FDMatrix& H, const GridVector& trial, const EstimatorConfig& config,
                     ProjCache* cache = nullptr);

struct EndToEndResult {
  double lambda_hat = 0;
  int n_gr = 0;
  QueryLedger ledger;
  EstEigResult detail;
};

/// Full pipeline: pick n_gr from the convergence constants (minimum 3),
/// assemble, sample the trial field, and run est_eig at half the accuracy
/// budget; the other half covers discretization error.
EndToEndResult end_to_end_estimate(const OperatorSpec& spec, const ScalarField& trial_field,
                                   const EstimatorConfig& config, double c1, double d1);

}  // namespace spectraldiff
