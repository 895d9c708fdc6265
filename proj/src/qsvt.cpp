#include "spectraldiff/qsvt.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "spectraldiff/detail/rng.hpp"

namespace spectraldiff {

double eta(double x) {
  if (!(x > 0) || !(x < 1)) throw ConfigError("eta: argument outside (0, 1)");
  const double x2 = x * x;
  return 0.5 * (x2 + std::sqrt(4.0 - 5.0 * x2 + x2 * x2));
}

int select_grid_size(double eps, double gamma, double c1, double d1, const DomainBox& box) {
  if (!(eps > 0)) throw ConfigError("select_grid_size: eps must be > 0");
  if (!(gamma > 0) || !(gamma < 1))
    throw ConfigError("select_grid_size: gamma outside (0, 1)");
  if (c1 < 0 || d1 < 0) throw ConfigError("select_grid_size: constants must be >= 0");

  const double branch1 = std::sqrt(2.0 * c1 / eps);
  const double branch2 =
      std::sqrt(2.0 * d1 / (1.0 - eta(gamma))) * std::pow(box.length(), box.dim / 4.0);
  const double n = std::ceil(std::max(branch1, branch2));
  if (!(n < 2e9)) throw ConfigError("select_grid_size: requested grid size overflows int");
  return std::max(1, static_cast<int>(n));
}

void EstimatorConfig::validate() const {
  if (!(eps > 0)) throw ConfigError("EstimatorConfig: eps must be > 0");
  if (!(delta > 0) || !(delta < 1)) throw ConfigError("EstimatorConfig: delta outside (0, 1)");
  if (!(gamma > 0) || !(gamma < 1)) throw ConfigError("EstimatorConfig: gamma outside (0, 1)");
  if (degree_cap < 32) throw ConfigError("EstimatorConfig: degree_cap too small");
}

SymOperator as_operator(const FDMatrix& m) {
  SymOperator op;
  op.mat = &m.mat;
  op.sparsity = m.sparsity;
  op.max_abs_entry = m.max_abs_entry;
  op.coeff_evals_per_entry = 2 * m.grid.box.dim + 1;
  return op;
}

namespace {

// One block-encoding use per Chebyshev step; each use queries the row and
// column oracles once and the entry oracle twice.
void account_circuits(const SymOperator& H, const StepPolynomial& poly, std::uint64_t runs,
                      QueryLedger* ledger) {
  if (!ledger || runs == 0) return;
  const std::uint64_t uses = static_cast<std::uint64_t>(poly.degree) * runs;
  ledger->row_col_oracle_calls += 2 * uses;
  ledger->entry_oracle_calls += 2 * uses;
  ledger->coefficient_evals += static_cast<std::uint64_t>(H.coeff_evals_per_entry) * 2 * uses;
}

double exact_success_amplitude(const SymOperator& H, double mu, const StepPolynomial& poly,
                               const Vector& phi1, QueryLedger* ledger, ProjCache* cache) {
  if (cache) {
    const auto key = std::bit_cast<std::uint64_t>(mu);
    if (auto it = cache->amplitude.find(key); it != cache->amplitude.end()) {
      account_circuits(H, poly, 1, ledger);
      return it->second;
    }
    const double amp =
        apply_matrix_polynomial(H, mu, H.alpha() + std::abs(mu), poly, phi1, ledger).norm();
    cache->amplitude.emplace(key, amp);
    return amp;
  }
  return apply_matrix_polynomial(H, mu, H.alpha() + std::abs(mu), poly, phi1, ledger).norm();
}

}  // namespace

Vector apply_matrix_polynomial(const SymOperator& H, double shift, double scale,
                               const StepPolynomial& poly, const Vector& v,
                               QueryLedger* ledger) {
  if (!H.mat) throw ConfigError("apply_matrix_polynomial: empty operator");
  if (H.mat->rows() != v.size()) throw ConfigError("apply_matrix_polynomial: dimension mismatch");
  if (!(scale > 0)) throw ConfigError("apply_matrix_polynomial: scale must be > 0");

  const auto& coeffs = poly.chebyshev_coeffs;
  if (coeffs.empty()) return Vector::Zero(v.size());

  const double inv_scale = 1.0 / scale;
  Vector t_prev = v;
  Vector acc = coeffs[0] * v;
  if (poly.degree >= 1 && coeffs.size() >= 2) {
    Vector t_cur = (*H.mat * v - shift * v) * inv_scale;
    acc += coeffs[1] * t_cur;
    for (std::size_t k = 2; k < coeffs.size(); ++k) {
      Vector t_next = 2.0 * ((*H.mat * t_cur - shift * t_cur) * inv_scale) - t_prev;
      acc += coeffs[k] * t_next;
      t_prev = std::move(t_cur);
      t_cur = std::move(t_next);
    }
  }
  if (ledger) {
    ledger->matvec_count += static_cast<std::uint64_t>(poly.degree);
    account_circuits(H, poly, 1, ledger);
  }
  return acc;
}

double proj_success_probability(const SymOperator& H, double mu, const EstimatorConfig& config,
                                const StepPolynomial& poly, const Vector& phi1,
                                QueryLedger* ledger, std::mt19937_64* rng, ProjCache* cache) {
  const double amp = exact_success_amplitude(H, mu, poly, phi1, ledger, cache);
  if (ledger) ledger->state_prep_calls += 1;
  if (config.sampling == EstimatorConfig::Sampling::Exact) return amp;

  std::uint64_t shots = config.shots ? config.shots : 1;
  std::mt19937_64 local(config.seed);
  std::mt19937_64* gen = rng ? rng : &local;
  const double p = std::min(1.0, amp * amp);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    if (detail::uniform01(*gen) <= p) ++hits;
  if (ledger && shots > 1) {
    account_circuits(H, poly, shots - 1, ledger);
    ledger->state_prep_calls += shots - 1;
  }
  return static_cast<double>(hits) / static_cast<double>(shots);
}

Decision fuzzy_bisection_decision(double prob_estimate, double gamma, double eps_prime) {
  const double keep = (gamma - 0.5 * eps_prime) * (gamma - 0.5 * eps_prime);
  const double drop = (0.5 * eps_prime) * (0.5 * eps_prime);
  const double threshold = 0.5 * (keep + drop);
  return prob_estimate >= threshold ? Decision::Below : Decision::Above;
}

EstEigResult est_eig(const SymOperator& H, const Vector& trial, const EstimatorConfig& config,
                     ProjCache* cache) {
  config.validate();
  if (!H.mat) throw ConfigError("est_eig: empty operator");
  const double alpha = H.alpha();
  if (!(alpha > 0)) throw ConfigError("est_eig: alpha = s ||H||_max must be > 0");
  if (trial.size() != H.mat->rows()) throw ConfigError("est_eig: trial dimension mismatch");
  const double trial_norm = trial.norm();
  if (!(trial_norm > 0)) throw ConfigError("est_eig: zero trial vector");
  Vector phi1 = trial / trial_norm;

  // Effective overlap floor gamma/2; the filter resolves half the target
  // accuracy so the final interval midpoint lands within eps.
  const double g_floor = 0.5 * config.gamma;
  const double eps_prime = 0.5 * g_floor;
  const double eps_level = 0.5 * config.eps;

  EstEigResult out;
  StepPolynomial poly = build_step_polynomial(alpha, eps_level, eps_prime, config.degree_cap);
  out.poly_degree = poly.degree;
  out.block.alpha = alpha;
  out.block.a_qubits = static_cast<int>(std::ceil(std::log2(std::max<Index>(2, H.mat->rows())))) + 3;
  out.block.eps_tilde = std::pow(eps_prime / (8.0 * poly.degree), 2) * alpha;

  const int levels =
      std::max(1, static_cast<int>(std::ceil(std::log2(2.0 * alpha / eps_level))));
  out.levels = levels;
  const std::uint64_t shots =
      config.shots ? config.shots
                   : static_cast<std::uint64_t>(std::ceil(
                         8.0 * std::log(static_cast<double>(levels) / config.delta) /
                         (config.gamma * config.gamma)));
  out.shots_per_level = config.sampling == EstimatorConfig::Sampling::Bernoulli ? shots : 1;

  EstimatorConfig level_cfg = config;
  level_cfg.shots = out.shots_per_level;

  std::mt19937_64 rng(config.seed);
  double lo = -alpha, hi = alpha;
  for (int level = 1; level <= levels; ++level) {
    const double mu = 0.5 * (lo + hi);
    QueryLedger before = out.ledger;
    const double est = proj_success_probability(H, mu, level_cfg, poly, phi1, &out.ledger, &rng,
                                                cache);
    const double est_sq =
        config.sampling == EstimatorConfig::Sampling::Exact ? est * est : est;
    if (!std::isfinite(est_sq)) {
      std::ostringstream msg;
      msg << "est_eig: non-finite probability estimate at level " << level << ", mu=" << mu
          << ", interval [" << lo << ", " << hi << "]";
      throw EstimatorError(msg.str());
    }
    const Decision dec = fuzzy_bisection_decision(est_sq, g_floor, eps_prime);
    if (dec == Decision::Below) {
      hi = std::min(hi, mu + eps_level);
    } else {
      lo = std::max(lo, mu - eps_level);
    }
    if (!(hi >= lo)) {
      std::ostringstream msg;
      msg << "est_eig: interval collapsed at level " << level << " (lo=" << lo << ", hi=" << hi
          << "); estimate=" << est_sq;
      throw EstimatorError(msg.str());
    }

    LevelRecord rec;
    rec.level = level;
    rec.mu = mu;
    rec.prob_estimate = est_sq;
    rec.below = dec == Decision::Below;
    rec.circuit_runs = out.shots_per_level;
    rec.entry_oracle_calls = out.ledger.entry_oracle_calls - before.entry_oracle_calls;
    rec.row_col_oracle_calls = out.ledger.row_col_oracle_calls - before.row_col_oracle_calls;
    rec.state_prep_calls = out.ledger.state_prep_calls - before.state_prep_calls;
    out.ledger.levels.push_back(rec);
  }
  out.lambda_hat = 0.5 * (lo + hi);
  return out;
}

EstEigResult est_eig(const FDMatrix& H, const GridVector& trial, const EstimatorConfig& config,
                     ProjCache* cache) {
  return est_eig(as_operator(H), trial.values, config, cache);
}

EndToEndResult end_to_end_estimate(const OperatorSpec& spec, const ScalarField& trial_field,
                                   const EstimatorConfig& config, double c1, double d1) {
  config.validate();
  const int n_raw = select_grid_size(config.eps, config.gamma, c1, d1, spec.domain);
  const int n_gr = std::max(3, n_raw);

  FDMatrix matrix = assemble_fd_matrix(spec, n_gr);
  GridVector trial = sample_function(trial_field, matrix.grid);

  EstimatorConfig half = config;
  half.eps = 0.5 * config.eps;
  EstEigResult detail = est_eig(matrix, trial, half);

  EndToEndResult out;
  out.lambda_hat = detail.lambda_hat;
  out.n_gr = n_gr;
  out.ledger = detail.ledger;
  out.detail = std::move(detail);
  return out;
}

}  // namespace spectraldiff
