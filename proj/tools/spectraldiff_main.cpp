#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "spectraldiff/eigensolve.hpp"
#include "spectraldiff/hybrid.hpp"
#include "spectraldiff/io.hpp"
#include "spectraldiff/oracles.hpp"
#include "spectraldiff/qsvt.hpp"

namespace fs = std::filesystem;
using namespace spectraldiff;
using spectraldiff::io::fmt17;
using spectraldiff::io::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

int thread_budget() {
  const char* env = std::getenv("SPECTRALDIFF_THREADS");
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (!env) return hw;
  const int n = std::atoi(env);
  return n > 0 ? std::min(n, hw) : hw;
}

void emit_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                   std::uint64_t seed, const std::vector<fs::path>& files, double seconds) {
  std::vector<io::ManifestOutput> outputs;
  for (const auto& f : files) outputs.push_back(io::hash_output(out_dir, f));
  const json manifest = io::make_manifest(command, config, seed, outputs, seconds);
  io::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

double linear_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------- eig-fd --

int cmd_eig_fd(const fs::path& spec_file, int n_gr, int k, const fs::path& out_dir) {
  Timer timer;
  const json spec_json = io::load_json_file(spec_file);
  const OperatorSpec spec = io::operator_spec_from_json(spec_json);
  if (n_gr < 1) throw ConfigError("eig-fd: --n-gr must be >= 1");
  if (k < 0) throw ConfigError("eig-fd: --k must be >= 0");

  AssemblyReport report;
  const FDMatrix matrix = assemble_fd_matrix(spec, n_gr, &report);
  if (!report.first_warning.empty())
    std::cerr << "warning: " << report.first_warning << " ("
              << report.nonpositive_diffusion_samples << " nonpositive diffusion samples, "
              << report.negative_a0_samples << " negative a0 samples)\n";

  EigenResult result;
  if (k > 0) {
    if (matrix.dim() <= kDenseCap) {
      result = dense_smallest_eigs(matrix, k);
    } else {
      result = shift_invert_smallest_eigs(matrix.mat, k);
      grid_normalize(result, matrix.grid);
    }
  }

  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  files.push_back(out_dir / "eigenvalues.csv");
  io::write_eigenvalues_csv(files.back(), result);
  for (std::size_t i = 0; i < result.eigenvectors.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "eigvec_%04zu.csv", i + 1);
    files.push_back(out_dir / name);
    io::write_eigenvector_csv(files.back(), GridVector{result.eigenvectors[i], matrix.grid});
  }

  json config = {{"spec", spec_json}, {"n_gr", n_gr}, {"k", k}};
  emit_manifest(out_dir, "eig-fd", config, 0, files, timer.seconds());
  return 0;
}

// -------------------------------------------------------------- eig-qsim --

int cmd_eig_qsim(const fs::path& spec_file, const fs::path& config_file, const json& trial_json,
                 int n_gr_flag, int batch_seeds, std::int64_t seed_flag, const fs::path& out_dir) {
  Timer timer;
  const json spec_json = io::load_json_file(spec_file);
  const json config_json = io::load_json_file(config_file);
  const OperatorSpec spec = io::operator_spec_from_json(spec_json);
  EstimatorConfig config = io::estimator_config_from_json(config_json);
  if (seed_flag >= 0) config.seed = static_cast<std::uint64_t>(seed_flag);

  fs::create_directories(out_dir);
  std::vector<fs::path> files;

  const bool end_to_end = n_gr_flag <= 0;
  FDMatrix matrix;
  int n_gr_used = n_gr_flag;
  if (end_to_end) {
    if (!(config.c1 > 0))
      throw ConfigError("eig-qsim: end-to-end mode needs C1 (and optionally D1) in the config; "
                        "pass --n-gr to run on a fixed grid instead");
    n_gr_used = std::max(3, select_grid_size(config.eps, config.gamma, config.c1, config.d1,
                                             spec.domain));
  }
  matrix = assemble_fd_matrix(spec, n_gr_used);

  GridVector trial;
  if (io::is_values_trial(trial_json)) {
    const auto vals = io::trial_values_from_json(trial_json);
    if (static_cast<Index>(vals.size()) != matrix.dim())
      throw ConfigError("eig-qsim: trial values length does not match N_gr");
    trial.values = Eigen::Map<const Vector>(vals.data(), vals.size());
    trial.grid = matrix.grid;
  } else {
    trial = sample_function(io::gaussian_trial_from_json(trial_json, spec.domain), matrix.grid);
  }

  EstimatorConfig run_cfg = config;
  if (end_to_end) run_cfg.eps = 0.5 * config.eps;

  // Reference eigenvalue for the batch success statistic.
  double lambda_ref = std::numeric_limits<double>::quiet_NaN();
  if (matrix.dim() <= kDenseCap) lambda_ref = dense_smallest_eigs(matrix, 1).eigenvalues[0];

  ProjCache cache;
  std::mutex cache_mutex;
  struct SeedResult {
    double lambda_hat = 0;
    QueryLedger ledger;
  };
  const int n_seeds = std::max(1, batch_seeds);
  std::vector<SeedResult> results(n_seeds);

  auto run_seed = [&](int idx) {
    EstimatorConfig cfg = run_cfg;
    cfg.seed = config.seed + static_cast<std::uint64_t>(idx);
    // The cache is shared across seeds; amplitudes depend only on mu.
    ProjCache local;
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      local = cache;
    }
    EstEigResult r = est_eig(matrix, trial, cfg, &local);
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      cache.amplitude.insert(local.amplitude.begin(), local.amplitude.end());
    }
    results[idx] = SeedResult{r.lambda_hat, std::move(r.ledger)};
  };

  const int workers = std::min(thread_budget(), n_seeds);
  if (workers <= 1 || n_seeds == 1) {
    for (int i = 0; i < n_seeds; ++i) run_seed(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_seeds; i = next.fetch_add(1)) run_seed(i);
      });
    for (auto& t : pool) t.join();
  }

  QueryLedger total;
  std::string batch_csv = "seed,lambda_hat,abs_error\n";
  int successes = 0;
  for (int i = 0; i < n_seeds; ++i) {
    const double err = std::isnan(lambda_ref)
                           ? std::numeric_limits<double>::quiet_NaN()
                           : std::abs(results[i].lambda_hat - lambda_ref);
    if (!std::isnan(err) && err <= run_cfg.eps * (end_to_end ? 2.0 : 1.0)) ++successes;
    batch_csv += std::to_string(config.seed + i) + "," + fmt17(results[i].lambda_hat) + "," +
                 fmt17(err) + "\n";
    total.merge(results[i].ledger);
  }

  files.push_back(out_dir / "estimate.json");
  json estimate = {{"lambda_hat", results[0].lambda_hat},
                   {"n_gr", n_gr_used},
                   {"eps", config.eps},
                   {"mode", end_to_end ? "end-to-end" : "fixed-grid"},
                   {"seeds", n_seeds}};
  if (!std::isnan(lambda_ref)) {
    estimate["lambda_ref_dense"] = lambda_ref;
    estimate["success_rate"] = static_cast<double>(successes) / n_seeds;
  }
  io::write_text_file(files.back(), estimate.dump(2) + "\n");

  files.push_back(out_dir / "ledger.json");
  io::write_text_file(files.back(), io::ledger_to_json(total).dump(2) + "\n");

  if (n_seeds > 1) {
    files.push_back(out_dir / "batch.csv");
    io::write_text_file(files.back(), batch_csv);
  }

  json config_out = {{"spec", spec_json}, {"estimator", config_json}, {"trial", trial_json},
                     {"n_gr", n_gr_used}, {"batch_seeds", n_seeds}};
  emit_manifest(out_dir, "eig-qsim", config_out, config.seed, files, timer.seconds());
  return 0;
}

// ----------------------------------------------------------- well-overlap --

int cmd_well_overlap(const std::string& variant_name, double r_min, double r_max, int steps,
                     int n_max, const fs::path& out_dir) {
  Timer timer;
  if (!(r_min > 0) || !(r_max > r_min)) throw ConfigError("well-overlap: bad r range");
  if (steps < 2 || n_max < 1) throw ConfigError("well-overlap: bad steps / n-max");

  inflation::TestFunctionVariant variant;
  if (variant_name == "hilltop") {
    variant = inflation::TestFunctionVariant::Hilltop;
  } else if (variant_name == "inflection") {
    variant = inflation::TestFunctionVariant::Inflection;
  } else {
    throw ConfigError("well-overlap: variant must be hilltop or inflection");
  }

  std::string csv = "r,n,overlap_sq\n";
  double best_r = r_min, best_sq = -1;
  for (int s = 0; s < steps; ++s) {
    const double r = r_min + (r_max - r_min) * s / (steps - 1);
    for (int n = 1; n <= n_max; ++n) {
      const double ov = inflation::analytic_well_overlap(variant, n, r);
      const double sq = ov * ov;
      csv += fmt17(r) + "," + std::to_string(n) + "," + fmt17(sq) + "\n";
      if (n == 1 && sq > best_sq) {
        best_sq = sq;
        best_r = r;
      }
    }
  }

  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  files.push_back(out_dir / "overlap_sweep.csv");
  io::write_text_file(files.back(), csv);
  files.push_back(out_dir / "argmax.csv");
  io::write_text_file(files.back(),
                      "r,n,overlap_sq\n" + fmt17(best_r) + ",1," + fmt17(best_sq) + "\n");

  json config = {{"variant", variant_name}, {"r_min", r_min}, {"r_max", r_max},
                 {"steps", steps},          {"n_max", n_max}};
  emit_manifest(out_dir, "well-overlap", config, 0, files, timer.seconds());
  return 0;
}

// ----------------------------------------------------------------- hybrid --

int cmd_hybrid(const fs::path& model_file, double scale, int k, const fs::path& out_dir) {
  Timer timer;
  const json model_json = io::load_json_file(model_file);
  const inflation::PotentialModel model = io::potential_model_from_json(model_json);
  if (model.kind != inflation::PotentialKind::Hybrid)
    throw ConfigError("hybrid: model file must describe a hybrid potential");
  if (k < 1) throw ConfigError("hybrid: --k must be >= 1");

  const inflation::NonuniformGrid2D grid = inflation::build_hybrid_grid(model, scale);
  const auto coeffs =
      inflation::hermitized_coefficients(inflation::reduced_potential(model), model.mpl);
  const auto op = inflation::assemble_fp_matrix_nonuniform(coeffs, grid);

  EigenResult eig = shift_invert_smallest_eigs(op.sym, k);
  std::vector<std::vector<double>> eigenfunctions;
  for (const auto& v : eig.eigenvectors) eigenfunctions.push_back(op.node_values(v));

  const auto test = inflation::hybrid_test_function(model, grid);
  const auto overlaps = inflation::overlap_spectrum(test, eigenfunctions, grid, k);

  fs::create_directories(out_dir);
  std::vector<fs::path> files;

  {
    std::string csv = "n,Lambda_n,residual\n";
    for (int n = 0; n < k; ++n)
      csv += std::to_string(n + 1) + "," + fmt17(eig.eigenvalues[n]) + "," +
             fmt17(eig.residuals[n]) + "\n";
    files.push_back(out_dir / "eigenvalues.csv");
    io::write_text_file(files.back(), csv);
  }
  {
    std::string csv = "n,overlap_sq\n";
    for (int n = 0; n < k; ++n)
      csv += std::to_string(n + 1) + "," + fmt17(overlaps[n]) + "\n";
    files.push_back(out_dir / "overlaps.csv");
    io::write_text_file(files.back(), csv);
  }
  for (int n = 0; n < std::min(k, 4); ++n) {
    std::string csv = "phi,psi,value\n";
    const auto& vals = eigenfunctions[n];
    const std::size_t cols = grid.phi_nodes.size();
    for (std::size_t l = 0; l < grid.psi_nodes.size(); ++l)
      for (std::size_t c = 0; c < cols; ++c)
        csv += fmt17(grid.phi_nodes[c]) + "," + fmt17(grid.psi_nodes[l]) + "," +
               fmt17(vals[c + cols * l]) + "\n";
    char name[32];
    std::snprintf(name, sizeof name, "eigenfunction_%02d.csv", n + 1);
    files.push_back(out_dir / name);
    io::write_text_file(files.back(), csv);
  }
  {
    json thresholds = {{"phi_min", grid.phi_min},
                       {"phi_max", grid.phi_max},
                       {"psi_min", grid.psi_min},
                       {"psi_max", grid.psi_max},
                       {"phi_sto_plus", grid.phi_sto_plus},
                       {"phi_sto_minus", grid.phi_sto_minus},
                       {"psi_sto_plus", grid.psi_sto_plus},
                       {"psi_sto_minus", grid.psi_sto_minus},
                       {"phi_nodes", grid.phi_nodes.size()},
                       {"psi_nodes", grid.psi_nodes.size()}};
    files.push_back(out_dir / "grid.json");
    io::write_text_file(files.back(), thresholds.dump(2) + "\n");
  }

  json config = {{"model", model_json}, {"scale", scale}, {"k", k}};
  emit_manifest(out_dir, "hybrid", config, 0, files, timer.seconds());
  return 0;
}

// ------------------------------------------------------- complexity-sweep --

int cmd_complexity_sweep(const fs::path& spec_file, const fs::path& config_file,
                         const std::vector<double>& eps_list, int n_gr_fixed,
                         const std::string& mode, const fs::path& out_dir) {
  Timer timer;
  if (eps_list.size() < 3) throw ConfigError("complexity-sweep: need at least 3 eps values");
  for (double e : eps_list)
    if (!(e > 0)) throw ConfigError("complexity-sweep: eps values must be > 0");

  const json spec_json = io::load_json_file(spec_file);
  const json config_json = io::load_json_file(config_file);
  const OperatorSpec spec = io::operator_spec_from_json(spec_json);
  EstimatorConfig base = io::estimator_config_from_json(config_json);
  base.sampling = EstimatorConfig::Sampling::Exact;  // deterministic counts

  const bool run_fixed = mode == "fixed" || mode == "both";
  const bool run_e2e = mode == "end-to-end" || mode == "both";
  if (!run_fixed && !run_e2e)
    throw ConfigError("complexity-sweep: mode must be fixed, end-to-end, or both");
  if (run_e2e && !(base.c1 > 0))
    throw ConfigError("complexity-sweep: end-to-end mode needs C1 in the config");

  std::string csv = "mode,eps,entry_oracle_calls,row_col_oracle_calls,state_prep_calls,"
                    "matvec_count,n_gr,lambda_hat\n";
  std::vector<double> fixed_x, fixed_y, e2e_x, e2e_y;

  if (run_fixed) {
    const FDMatrix matrix = assemble_fd_matrix(spec, n_gr_fixed);
    const ScalarField trial_field = io::gaussian_trial_from_json(json::object(), spec.domain);
    const GridVector trial = sample_function(trial_field, matrix.grid);
    for (double eps : eps_list) {
      EstimatorConfig cfg = base;
      cfg.eps = eps;
      const EstEigResult r = est_eig(matrix, trial, cfg);
      csv += "fixed," + fmt17(eps) + "," + std::to_string(r.ledger.entry_oracle_calls) + "," +
             std::to_string(r.ledger.row_col_oracle_calls) + "," +
             std::to_string(r.ledger.state_prep_calls) + "," +
             std::to_string(r.ledger.matvec_count) + "," + std::to_string(n_gr_fixed) + "," +
             fmt17(r.lambda_hat) + "\n";
      fixed_x.push_back(std::log(1.0 / eps));
      fixed_y.push_back(std::log(static_cast<double>(r.ledger.entry_oracle_calls)));
    }
  }
  if (run_e2e) {
    const ScalarField trial_field = io::gaussian_trial_from_json(json::object(), spec.domain);
    for (double eps : eps_list) {
      EstimatorConfig cfg = base;
      cfg.eps = eps;
      const EndToEndResult r = end_to_end_estimate(spec, trial_field, cfg, base.c1, base.d1);
      csv += "end-to-end," + fmt17(eps) + "," + std::to_string(r.ledger.entry_oracle_calls) +
             "," + std::to_string(r.ledger.row_col_oracle_calls) + "," +
             std::to_string(r.ledger.state_prep_calls) + "," +
             std::to_string(r.ledger.matvec_count) + "," + std::to_string(r.n_gr) + "," +
             fmt17(r.lambda_hat) + "\n";
      e2e_x.push_back(std::log(1.0 / eps));
      e2e_y.push_back(std::log(static_cast<double>(r.ledger.entry_oracle_calls)));
    }
  }

  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  files.push_back(out_dir / "sweep.csv");
  io::write_text_file(files.back(), csv);

  json slopes = json::object();
  if (run_fixed) slopes["fixed_matrix_slope"] = linear_slope(fixed_x, fixed_y);
  if (run_e2e) slopes["end_to_end_slope"] = linear_slope(e2e_x, e2e_y);
  files.push_back(out_dir / "slopes.json");
  io::write_text_file(files.back(), slopes.dump(2) + "\n");

  json config = {{"spec", spec_json},     {"estimator", config_json}, {"eps_list", eps_list},
                 {"n_gr", n_gr_fixed},    {"mode", mode}};
  emit_manifest(out_dir, "complexity-sweep", config, base.seed, files, timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference eigenvalue estimation with a simulated "
               "QSVT-style quantum estimator and query accounting"};
  app.require_subcommand(1);

  std::string spec_file, config_file, model_file, trial_file;
  std::string out_dir = "out";
  std::string variant = "hilltop", sweep_mode = "both", eps_list_str;
  int n_gr = 31, k = 6, steps = 200, n_max = 9, batch_seeds = 1;
  std::int64_t seed_flag = -1;
  double scale = 0.1, r_min = 0.1, r_max = 2.0;

  auto* fd = app.add_subcommand("eig-fd", "Assemble and solve classically");
  fd->add_option("--spec", spec_file, "Operator spec JSON")->required();
  fd->add_option("--n-gr", n_gr, "Interior grid points per axis")->required();
  fd->add_option("--k", k, "Number of eigenpairs");
  fd->add_option("--out-dir", out_dir, "Output directory");

  auto* qsim = app.add_subcommand("eig-qsim", "Simulated quantum estimation");
  qsim->add_option("--spec", spec_file, "Operator spec JSON")->required();
  qsim->add_option("--config", config_file, "Estimator config JSON")->required();
  qsim->add_option("--trial", trial_file, "Trial JSON (default: builtin gaussian)");
  qsim->add_option("--n-gr", n_gr, "Fixed grid size (omit for end-to-end)")->default_val(0);
  qsim->add_option("--batch-seeds", batch_seeds, "Number of consecutive seeds");
  qsim->add_option("--seed", seed_flag, "Seed override");
  qsim->add_option("--out-dir", out_dir, "Output directory");

  auto* well = app.add_subcommand("well-overlap", "Analytic well overlap sweep");
  well->add_option("--variant", variant, "hilltop | inflection");
  well->add_option("--r-min", r_min, "Smallest r");
  well->add_option("--r-max", r_max, "Largest r");
  well->add_option("--steps", steps, "Sweep resolution");
  well->add_option("--n-max", n_max, "Highest mode number");
  well->add_option("--out-dir", out_dir, "Output directory");

  auto* hy = app.add_subcommand("hybrid", "Two-field hybrid inflation spectrum");
  hy->add_option("--model", model_file, "Potential model JSON")->required();
  hy->add_option("--scale", scale, "Resolution scale in (0, 1]");
  hy->add_option("--k", k, "Number of eigenpairs")->default_val(10);
  hy->add_option("--out-dir", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("complexity-sweep", "Query-count scaling in eps");
  sweep->add_option("--spec", spec_file, "Operator spec JSON")->required();
  sweep->add_option("--config", config_file, "Estimator config JSON")->required();
  sweep->add_option("--eps-list", eps_list_str, "Comma-separated eps values")->required();
  sweep->add_option("--n-gr", n_gr, "Grid size for the fixed-matrix sweep");
  sweep->add_option("--mode", sweep_mode, "fixed | end-to-end | both");
  sweep->add_option("--out-dir", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fd->parsed()) return cmd_eig_fd(spec_file, n_gr, k, out_dir);
    if (qsim->parsed()) {
      json trial = {{"kind", "gaussian"}};
      if (!trial_file.empty()) trial = io::load_json_file(trial_file);
      return cmd_eig_qsim(spec_file, config_file, trial, n_gr, batch_seeds, seed_flag, out_dir);
    }
    if (well->parsed()) return cmd_well_overlap(variant, r_min, r_max, steps, n_max, out_dir);
    if (hy->parsed()) return cmd_hybrid(model_file, scale, k, out_dir);
    if (sweep->parsed()) {
      std::vector<double> eps_list;
      std::stringstream ss(eps_list_str);
      std::string item;
      while (std::getline(ss, item, ',')) eps_list.push_back(std::stod(item));
      return cmd_complexity_sweep(spec_file, config_file, eps_list, n_gr, sweep_mode, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const RootFindError& e) {
    std::cerr << "root-finding error: " << e.what() << "\n";
    return 5;
  } catch (const EstimatorError& e) {
    std::cerr << "estimator error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
