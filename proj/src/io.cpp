#include "spectraldiff/io.hpp"

#include <cstdio>
#include <fstream>

namespace spectraldiff::io {

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

namespace {

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string("missing numeric field \"") + key + "\"");
  return j[key].get<double>();
}

std::vector<double> number_list(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError("expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

double eval_poly(const std::vector<double>& coeffs, double x) {
  double acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

// Builtin coefficients reduce to per-axis polynomials: a_i(x) = p_i(x_i) and
// a_0(x) = sum_i p_0(x_i).
OperatorSpec builtin_spec(const DomainBox& box, const std::string& name, const json& params) {
  const int d = box.dim;
  std::vector<double> p0;
  std::vector<std::vector<double>> pa(d);

  if (name == "constant") {
    p0 = {require_number(params, "a0")};
    if (params["a"].is_number()) {
      for (auto& p : pa) p = {params["a"].get<double>()};
    } else {
      const auto vals = number_list(params["a"]);
      if (static_cast<int>(vals.size()) != d) throw ConfigError("constant: need one a per axis");
      for (int i = 0; i < d; ++i) pa[i] = {vals[i]};
    }
  } else if (name == "linear") {
    p0 = {require_number(params, "a0")};
    if (!params.contains("a") || !params["a"].is_array() ||
        static_cast<int>(params["a"].size()) != d)
      throw ConfigError("linear: need one {offset, slope} per axis");
    for (int i = 0; i < d; ++i) {
      const auto& e = params["a"][i];
      pa[i] = {require_number(e, "offset"), require_number(e, "slope")};
    }
  } else if (name == "polynomial") {
    p0 = number_list(params.at("a0"));
    if (!params.contains("a") || static_cast<int>(params["a"].size()) != d)
      throw ConfigError("polynomial: need one coefficient list per axis");
    for (int i = 0; i < d; ++i) pa[i] = number_list(params["a"][i]);
  } else {
    throw ConfigError("unknown builtin coefficient kind \"" + name + "\"");
  }

  // Polynomial a_0 sums its list over the axes; constant and linear keep the
  // plain scalar meaning.
  const bool a0_per_axis = (name == "polynomial") && d > 1;
  OperatorSpec spec;
  spec.domain = box;
  spec.a0 = [p0, a0_per_axis, d](Eigen::Ref<const Vector> x) {
    if (!a0_per_axis) return eval_poly(p0, x[0]);
    double acc = 0;
    for (int i = 0; i < d; ++i) acc += eval_poly(p0, x[i]);
    return acc;
  };
  for (int i = 0; i < d; ++i) {
    auto poly = pa[i];
    spec.a.push_back([poly, i](Eigen::Ref<const Vector> x) { return eval_poly(poly, x[i]); });
  }
  return spec;
}

}  // namespace

OperatorSpec operator_spec_from_json(const json& j) {
  if (!j.contains("domain") || !j.contains("coefficients"))
    throw ConfigError("operator spec needs \"domain\" and \"coefficients\"");
  const auto& dj = j["domain"];
  DomainBox box(require_number(dj, "lower"), require_number(dj, "upper"),
                static_cast<int>(require_number(dj, "dim")));

  const auto& cj = j["coefficients"];
  const std::string kind = cj.value("kind", "");
  const std::string name = cj.value("name", "");
  const json params = cj.value("params", json::object());

  if (kind == "builtin") return builtin_spec(box, name, params);
  if (kind == "inflation") {
    json model_doc = params;
    model_doc["kind"] = name;
    const inflation::PotentialModel model = potential_model_from_json(model_doc);
    if (model.dim() != box.dim)
      throw ConfigError("inflation coefficients: model dimension does not match the domain");
    const auto coeffs = inflation::hermitized_coefficients(inflation::reduced_potential(model),
                                                           model.mpl);
    OperatorSpec spec;
    spec.domain = box;
    spec.a0 = coeffs.a0;
    spec.a = coeffs.a;
    return spec;
  }
  throw ConfigError("unknown coefficient kind \"" + kind + "\"");
}

EstimatorConfig estimator_config_from_json(const json& j) {
  EstimatorConfig cfg;
  cfg.eps = require_number(j, "eps");
  cfg.delta = j.value("delta", cfg.delta);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
  cfg.c1 = j.value("C1", 0.0);
  cfg.d1 = j.value("D1", 0.0);
  cfg.degree_cap = j.value("degree_cap", kDefaultDegreeCap);
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    const std::string mode = s.value("mode", "exact");
    if (mode == "exact") {
      cfg.sampling = EstimatorConfig::Sampling::Exact;
    } else if (mode == "bernoulli") {
      cfg.sampling = EstimatorConfig::Sampling::Bernoulli;
    } else {
      throw ConfigError("sampling mode must be \"exact\" or \"bernoulli\"");
    }
    cfg.shots = s.value("shots", static_cast<std::uint64_t>(0));
  }
  cfg.validate();
  return cfg;
}

inflation::PotentialModel potential_model_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "quantum_well" || kind == "inflection_well") {
    const double v0 = require_number(j, "v0");
    const double phi_f = require_number(j, "phi_f");
    return kind == "quantum_well" ? inflation::make_quantum_well(v0, phi_f)
                                  : inflation::make_inflection_well(v0, phi_f);
  }
  if (kind == "hybrid") {
    const double V0 = require_number(j, "V0");
    double M = 0;
    if (j.contains("M_GeV")) {
      M = j["M_GeV"].get<double>() / inflation::kPlanckMassGeV;
    } else {
      M = require_number(j, "M");
    }
    double phi_c = 0;
    if (j.contains("phi_c_over_M")) {
      phi_c = j["phi_c_over_M"].get<double>() * M;
    } else {
      phi_c = require_number(j, "phi_c");
    }
    return inflation::make_hybrid(V0, M, phi_c, require_number(j, "beta"));
  }
  throw ConfigError("unknown potential kind \"" + kind + "\"");
}

bool is_values_trial(const json& j) { return j.value("kind", "") == "values"; }

std::vector<double> trial_values_from_json(const json& j) {
  if (!is_values_trial(j)) throw ConfigError("trial document is not of kind \"values\"");
  return number_list(j.at("values"));
}

ScalarField gaussian_trial_from_json(const json& j, const DomainBox& box) {
  const std::string kind = j.value("kind", "gaussian");
  if (kind != "gaussian") throw ConfigError("unknown trial kind \"" + kind + "\"");
  const double width = j.value("width", 0.2 * box.length());
  Vector center = Vector::Constant(box.dim, 0.5 * (box.lower + box.upper));
  if (j.contains("center")) {
    if (j["center"].is_number()) {
      center.setConstant(j["center"].get<double>());
    } else {
      const auto c = number_list(j["center"]);
      if (static_cast<int>(c.size()) != box.dim)
        throw ConfigError("trial center dimension mismatch");
      for (int i = 0; i < box.dim; ++i) center[i] = c[i];
    }
  }
  if (!(width > 0)) throw ConfigError("trial width must be > 0");
  return [center, width](Eigen::Ref<const Vector> x) {
    return std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
  };
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

void write_eigenvalues_csv(const std::filesystem::path& path, const EigenResult& result) {
  std::string body = "k,lambda,residual\n";
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    body += std::to_string(i + 1) + "," + fmt17(result.eigenvalues[i]) + "," +
            fmt17(result.residuals[i]) + "\n";
  }
  write_text_file(path, body);
}

void write_eigenvector_csv(const std::filesystem::path& path, const GridVector& v) {
  const int d = v.grid.box.dim;
  std::string body = "J";
  for (int i = 0; i < d; ++i) body += ",x" + std::to_string(i + 1);
  body += ",value\n";
  for (Index K = 0; K < v.values.size(); ++K) {
    body += std::to_string(K);
    const MultiIndex j = unflatten_index(K, v.grid.n_gr, d);
    for (int i = 0; i < d; ++i) body += "," + fmt17(v.grid.node_coord(j[i]));
    body += "," + fmt17(v.values[K]) + "\n";
  }
  write_text_file(path, body);
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash " + path.string());
  std::uint64_t hash = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

json ledger_to_json(const QueryLedger& ledger) {
  json totals = {{"entry_oracle_calls", ledger.entry_oracle_calls},
                 {"row_col_oracle_calls", ledger.row_col_oracle_calls},
                 {"state_prep_calls", ledger.state_prep_calls},
                 {"matvec_count", ledger.matvec_count},
                 {"coefficient_evals", ledger.coefficient_evals}};
  json levels = json::array();
  for (const auto& rec : ledger.levels) {
    levels.push_back({{"level", rec.level},
                      {"mu", rec.mu},
                      {"prob_estimate", rec.prob_estimate},
                      {"decision", rec.below ? "BELOW" : "ABOVE"},
                      {"circuit_runs", rec.circuit_runs},
                      {"entry_oracle_calls", rec.entry_oracle_calls},
                      {"row_col_oracle_calls", rec.row_col_oracle_calls},
                      {"state_prep_calls", rec.state_prep_calls}});
  }
  return {{"totals", totals}, {"levels", levels}};
}

json make_manifest(const std::string& command, const json& resolved_config, std::uint64_t seed,
                   const std::vector<ManifestOutput>& outputs, double wall_clock_seconds) {
  json out_list = json::array();
  for (const auto& o : outputs) {
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(o.fnv1a64));
    out_list.push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", hex}});
  }
  return {{"command", command},
          {"config", resolved_config},
          {"seed", seed},
          {"versions",
           {{"spectraldiff", "0.1.0"},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}}},
          {"outputs", out_list},
          {"wall_clock_seconds", wall_clock_seconds}};
}

ManifestOutput hash_output(const std::filesystem::path& base, const std::filesystem::path& file) {
  ManifestOutput o;
  o.path = std::filesystem::relative(file, base).string();
  o.bytes = std::filesystem::file_size(file);
  o.fnv1a64 = fnv1a64_file(file);
  return o;
}

}  // namespace spectraldiff::io
