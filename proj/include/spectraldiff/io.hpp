#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectraldiff/eigensolve.hpp"
#include "spectraldiff/fd_matrix.hpp"
#include "spectraldiff/inflation.hpp"
#include "spectraldiff/qsvt.hpp"

namespace spectraldiff::io {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path);

/// Operator spec document:
/// {"domain": {"lower", "upper", "dim"},
///  "coefficients": {"kind": "builtin"|"inflation", "name", "params"}}.
/// Builtin names: constant, linear, polynomial (per-axis coefficient lists).
OperatorSpec operator_spec_from_json(const json& j);

/// {"eps", "delta", "gamma", "sampling": {"mode", "shots"}, "seed",
///  "C1", "D1", "degree_cap"} — all but eps optional.
EstimatorConfig estimator_config_from_json(const json& j);

/// {"kind": "quantum_well"|"inflection_well", "v0", "phi_f"} or
/// {"kind": "hybrid", "V0", "M_GeV"|"M", "phi_c_over_M"|"phi_c", "beta"}.
/// GeV values are converted with mpl = 2.435e18 GeV.
inflation::PotentialModel potential_model_from_json(const json& j);

/// Builtin trial documents: {"kind": "gaussian", "center", "width"} gives a
/// field; {"kind": "values", "values": [...]} carries an explicit vector.
bool is_values_trial(const json& j);
std::vector<double> trial_values_from_json(const json& j);
ScalarField gaussian_trial_from_json(const json& j, const DomainBox& box);

/// Shortest round-trip decimal form used by every CSV/JSON writer.
std::string fmt17(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
void write_eigenvalues_csv(const std::filesystem::path& path, const EigenResult& result);
void write_eigenvector_csv(const std::filesystem::path& path, const GridVector& v);

std::uint64_t fnv1a64_file(const std::filesystem::path& path);

json ledger_to_json(const QueryLedger& ledger);

struct ManifestOutput {
  std::string path;
  std::uint64_t bytes = 0;
  std::uint64_t fnv1a64 = 0;
};

/// Every command run emits a manifest: the command, the fully resolved
/// configuration, versions, hashes of all produced files, and timing.
json make_manifest(const std::string& command, const json& resolved_config, std::uint64_t seed,
                   const std::vector<ManifestOutput>& outputs, double wall_clock_seconds);

ManifestOutput hash_output(const std::filesystem::path& base,
                           const std::filesystem::path& file);

}  // namespace spectraldiff::io
