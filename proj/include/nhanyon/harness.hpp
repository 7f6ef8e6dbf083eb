#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhanyon/model.hpp"

namespace nhanyon {

inline constexpr const char* kVersion = "0.1.0";

/// Fock dimension ceilings enforced before any allocation.
inline constexpr double kDimCeiling = 1.0e5;
inline constexpr double kDimCeilingLarge = 2.0e6;

/// Experiment description. Presets fully determine every parameter; optional
/// fields override preset defaults. A run is reproducible from the resolved
/// snapshot echoed into its manifest.
struct ExperimentConfig {
  std::string preset = "custom";

  std::optional<int> sites;
  std::optional<int> particles;
  std::optional<int> cap;
  std::optional<double> theta;
  std::optional<double> onsite_u;
  std::optional<double> alpha;
  std::optional<double> hop_left;
  std::optional<double> hop_right;
  std::optional<std::string> bc;  // "obc" | "pbc"
  std::optional<double> twist;
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<double> beta;
  std::optional<double> slope_eps;
  std::optional<std::string> method;   // "dense" | "krylov"
  std::optional<std::string> initial;  // "center" | "same-site" | "separated"
                                       // | "occ:n1,n2,..."
  std::optional<int> source;           // OTOC source site k
  std::optional<bool> exclude_center;
  std::vector<cd> references;  // winding reference energies
  std::string out_dir = "out";
  bool allow_large = false;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

const std::vector<std::string>& known_presets();

/// Fills preset defaults, checks cross-field consistency and returns the
/// fully resolved config. Problems are aggregated into `errors` (empty on
/// success) rather than thrown one at a time.
ExperimentConfig validate_config(const ExperimentConfig& config,
                                 std::vector<std::string>& errors);

struct ArtifactFile {
  std::string name;
  std::string digest;  // fnv1a-64 of the file bytes, hex
  std::uint64_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::vector<ArtifactFile> files;
  std::vector<std::string> task_errors;
  nlohmann::json diagnostics;
  double wall_time_s = 0.0;
  std::string version = kVersion;
  bool ok = false;

  nlohmann::json to_json() const;
};

/// Runs the configured experiment, writing CSV artifacts plus manifest.json
/// into the output directory. Independent tasks are scheduled over a worker
/// pool (NHANYON_WORKERS bounds the size). Refuses to start when the Fock
/// dimension estimate exceeds the ceiling; per-task failures are recorded in
/// the manifest instead of aborting the run.
RunManifest run_experiment(const ExperimentConfig& config);

/// 64-bit FNV-1a over a byte string, lowercase hex.
std::string fnv1a_digest(const std::string& bytes);

}  // namespace nhanyon
