#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "softcap/config.hpp"

namespace softcap {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
  kExitPartialFailure = 4,
  kExitMissingProfile = 5,
};

struct CommonOptions {
  std::filesystem::path out_dir = ".";
  unsigned jobs = 1;
  /// Replaces the config seed (run) or the seed list (sweep/ablate/profile-build).
  std::optional<std::uint64_t> seed;
};

// ---- profile-build -------------------------------------------------------

/// {"base": <config> | "<path>", "seeds": [..], "tau_ref": 0.35}
struct ProfileBuildSpec {
  RunConfig base;
  std::vector<std::uint64_t> seeds{0};
  double tau_ref = 0.35;
};

ProfileBuildSpec parse_profile_build_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ReferenceProfile build_profile(const ProfileBuildSpec& spec, unsigned jobs = 1);

// ---- sweep ---------------------------------------------------------------

/// {"base": <config> | "<path>", "caps": [..], "seeds": [..],
///  "build_profile": {"tau_ref": .., "seeds": [..]}}   (build_profile optional)
struct SweepSpec {
  RunConfig base;
  std::vector<std::size_t> caps;
  std::vector<std::uint64_t> seeds;
  std::optional<ProfileBuildSpec> profile_build;

  void validate() const;
};

struct SweepRow {
  std::size_t cap = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
  RunConfig config;  // materialized per-row config
};

struct CapMean {
  std::size_t cap = 0;
  std::size_t runs = 0;  // successful rows
  double actual_full = 0.0;
  double crossing_full = 0.0;
  double warmup_full = 0.0;
  double guard_full = 0.0;
  double total_cost = 0.0;
  double speedup = 0.0;
};

SweepSpec parse_sweep_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
/// Builds the profile first when requested. Rows follow (cap, seed) spec order.
std::vector<SweepRow> run_sweep(SweepSpec spec, unsigned jobs = 1);
std::vector<CapMean> cap_means(const std::vector<SweepRow>& rows);

// ---- ablation ------------------------------------------------------------

enum class AblationMode { controller, cue_leave_one_out, cue_isolated, weight_grid, increment_on_off };

std::string to_string(AblationMode mode);
AblationMode ablation_mode_from_string(const std::string& name);

/// {"mode": .., "base": <config> | "<path>", "seeds": [..],
///  "weights": [[w_mag, w_dir, w_anc, w_vol], ..],   (weight-grid)
///  "tau_grid": [..]}                                 (controller)
struct AblationSpec {
  AblationMode mode = AblationMode::controller;
  RunConfig base;
  std::vector<std::uint64_t> seeds{0};
  std::vector<CueVector> weight_grid;
  std::vector<double> tau_grid;

  void validate() const;
};

struct AblationVariant {
  std::string name;
  RunConfig config;
};

struct AblationRow {
  std::string variant;
  double actual_full = 0.0;       // mean over seeds
  double total_cost = 0.0;        // mean over seeds
  double mean_cache_error = 0.0;  // mean over seeds of per-run mean Cache-step L2 error
  std::vector<RunConfig> configs;  // one per seed
};

AblationSpec parse_ablation_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
/// Variants for every mode except controller (which is resolved in run_ablation).
std::vector<AblationVariant> ablation_variants(const AblationSpec& spec);
std::vector<AblationRow> run_ablation(const AblationSpec& spec, unsigned jobs = 1);

/// Weight tuples around the defaults, used when a weight-grid spec gives none.
std::vector<CueVector> default_weight_grid();

// ---- commands ------------------------------------------------------------

int cmd_run(const std::filesystem::path& config_path, const CommonOptions& opts, std::ostream& log);
int cmd_sweep(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log);
int cmd_ablate(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log);
int cmd_profile_build(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log);

}  // namespace softcap
