#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "softcap/cost_model.hpp"
#include "softcap/policy.hpp"
#include "softcap/trajectory.hpp"

namespace softcap {

/// One complete run: what to simulate, how to decide, how to charge.
///
/// JSON layout (every section and key is optional; unknown keys are rejected):
///
///   {
///     "trajectory": {"kind", "steps", "tokens", "channels", "degree", "noise_scale",
///                    "bursts": [[start, end, amplitude], ...], "seed",
///                    "replay_path", "coefficients"},
///     "cache":      {"order", "max_skip", "scheme"},
///     "observer":   {"norm_constants": [4], "weights": [4], "epsilon", "gamma",
///                    "increment", "reset_on_refresh"},
///     "controller": {"mode", "cap", "tau0", "kp", "ki", "tau_min", "tau_max",
///                    "integral_min", "integral_max",
///                    "profile": <path> | {"tau_ref", "knots"}},
///     "policy":     {"warmup"},
///     "cost":       {"preset"} | {"c_full", "c_cache", "c_obs", "c_ctrl"}
///   }
///
/// Relative paths resolve against the directory of the config file. The total
/// step count T comes from trajectory.steps (or the replay file).
struct RunConfig {
  TrajectorySpec trajectory;
  PolicyConfig policy;
  CostModel cost = CostModel::flux_dev_50();
};

/// Throws ConfigError (or MissingProfileError for an absent profile file).
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Fully materialized form: every field explicit, profile inlined.
nlohmann::json to_json(const RunConfig& cfg);

/// Generates (or loads) the trajectory; fills policy.steps for replays and
/// validates the policy against it.
Trajectory materialize(RunConfig& cfg);

/// Parsed value of SOFTCAP_SEED, if set. Throws ConfigError if malformed.
std::optional<std::uint64_t> seed_from_env();

}  // namespace softcap
