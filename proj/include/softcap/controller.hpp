#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace softcap {

struct ProfileKnot {
  double progress = 0.0;  // p in [0, 1]
  double fraction = 0.0;  // cumulative Full fraction C(p) in [0, 1]

  friend bool operator==(const ProfileKnot&, const ProfileKnot&) = default;
};

/// Frozen lookup table C(p): cumulative Full-step fraction of a reference
/// policy over normalized progress. Nondecreasing in both coordinates,
/// pinned to (0,0) and (1,1), linearly interpolated between knots.
class ReferenceProfile {
 public:
  /// Throws ConfigError when the knots violate the invariants.
  explicit ReferenceProfile(std::vector<ProfileKnot> knots, std::optional<double> tau_ref = std::nullopt);

  static ReferenceProfile identity();

  double operator()(double progress) const;
  const std::vector<ProfileKnot>& knots() const { return knots_; }
  std::optional<double> tau_ref() const { return tau_ref_; }

  friend bool operator==(const ReferenceProfile&, const ReferenceProfile&) = default;

 private:
  std::vector<ProfileKnot> knots_;
  std::optional<double> tau_ref_;
};

/// {"tau_ref": <real>, "knots": [[p, C], ...]}
nlohmann::json to_json(const ReferenceProfile& profile);
ReferenceProfile profile_from_json(const nlohmann::json& j);
void save_profile(const std::filesystem::path& path, const ReferenceProfile& profile);
/// Throws MissingProfileError if the file does not exist.
ReferenceProfile load_profile(const std::filesystem::path& path);

enum class ThresholdMode {
  pi,     // PI rule over the budget-tracking error
  fixed,  // constant tau0; controller bypassed
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(std::string_view name);

struct ControllerConfig {
  std::size_t cap = 24;  // N_cap
  ReferenceProfile profile = ReferenceProfile::identity();
  double tau0 = 0.35;
  double kp = 0.05;
  double ki = 0.01;
  double tau_min = 0.2;
  double tau_max = 0.95;
  double integral_min = -20.0;
  double integral_max = 20.0;
  ThresholdMode mode = ThresholdMode::pi;

  void validate() const;
};

struct ControllerState {
  double integral = 0.0;
  double threshold = 0.0;
  double error = 0.0;

  static ControllerState initial(const ControllerConfig& cfg);
};

/// N_ref = C(p) * N_cap, real valued.
double reference_count(const ControllerConfig& cfg, double progress);

/// e = N_actual - N_ref(p); I' = clip(I + e); tau' = clip(tau0 + Kp e + Ki I').
/// In fixed mode the state is returned with tau = tau0 and zero error/integral.
ControllerState update(const ControllerState& state, double n_actual, double progress, const ControllerConfig& cfg);

}  // namespace softcap
