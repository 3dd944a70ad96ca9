#include "softcap/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "softcap/errors.hpp"

namespace softcap {

ReferenceProfile::ReferenceProfile(std::vector<ProfileKnot> knots, std::optional<double> tau_ref)
    : knots_(std::move(knots)), tau_ref_(tau_ref) {
  if (knots_.size() < 2) throw ConfigError("reference profile needs at least two knots");
  if (knots_.front().progress != 0.0 || knots_.front().fraction != 0.0) {
    throw ConfigError("reference profile must start at (0, 0)");
  }
  if (knots_.back().progress != 1.0 || knots_.back().fraction != 1.0) {
    throw ConfigError("reference profile must end at (1, 1)");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const auto& prev = knots_[i - 1];
    const auto& cur = knots_[i];
    if (!std::isfinite(cur.progress) || !std::isfinite(cur.fraction) || cur.progress < prev.progress ||
        cur.fraction < prev.fraction) {
      throw ConfigError("reference profile knots must be nondecreasing in p and C");
    }
  }
  if (tau_ref_ && !(*tau_ref_ > 0.0 && *tau_ref_ < 1.0)) throw ConfigError("tau_ref must lie in (0, 1)");
}

ReferenceProfile ReferenceProfile::identity() { return ReferenceProfile({{0.0, 0.0}, {1.0, 1.0}}); }

double ReferenceProfile::operator()(double progress) const {
  const double p = std::clamp(progress, 0.0, 1.0);
  // First knot with progress > p; duplicates at p resolve to the later knot.
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), p,
                             [](double v, const ProfileKnot& k) { return v < k.progress; });
  if (hi == knots_.end()) return knots_.back().fraction;
  auto lo = std::prev(hi);
  const double span = hi->progress - lo->progress;
  const double w = (p - lo->progress) / span;
  return lo->fraction + w * (hi->fraction - lo->fraction);
}

nlohmann::json to_json(const ReferenceProfile& profile) {
  nlohmann::json j;
  j["tau_ref"] = profile.tau_ref() ? nlohmann::json(*profile.tau_ref()) : nlohmann::json(nullptr);
  auto knots = nlohmann::json::array();
  for (const auto& k : profile.knots()) knots.push_back({k.progress, k.fraction});
  j["knots"] = std::move(knots);
  return j;
}

ReferenceProfile profile_from_json(const nlohmann::json& j) {
  try {
    std::optional<double> tau_ref;
    if (j.contains("tau_ref") && !j["tau_ref"].is_null()) tau_ref = j["tau_ref"].get<double>();
    std::vector<ProfileKnot> knots;
    for (const auto& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2) throw ConfigError("profile knot must be a [p, C] pair");
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    return ReferenceProfile(std::move(knots), tau_ref);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid reference profile: ") + e.what());
  }
}

void save_profile(const std::filesystem::path& path, const ReferenceProfile& profile) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_json(profile).dump() << '\n';
}

ReferenceProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingProfileError("reference profile not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid reference profile " + path.string() + ": " + e.what());
  }
  return profile_from_json(j);
}

std::string_view to_string(ThresholdMode mode) { return mode == ThresholdMode::pi ? "pi" : "fixed"; }

ThresholdMode threshold_mode_from_string(std::string_view name) {
  if (name == "pi") return ThresholdMode::pi;
  if (name == "fixed") return ThresholdMode::fixed;
  throw ConfigError("unknown controller mode '" + std::string(name) + "'");
}

void ControllerConfig::validate() const {
  if (cap == 0) throw ConfigError("controller cap must be positive");
  if (!(tau_min >= 0.0 && tau_min < tau_max && tau_max <= 1.0)) {
    throw ConfigError("threshold clamp must satisfy 0 <= tau_min < tau_max <= 1");
  }
  if (!(tau0 > 0.0 && tau0 < 1.0)) throw ConfigError("tau0 must lie in (0, 1)");
  if (mode == ThresholdMode::pi && !(tau_min <= tau0 && tau0 <= tau_max)) {
    throw ConfigError("tau0 must lie within [tau_min, tau_max]");
  }
  if (!(kp >= 0.0) || !(ki >= 0.0) || !std::isfinite(kp) || !std::isfinite(ki)) {
    throw ConfigError("controller gains must be nonnegative");
  }
  if (!(integral_min <= 0.0 && 0.0 <= integral_max)) {
    throw ConfigError("integral clamp must satisfy I_min <= 0 <= I_max");
  }
}

ControllerState ControllerState::initial(const ControllerConfig& cfg) { return {0.0, cfg.tau0, 0.0}; }

double reference_count(const ControllerConfig& cfg, double progress) {
  return cfg.profile(progress) * static_cast<double>(cfg.cap);
}

ControllerState update(const ControllerState& state, double n_actual, double progress, const ControllerConfig& cfg) {
  if (cfg.mode == ThresholdMode::fixed) return {0.0, cfg.tau0, 0.0};
  ControllerState next;
  next.error = n_actual - reference_count(cfg, progress);
  next.integral = std::clamp(state.integral + next.error, cfg.integral_min, cfg.integral_max);
  next.threshold = std::clamp(cfg.tau0 + cfg.kp * next.error + cfg.ki * next.integral, cfg.tau_min, cfg.tau_max);
  return next;
}

}  // namespace softcap
