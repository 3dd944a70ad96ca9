#include "softcap/cache_engine.hpp"

#include <cmath>
#include <string>

#include "softcap/errors.hpp"
#include "softcap/kernels.hpp"

namespace softcap {

std::string_view to_string(CoefficientScheme scheme) {
  switch (scheme) {
    case CoefficientScheme::newton_forward:
      return "newton-forward";
    case CoefficientScheme::factorial_taylor:
      return "factorial-taylor";
  }
  return "unknown";
}

CoefficientScheme coefficient_scheme_from_string(std::string_view name) {
  if (name == "newton-forward") return CoefficientScheme::newton_forward;
  if (name == "factorial-taylor") return CoefficientScheme::factorial_taylor;
  throw ConfigError("unknown coefficient scheme '" + std::string(name) + "'");
}

void CacheConfig::validate() const {
  if (order < 1) throw ConfigError("cache order must be >= 1");
  if (max_skip < 1) throw ConfigError("cache max_skip must be >= 1");
}

AnchorState::AnchorState(std::size_t order) : order_(order) {
  if (order_ < 1) throw ConfigError("cache order must be >= 1");
}

std::size_t AnchorState::anchor_step() const {
  if (!anchor_step_) throw StateError("no Full anchor recorded yet");
  return *anchor_step_;
}

const FeatureTensor& AnchorState::feature() const {
  if (history_.empty()) throw StateError("no Full anchor recorded yet");
  return history_.back();
}

void AnchorState::refresh(std::size_t t, const FeatureTensor& full_feature) {
  if (!history_.empty()) {
    if (!full_feature.same_shape(history_.back())) {
      throw StateError("refresh feature shape differs from the anchor history");
    }
    if (t <= *anchor_step_) {
      throw OrderingError("refresh at step " + std::to_string(t) + " does not follow anchor step " +
                          std::to_string(*anchor_step_));
    }
  }
  history_.push_back(full_feature);
  while (history_.size() > order_ + 1) history_.pop_front();
  anchor_step_ = t;
  rebuild_diffs();
}

void AnchorState::rebuild_diffs() {
  diffs_.clear();
  // Difference table over the history; keep the newest entry of each level.
  std::vector<FeatureTensor> level(history_.begin(), history_.end());
  while (level.size() > 1) {
    std::vector<FeatureTensor> next;
    next.reserve(level.size() - 1);
    for (std::size_t i = 1; i < level.size(); ++i) {
      FeatureTensor d(level[i].tokens(), level[i].channels());
      kernels::subtract(level[i].values(), level[i - 1].values(), d.values());
      next.push_back(std::move(d));
    }
    diffs_.push_back(next.back());
    level = std::move(next);
  }
}

AnchorState refresh(AnchorState anchor, std::size_t t, const FeatureTensor& full_feature) {
  anchor.refresh(t, full_feature);
  return anchor;
}

double taylor_coefficient(CoefficientScheme scheme, std::size_t k, std::size_t r) {
  const double kd = static_cast<double>(k);
  double alpha = 1.0;
  switch (scheme) {
    case CoefficientScheme::newton_forward:
      // C(k + r - 1, r) = prod_{j=1..r} (k + j - 1) / j
      for (std::size_t j = 1; j <= r; ++j) alpha = alpha * (kd + static_cast<double>(j) - 1.0) / static_cast<double>(j);
      return alpha;
    case CoefficientScheme::factorial_taylor:
      for (std::size_t j = 1; j <= r; ++j) alpha = alpha * kd / static_cast<double>(j);
      return alpha;
  }
  return 0.0;
}

FeatureTensor approximate(const AnchorState& anchor, std::size_t t, const CacheConfig& cfg) {
  const std::size_t a = anchor.anchor_step();
  if (t <= a) {
    throw OrderingError("approximate at step " + std::to_string(t) + " requires t > anchor step " +
                        std::to_string(a));
  }
  const std::size_t k = t - a;
  if (k > cfg.max_skip) {
    throw GuardViolation("cache distance " + std::to_string(k) + " exceeds max_skip " +
                         std::to_string(cfg.max_skip));
  }
  FeatureTensor out = anchor.feature();
  const auto diffs = anchor.diffs();
  const std::size_t orders = std::min(diffs.size(), cfg.order);
  for (std::size_t r = 1; r <= orders; ++r) {
    kernels::axpy(taylor_coefficient(cfg.scheme, k, r), diffs[r - 1].values(), out.values());
  }
  return out;
}

std::size_t cache_distance(const AnchorState& anchor, std::size_t t) {
  const std::size_t a = anchor.anchor_step();
  if (t < a) {
    throw OrderingError("cache distance queried at step " + std::to_string(t) + " before anchor step " +
                        std::to_string(a));
  }
  return t - a;
}

nlohmann::json to_json(const AnchorState& anchor, bool include_diffs) {
  nlohmann::json j;
  j["order"] = anchor.order();
  j["history_depth"] = anchor.history().size();
  j["diff_orders"] = anchor.diffs().size();
  if (anchor.has_anchor()) {
    j["anchor_step"] = anchor.anchor_step();
    const auto& h = anchor.feature();
    j["tokens"] = h.tokens();
    j["channels"] = h.channels();
    if (include_diffs) {
      j["anchor"] = std::vector<double>(h.values().begin(), h.values().end());
      auto diffs = nlohmann::json::array();
      for (const auto& d : anchor.diffs()) diffs.push_back(std::vector<double>(d.values().begin(), d.values().end()));
      j["diffs"] = std::move(diffs);
    }
  } else {
    j["anchor_step"] = nullptr;
  }
  return j;
}

}  // namespace softcap
