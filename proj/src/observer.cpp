#include "softcap/observer.hpp"

#include <algorithm>
#include <cmath>

#include "softcap/errors.hpp"
#include "softcap/kernels.hpp"

namespace softcap {

void ObserverConfig::validate() const {
  double total = 0.0;
  for (std::size_t i = 0; i < kNumCues; ++i) {
    if (!(norm_constants[i] > 0.0) || !std::isfinite(norm_constants[i])) {
      throw ConfigError("observer normalization constants must be positive");
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ConfigError("observer weights must be nonnegative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("observer weights must sum to 1");
  if (!(epsilon > 0.0)) throw ConfigError("observer epsilon must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("observer gamma must be nonnegative");
}

namespace {
void require_match(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("drift cue operands differ in shape");
}
}  // namespace

double magnitude_drift(std::span<const double> current, std::span<const double> anchor_input, double epsilon) {
  require_match(current, anchor_input);
  return kernels::l1_distance(current, anchor_input) / (kernels::l1_norm(current) + epsilon);
}

double directional_drift(std::span<const double> current, std::span<const double> anchor_input, double epsilon) {
  require_match(current, anchor_input);
  const auto dn = kernels::dot_norms(current, anchor_input);
  return 1.0 - dn.dot / (std::sqrt(dn.sq_a) * std::sqrt(dn.sq_b) + epsilon);
}

double anchor_deviation(std::size_t distance, std::size_t max_skip) {
  if (max_skip == 0) throw InputError("max_skip must be positive");
  return std::min(static_cast<double>(distance) / static_cast<double>(max_skip), 1.0);
}

double temporal_volatility(const AnchorState& anchor) {
  const auto diffs = anchor.diffs();
  if (diffs.empty()) return 0.0;
  const auto first = diffs.front().values();
  return std::sqrt(kernels::sum_squares(first) / static_cast<double>(first.size()));
}

RiskReport score(const CueVector& raw, std::optional<double> prev_base, const ObserverConfig& cfg) {
  RiskReport r;
  r.raw = raw;
  for (std::size_t i = 0; i < kNumCues; ++i) {
    r.normalized[i] = std::clamp(raw[i] / cfg.norm_constants[i], 0.0, 1.0);
    r.base += cfg.weights[i] * r.normalized[i];
  }
  // Weights are validated to sum to 1 only within 1e-9.
  r.base = std::clamp(r.base, 0.0, 1.0);
  r.increment = prev_base ? std::max(0.0, r.base - *prev_base) : 0.0;
  r.score = cfg.increment ? std::clamp(r.base + cfg.gamma * r.increment, 0.0, 1.0) : r.base;
  return r;
}

RiskReport unanchored_report() {
  RiskReport r;
  r.base = 1.0;
  r.score = 1.0;
  r.anchored = false;
  return r;
}

}  // namespace softcap
