#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "softcap/cache_engine.hpp"

namespace softcap {

/// Cue order used by every 4-vector below.
enum Cue : std::size_t { kMagnitude = 0, kDirection = 1, kAnchor = 2, kVolatility = 3 };
inline constexpr std::size_t kNumCues = 4;
using CueVector = std::array<double, kNumCues>;

inline constexpr CueVector kDefaultNormConstants{0.5, 0.08, 0.5, 4.0};
inline constexpr CueVector kDefaultCueWeights{0.45, 0.25, 0.15, 0.15};

struct ObserverConfig {
  CueVector norm_constants = kDefaultNormConstants;
  CueVector weights = kDefaultCueWeights;
  double epsilon = 1e-6;
  double gamma = 0.5;
  bool increment = false;
  /// Forget the previous base score when the anchor is refreshed.
  bool reset_on_refresh = false;

  /// Rejects weights that do not sum to 1 (within 1e-9); never rescales.
  void validate() const;
};

struct RiskReport {
  CueVector raw{};
  CueVector normalized{};
  double base = 0.0;
  double increment = 0.0;
  double score = 0.0;
  /// False when no anchor exists yet; score and base are then pinned to 1.
  bool anchored = true;
};

double magnitude_drift(std::span<const double> current, std::span<const double> anchor_input, double epsilon);
double directional_drift(std::span<const double> current, std::span<const double> anchor_input, double epsilon);
double anchor_deviation(std::size_t distance, std::size_t max_skip);
double temporal_volatility(const AnchorState& anchor);

/// Fuses raw cues into a RiskReport. `prev_base` is the base score of the
/// previous scored step, if any.
RiskReport score(const CueVector& raw, std::optional<double> prev_base, const ObserverConfig& cfg);

/// Report used before any anchor exists: maximally risky.
RiskReport unanchored_report();

}  // namespace softcap
