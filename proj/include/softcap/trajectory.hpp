#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "softcap/feature_tensor.hpp"

namespace softcap {

enum class TrajectoryKind { polynomial, smooth_noise, regime_switching, replay };

std::string_view to_string(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_string(std::string_view name);

/// Burst window [start, end) with an amplitude multiplier on the step noise.
struct Burst {
  std::size_t start = 0;
  std::size_t end = 0;
  double amplitude = 1.0;
};

/// Recipe for a synthetic (or replayed) per-step hidden-state sequence.
///
/// polynomial:        every element is sum_k c_k t^k with per-element
///                    coefficients drawn from the seed, or the shared
///                    `coefficients` when given.
/// smooth-noise:      seeded N(0,1) offset plus a cumulative sum of
///                    N(0, noise_scale^2) increments, passed through a
///                    trailing 3-step moving average.
/// regime-switching:  smooth-noise plus an unsmoothed random walk that only
///                    advances inside bursts, with step scale
///                    amplitude * noise_scale.
/// replay:            read from `replay_path`; steps/tokens/channels, when
///                    nonzero, must agree with the file.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::smooth_noise;
  std::size_t steps = 50;
  std::size_t tokens = 16;
  std::size_t channels = 32;
  unsigned degree = 2;
  double noise_scale = 0.02;
  std::vector<Burst> bursts;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> replay_path;
  std::vector<double> coefficients;  // polynomial kind only; size degree+1
};

inline constexpr unsigned kMaxPolynomialDegree = 8;

/// Throws ConfigError on any invariant violation.
void validate(const TrajectorySpec& spec);

Trajectory generate(const TrajectorySpec& spec);

/// Per-element polynomial coefficients (row i = element i, column k = c_k)
/// exactly as generate() uses them for the polynomial kind.
std::vector<std::vector<double>> polynomial_coefficients(const TrajectorySpec& spec);

}  // namespace softcap
