#include "softcap/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "softcap/errors.hpp"
#include "softcap/trace_io.hpp"

namespace softcap {

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::polynomial:
      return "polynomial";
    case TrajectoryKind::smooth_noise:
      return "smooth-noise";
    case TrajectoryKind::regime_switching:
      return "regime-switching";
    case TrajectoryKind::replay:
      return "replay";
  }
  return "unknown";
}

TrajectoryKind trajectory_kind_from_string(std::string_view name) {
  if (name == "polynomial") return TrajectoryKind::polynomial;
  if (name == "smooth-noise") return TrajectoryKind::smooth_noise;
  if (name == "regime-switching") return TrajectoryKind::regime_switching;
  if (name == "replay") return TrajectoryKind::replay;
  throw ConfigError("unknown trajectory kind '" + std::string(name) + "'");
}

void validate(const TrajectorySpec& spec) {
  if (spec.kind == TrajectoryKind::replay) {
    if (!spec.replay_path) throw ConfigError("replay trajectory requires replay_path");
    return;
  }
  if (spec.steps == 0) throw ConfigError("trajectory steps must be positive");
  if (spec.tokens == 0 || spec.channels == 0) {
    throw ConfigError("trajectory tokens and channels must be positive");
  }
  if (spec.degree > kMaxPolynomialDegree) {
    throw ConfigError("polynomial degree " + std::to_string(spec.degree) + " exceeds " +
                      std::to_string(kMaxPolynomialDegree));
  }
  if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale)) {
    throw ConfigError("noise_scale must be finite and nonnegative");
  }
  if (!spec.coefficients.empty() && spec.coefficients.size() != spec.degree + 1) {
    throw ConfigError("coefficients must have degree+1 entries");
  }
  std::vector<Burst> sorted = spec.bursts;
  std::sort(sorted.begin(), sorted.end(),
            [](const Burst& a, const Burst& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Burst& b = sorted[i];
    if (b.start >= b.end || b.end > spec.steps) {
      throw ConfigError("burst [" + std::to_string(b.start) + ", " + std::to_string(b.end) +
                        ") must be a nonempty interval within [0, " + std::to_string(spec.steps) + ")");
    }
    if (!std::isfinite(b.amplitude) || b.amplitude < 0.0) {
      throw ConfigError("burst amplitude must be finite and nonnegative");
    }
    if (i > 0 && b.start < sorted[i - 1].end) throw ConfigError("burst intervals overlap");
  }
}

namespace {

// Seeds for the independent random streams of one spec.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

Trajectory generate_polynomial(const TrajectorySpec& spec) {
  const auto coeffs = polynomial_coefficients(spec);
  Trajectory out;
  out.reserve(spec.steps);
  for (std::size_t t = 0; t < spec.steps; ++t) {
    FeatureTensor h(spec.tokens, spec.channels);
    const double x = static_cast<double>(t);
    for (std::size_t i = 0; i < h.size(); ++i) {
      // Horner
      double v = 0.0;
      for (std::size_t k = coeffs[i].size(); k-- > 0;) v = v * x + coeffs[i][k];
      h[i] = v;
    }
    out.push_back(std::move(h));
  }
  return out;
}

Trajectory generate_noise(const TrajectorySpec& spec) {
  const std::size_t n = spec.tokens * spec.channels;
  auto rng = stream(spec.seed, 1);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<double> walk(n);
  for (double& v : walk) v = unit(rng);

  std::vector<std::vector<double>> raw;
  raw.reserve(spec.steps);
  for (std::size_t t = 0; t < spec.steps; ++t) {
    if (t > 0) {
      for (double& v : walk) v += spec.noise_scale * unit(rng);
    }
    raw.push_back(walk);
  }

  Trajectory out;
  out.reserve(spec.steps);
  for (std::size_t t = 0; t < spec.steps; ++t) {
    const std::size_t lo = t >= 2 ? t - 2 : 0;
    const double width = static_cast<double>(t - lo + 1);
    std::vector<double> data(n, 0.0);
    for (std::size_t s = lo; s <= t; ++s) {
      for (std::size_t i = 0; i < n; ++i) data[i] += raw[s][i];
    }
    for (double& v : data) v /= width;
    out.emplace_back(spec.tokens, spec.channels, std::move(data));
  }

  if (spec.kind == TrajectoryKind::regime_switching) {
    // Separate stream, drawn every step, so bursts leave the smooth base untouched.
    auto burst_rng = stream(spec.seed, 2);
    std::vector<double> acc(n, 0.0);
    for (std::size_t t = 0; t < spec.steps; ++t) {
      double amplitude = 0.0;
      for (const Burst& b : spec.bursts) {
        if (t >= b.start && t < b.end) amplitude = b.amplitude;
      }
      auto values = out[t].values();
      for (std::size_t i = 0; i < n; ++i) {
        acc[i] += amplitude * spec.noise_scale * unit(burst_rng);
        values[i] += acc[i];
      }
    }
  }
  return out;
}

Trajectory load_replay(const TrajectorySpec& spec) {
  Trajectory traj = load_trace(*spec.replay_path);
  const FeatureTensor& first = traj.front();
  if ((spec.steps != 0 && spec.steps != traj.size()) ||
      (spec.tokens != 0 && spec.tokens != first.tokens()) ||
      (spec.channels != 0 && spec.channels != first.channels())) {
    throw ConfigError("replay trace shape does not match the trajectory spec");
  }
  return traj;
}

}  // namespace

std::vector<std::vector<double>> polynomial_coefficients(const TrajectorySpec& spec) {
  const std::size_t n = spec.tokens * spec.channels;
  std::vector<std::vector<double>> coeffs(n);
  if (!spec.coefficients.empty()) {
    std::fill(coeffs.begin(), coeffs.end(), spec.coefficients);
    return coeffs;
  }
  auto rng = stream(spec.seed, 0);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& row : coeffs) {
    row.resize(spec.degree + 1);
    for (double& c : row) c = unit(rng);
    // Keep the leading coefficient away from zero so the degree is exact.
    double& lead = row.back();
    if (std::abs(lead) < 0.1) lead = lead < 0.0 ? -0.1 : 0.1;
  }
  return coeffs;
}

Trajectory generate(const TrajectorySpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case TrajectoryKind::polynomial:
      return generate_polynomial(spec);
    case TrajectoryKind::smooth_noise:
    case TrajectoryKind::regime_switching:
      return generate_noise(spec);
    case TrajectoryKind::replay:
      return load_replay(spec);
  }
  throw ConfigError("unhandled trajectory kind");
}

}  // namespace softcap
