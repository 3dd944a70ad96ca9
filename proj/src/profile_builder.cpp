#include "softcap/profile_builder.hpp"

#include <algorithm>
#include <string>

#include "parallel.hpp"
#include "softcap/errors.hpp"

namespace softcap {

ReferenceProfile build_profile(double tau_ref, std::span<const Trajectory> ensemble, const PolicyConfig& base,
                               unsigned jobs) {
  if (!(tau_ref > 0.0 && tau_ref < 1.0)) throw ConfigError("tau_ref must lie in (0, 1)");
  if (ensemble.empty()) throw ConfigError("profile ensemble is empty");
  const std::size_t steps = ensemble.front().size();
  for (const auto& member : ensemble) {
    if (member.size() != steps) throw ConfigError("profile ensemble members differ in length");
  }
  if (steps < 2) throw ConfigError("profile ensemble needs at least two steps");

  PolicyConfig cfg = base;
  cfg.steps = steps;
  cfg.controller.mode = ThresholdMode::fixed;
  cfg.controller.tau0 = tau_ref;
  // Cost does not influence decisions; any valid model will do.
  const CostModel cost{1.0, 0.5, 0.0, 0.0};

  std::vector<std::vector<std::size_t>> before(ensemble.size(), std::vector<std::size_t>(steps, 0));
  detail::parallel_for(ensemble.size(), jobs, [&](std::size_t m) {
    const RunTrace trace = run(ensemble[m], cfg, cost);
    for (std::size_t t = 1; t < steps; ++t) before[m][t] = trace.steps[t - 1].n_actual;
  });

  std::vector<double> mean(steps, 0.0);
  for (const auto& member : before) {
    for (std::size_t t = 0; t < steps; ++t) mean[t] += static_cast<double>(member[t]);
  }
  for (double& v : mean) v /= static_cast<double>(ensemble.size());

  const double total = mean.back();
  if (!(total > 0.0)) throw DegenerateProfileError("reference policy realized no Full evaluations");

  std::vector<ProfileKnot> knots(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    knots[t] = {progress_at(t, steps), std::min(1.0, mean[t] / total)};
  }
  knots.front() = {0.0, 0.0};
  knots.back() = {1.0, 1.0};
  return ReferenceProfile(std::move(knots), tau_ref);
}

}  // namespace softcap
