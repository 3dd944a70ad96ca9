#pragma once

#include <cstddef>
#include <string_view>

namespace softcap {

/// Abstract per-step cost units.
struct CostModel {
  double c_full = 1.0;
  double c_cache = 0.0;
  double c_obs = 0.0;
  double c_ctrl = 0.0;

  /// Requires c_full > 0, 0 < c_cache < c_full, nonnegative overheads.
  void validate() const;

  /// 50-step preset scaled so that 50 * c_full = 3719.50 (TFLOPs of one
  /// full-compute 50-step FLUX.1-dev image).
  static CostModel flux_dev_50();
  /// Throws ConfigError for unknown names.
  static CostModel preset(std::string_view name);
};

double step_cost(const CostModel& model, bool full);

/// N_full * C_full + (T - N_full) * C_cache + T * (C_obs + C_ctrl).
double total_cost(const CostModel& model, std::size_t n_full, std::size_t steps);

/// (T * C_full) / trace_cost.
double speedup(const CostModel& model, double trace_cost, std::size_t steps);

}  // namespace softcap
