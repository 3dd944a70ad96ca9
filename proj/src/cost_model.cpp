#include "softcap/cost_model.hpp"

#include <cmath>
#include <string>

#include "softcap/errors.hpp"

namespace softcap {

void CostModel::validate() const {
  if (!(c_full > 0.0) || !std::isfinite(c_full)) throw ConfigError("c_full must be positive");
  if (!(c_cache > 0.0) || !std::isfinite(c_cache)) throw ConfigError("c_cache must be positive");
  if (!(c_cache < c_full)) throw ConfigError("c_cache must be strictly below c_full");
  if (!(c_obs >= 0.0) || !(c_ctrl >= 0.0) || !std::isfinite(c_obs) || !std::isfinite(c_ctrl)) {
    throw ConfigError("observer/controller overheads must be nonnegative");
  }
}

CostModel CostModel::flux_dev_50() { return {74.39, 1.0, 0.01, 0.01}; }

CostModel CostModel::preset(std::string_view name) {
  if (name == "flux-dev-50") return flux_dev_50();
  throw ConfigError("unknown cost preset '" + std::string(name) + "'");
}

double step_cost(const CostModel& model, bool full) {
  return (full ? model.c_full : model.c_cache) + model.c_obs + model.c_ctrl;
}

double total_cost(const CostModel& model, std::size_t n_full, std::size_t steps) {
  if (n_full > steps) {
    throw AccountingError("Full count " + std::to_string(n_full) + " exceeds step count " + std::to_string(steps));
  }
  const double full = static_cast<double>(n_full);
  const double t = static_cast<double>(steps);
  return full * model.c_full + (t - full) * model.c_cache + t * (model.c_obs + model.c_ctrl);
}

double speedup(const CostModel& model, double trace_cost, std::size_t steps) {
  if (!(trace_cost > 0.0)) throw AccountingError("speedup needs a positive trace cost");
  return static_cast<double>(steps) * model.c_full / trace_cost;
}

}  // namespace softcap
