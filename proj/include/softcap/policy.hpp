#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "softcap/cache_engine.hpp"
#include "softcap/controller.hpp"
#include "softcap/cost_model.hpp"
#include "softcap/feature_tensor.hpp"
#include "softcap/observer.hpp"

namespace softcap {

enum class Action { full, cache };
enum class Reason { warmup, guard, crossing, cache };

std::string_view to_string(Action action);
std::string_view to_string(Reason reason);

struct PolicyConfig {
  std::size_t warmup = 10;  // W
  std::size_t steps = 50;   // T
  CacheConfig cache;
  ObserverConfig observer;
  ControllerConfig controller;

  void validate() const;
};

struct StepRecord {
  std::size_t step = 0;
  Action action = Action::full;
  Reason reason = Reason::warmup;
  RiskReport risk;
  double threshold = 0.0;
  double error = 0.0;
  double integral = 0.0;
  std::size_t n_actual = 0;  // after this step's decision
  std::size_t distance = 0;  // cache distance at decision time (0 when unanchored)
  double cost = 0.0;
  double approx_error = 0.0;  // L2 error of the cached feature; 0 on Full steps
};

struct RunSummary {
  std::size_t actual_full = 0;
  std::size_t crossing_full = 0;
  std::size_t warmup_full = 0;
  std::size_t guard_full = 0;
  double total_cost = 0.0;
  double speedup = 0.0;
  double mean_cache_error = 0.0;  // mean approx_error over Cache steps
};

struct RunTrace {
  PolicyConfig config;
  CostModel cost;
  std::vector<StepRecord> steps;
  RunSummary summary;
};

/// Test hooks. `counter_bias(t)` is added to the realized Full count the
/// controller sees at step t (artificial Fulls); it does not change actions.
struct RunHooks {
  std::function<std::size_t(std::size_t)> counter_bias;
};

/// Full iff s >= tau.
Action decide(double risk, double threshold);

/// Normalized progress t / (T - 1); 0 for single-step runs.
double progress_at(std::size_t step, std::size_t total_steps);

RunTrace run(const Trajectory& trajectory, const PolicyConfig& cfg, const CostModel& cost, const RunHooks& hooks = {});

/// Independent fold over the step records.
RunSummary count_summary(const RunTrace& trace);

}  // namespace softcap
