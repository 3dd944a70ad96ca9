#include "softcap/policy.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "softcap/errors.hpp"
#include "softcap/kernels.hpp"

namespace softcap {

std::string_view to_string(Action action) { return action == Action::full ? "Full" : "Cache"; }

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::warmup:
      return "warmup";
    case Reason::guard:
      return "guard";
    case Reason::crossing:
      return "crossing";
    case Reason::cache:
      return "cache";
  }
  return "unknown";
}

void PolicyConfig::validate() const {
  if (steps == 0) throw ConfigError("policy steps must be positive");
  if (warmup >= steps) {
    throw ConfigError("warmup (" + std::to_string(warmup) + ") must be below total steps (" +
                      std::to_string(steps) + ")");
  }
  cache.validate();
  observer.validate();
  controller.validate();
}

Action decide(double risk, double threshold) { return risk >= threshold ? Action::full : Action::cache; }

double progress_at(std::size_t step, std::size_t total_steps) {
  if (total_steps <= 1) return 0.0;
  return static_cast<double>(step) / static_cast<double>(total_steps - 1);
}

RunTrace run(const Trajectory& trajectory, const PolicyConfig& cfg, const CostModel& cost, const RunHooks& hooks) {
  cfg.validate();
  cost.validate();
  if (trajectory.size() != cfg.steps) {
    throw ConfigError("trajectory has " + std::to_string(trajectory.size()) + " steps, config expects " +
                      std::to_string(cfg.steps));
  }
  for (const auto& h : trajectory) {
    if (h.empty() || !h.same_shape(trajectory.front())) {
      throw ConfigError("trajectory tensors must share one nonempty shape");
    }
  }

  RunTrace trace;
  trace.config = cfg;
  trace.cost = cost;
  trace.steps.reserve(cfg.steps);

  AnchorState anchor(cfg.cache.order);
  FeatureTensor anchor_input;
  std::optional<double> prev_base;
  ControllerState ctl = ControllerState::initial(cfg.controller);
  std::size_t n_actual = 0;

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const FeatureTensor& current = trajectory[t];
    StepRecord rec;
    rec.step = t;

    // Controller runs every step, gate or not, so its state never goes stale.
    const std::size_t bias = hooks.counter_bias ? hooks.counter_bias(t) : 0;
    ctl = update(ctl, static_cast<double>(n_actual + bias), progress_at(t, cfg.steps), cfg.controller);

    if (anchor.has_anchor()) {
      rec.distance = cache_distance(anchor, t);
      const CueVector raw{
          magnitude_drift(current.values(), anchor_input.values(), cfg.observer.epsilon),
          directional_drift(current.values(), anchor_input.values(), cfg.observer.epsilon),
          anchor_deviation(rec.distance, cfg.cache.max_skip),
          temporal_volatility(anchor),
      };
      rec.risk = score(raw, prev_base, cfg.observer);
      prev_base = rec.risk.base;
    } else {
      rec.risk = unanchored_report();
    }

    if (t < cfg.warmup) {
      rec.action = Action::full;
      rec.reason = Reason::warmup;
    } else if (anchor.has_anchor() && rec.distance >= cfg.cache.max_skip) {
      rec.action = Action::full;
      rec.reason = Reason::guard;
    } else {
      rec.action = decide(rec.risk.score, ctl.threshold);
      rec.reason = rec.action == Action::full ? Reason::crossing : Reason::cache;
    }

    if (rec.action == Action::full) {
      anchor.refresh(t, current);
      anchor_input = current;
      ++n_actual;
      if (cfg.observer.reset_on_refresh) prev_base.reset();
    } else {
      const FeatureTensor approx = approximate(anchor, t, cfg.cache);
      rec.approx_error = std::sqrt(kernels::squared_distance(approx.values(), current.values()));
    }

    rec.threshold = ctl.threshold;
    rec.error = ctl.error;
    rec.integral = ctl.integral;
    rec.n_actual = n_actual;
    rec.cost = step_cost(cost, rec.action == Action::full);
    trace.steps.push_back(rec);
  }

  trace.summary = count_summary(trace);
  return trace;
}

RunSummary count_summary(const RunTrace& trace) {
  RunSummary s;
  double error_sum = 0.0;
  std::size_t cache_steps = 0;
  for (const auto& rec : trace.steps) {
    s.total_cost += rec.cost;
    if (rec.action == Action::cache) {
      error_sum += rec.approx_error;
      ++cache_steps;
      continue;
    }
    ++s.actual_full;
    switch (rec.reason) {
      case Reason::warmup:
        ++s.warmup_full;
        break;
      case Reason::guard:
        ++s.guard_full;
        break;
      case Reason::crossing:
        ++s.crossing_full;
        break;
      case Reason::cache:
        throw StateError("Full step recorded with reason 'cache'");
    }
  }
  s.mean_cache_error = cache_steps > 0 ? error_sum / static_cast<double>(cache_steps) : 0.0;
  // Speedup uses the closed form; total_cost stays the per-step sum.
  s.speedup = trace.steps.empty()
                  ? 0.0
                  : speedup(trace.cost, total_cost(trace.cost, s.actual_full, trace.steps.size()), trace.steps.size());
  return s;
}

}  // namespace softcap
