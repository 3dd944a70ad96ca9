#include <random>
#include <set>

#include "doctest.h"
#include "softcap/errors.hpp"
#include "softcap/policy.hpp"
#include "softcap/trajectory.hpp"

using namespace softcap;

namespace {

const CostModel kCost = CostModel::flux_dev_50();

Trajectory smooth(std::uint64_t seed, std::size_t steps = 50) {
  TrajectorySpec spec;
  spec.seed = seed;
  spec.steps = steps;
  return generate(spec);
}

std::set<std::size_t> full_steps(const RunTrace& trace) {
  std::set<std::size_t> out;
  for (const auto& r : trace.steps) {
    if (r.action == Action::full) out.insert(r.step);
  }
  return out;
}

}  // namespace

TEST_CASE("decision rule") {
  CHECK(decide(0.9, 0.35) == Action::full);
  CHECK(decide(0.2, 0.35) == Action::cache);
  CHECK(decide(0.35, 0.35) == Action::full);
  CHECK(progress_at(0, 50) == 0.0);
  CHECK(progress_at(49, 50) == 1.0);
  CHECK(progress_at(0, 1) == 0.0);
  CHECK(to_string(Action::full) == "Full");
  CHECK(to_string(Reason::guard) == "guard");
}

TEST_CASE("warmup must leave room for decisions") {
  PolicyConfig cfg;
  cfg.steps = 20;
  cfg.warmup = 20;
  CHECK_THROWS_AS(run(smooth(0, 20), cfg, kCost), ConfigError);

  cfg.warmup = 19;
  cfg.controller.tau0 = 0.9;
  const auto trace = run(smooth(0, 20), cfg, kCost);
  CHECK(trace.summary.warmup_full == 19);
  for (std::size_t t = 0; t < 19; ++t) CHECK(trace.steps[t].reason == Reason::warmup);
}

TEST_CASE("trajectory length must match the configured steps") {
  PolicyConfig cfg;
  CHECK_THROWS_AS(run(smooth(0, 40), cfg, kCost), ConfigError);
}

TEST_CASE("constant trajectory refreshes only through the guard") {
  PolicyConfig cfg;
  cfg.warmup = 2;
  cfg.cache.max_skip = 10;
  const Trajectory traj(50, FeatureTensor::filled(4, 4, 1.0));
  const auto trace = run(traj, cfg, kCost);
  CHECK(full_steps(trace) == std::set<std::size_t>{0, 1, 11, 21, 31, 41});
  CHECK(trace.summary.crossing_full == 0);
  CHECK(trace.summary.guard_full == 4);
  for (const auto& r : trace.steps) {
    if (r.action == Action::cache) CHECK(r.approx_error == 0.0);
  }
}

TEST_CASE("a burst triggers a gate crossing inside the burst window") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::regime_switching;
  spec.bursts = {{25, 32, 40.0}};
  spec.seed = 3;
  PolicyConfig cfg;
  const auto trace = run(generate(spec), cfg, kCost);
  bool crossed = false;
  for (const auto& r : trace.steps) {
    if (r.reason == Reason::crossing && r.step >= 25 && r.step < 32) crossed = true;
  }
  CHECK(crossed);
}

TEST_CASE("step 0 without warmup is an unanchored crossing") {
  PolicyConfig cfg;
  cfg.warmup = 0;
  const auto trace = run(smooth(1), cfg, kCost);
  CHECK(trace.steps[0].action == Action::full);
  CHECK(trace.steps[0].reason == Reason::crossing);
  CHECK_FALSE(trace.steps[0].risk.anchored);
}

TEST_CASE("counters, identities and guard safety over many runs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    PolicyConfig cfg;
    cfg.steps = 20 + rng() % 60;
    cfg.warmup = rng() % 12;
    cfg.cache.max_skip = 1 + rng() % 12;
    cfg.cache.order = 1 + rng() % 3;
    cfg.controller.cap = 1 + rng() % cfg.steps;
    cfg.observer.increment = rng() % 2 == 0;
    TrajectorySpec spec;
    spec.kind = trial % 2 ? TrajectoryKind::smooth_noise : TrajectoryKind::regime_switching;
    spec.steps = cfg.steps;
    spec.seed = trial;
    spec.bursts = {{cfg.steps / 2, cfg.steps / 2 + 5, 8.0}};
    const auto trace = run(generate(spec), cfg, kCost);
    const auto& s = trace.summary;

    CHECK(s.actual_full == s.crossing_full + s.warmup_full + s.guard_full);
    CHECK(s.warmup_full == cfg.warmup);
    CHECK(s.actual_full == trace.steps.back().n_actual);
    CHECK(s.total_cost == doctest::Approx(total_cost(kCost, s.actual_full, cfg.steps)).epsilon(1e-12));

    std::size_t since_full = 0;
    for (const auto& r : trace.steps) {
      if (r.action == Action::cache) {
        CHECK(r.distance < cfg.cache.max_skip);
        CHECK(r.step >= cfg.warmup);
        ++since_full;
        CHECK(since_full < cfg.cache.max_skip);
      } else {
        since_full = 0;
      }
      CHECK(r.threshold >= cfg.controller.tau_min);
      CHECK(r.threshold <= cfg.controller.tau_max);
      CHECK(r.risk.score >= 0.0);
      CHECK(r.risk.score <= 1.0);
      if (!cfg.observer.increment) CHECK(r.risk.score == r.risk.base);
    }
    const auto recount = count_summary(trace);
    CHECK(recount.actual_full == s.actual_full);
    CHECK(recount.guard_full == s.guard_full);
  }
}

TEST_CASE("runs are deterministic") {
  PolicyConfig cfg;
  const auto traj = smooth(4);
  const auto a = run(traj, cfg, kCost);
  const auto b = run(traj, cfg, kCost);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    CHECK(a.steps[t].action == b.steps[t].action);
    CHECK(a.steps[t].risk.score == b.steps[t].risk.score);
    CHECK(a.steps[t].threshold == b.steps[t].threshold);
    CHECK(a.steps[t].approx_error == b.steps[t].approx_error);
  }
}

TEST_CASE("reset on refresh clears the increment after a Full") {
  PolicyConfig cfg;
  cfg.observer.increment = true;
  cfg.observer.reset_on_refresh = true;
  const auto trace = run(smooth(6), cfg, kCost);
  for (std::size_t t = 1; t < trace.steps.size(); ++t) {
    if (trace.steps[t - 1].action == Action::full) CHECK(trace.steps[t].risk.increment == 0.0);
  }
}

TEST_CASE("artificial Fulls raise the threshold without changing accounting") {
  PolicyConfig cfg;
  const auto traj = smooth(2);
  const auto base = run(traj, cfg, kCost);
  RunHooks hooks;
  hooks.counter_bias = [](std::size_t t) -> std::size_t { return t >= 20 ? 5 : 0; };
  const auto biased = run(traj, cfg, kCost, hooks);
  CHECK(biased.steps[20].threshold >= base.steps[20].threshold);
  CHECK(biased.steps[20].error == doctest::Approx(base.steps[20].error + 5.0));
  CHECK(biased.summary.actual_full == count_summary(biased).actual_full);
}

TEST_CASE("the cap is not a hard ceiling in either direction") {
  PolicyConfig cfg;
  cfg.controller.cap = 40;
  const auto loose = run(smooth(0), cfg, kCost);
  CHECK(loose.summary.actual_full < 40);
  cfg.controller.cap = 1;
  const auto tight = run(smooth(0), cfg, kCost);
  CHECK(tight.summary.actual_full > 1);
}
