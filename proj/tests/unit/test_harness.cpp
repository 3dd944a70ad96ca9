#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "softcap/errors.hpp"
#include "softcap/harness.hpp"
#include "softcap/report.hpp"

using namespace softcap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "softcap_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

RunSummary simulate(RunConfig cfg) {
  const Trajectory traj = materialize(cfg);
  return run(traj, cfg.policy, cfg.cost).summary;
}

const json kRunConfig = json::parse(R"({
  "trajectory": {"kind": "smooth-noise", "steps": 50, "tokens": 8, "channels": 16, "seed": 3},
  "controller": {"cap": 16},
  "policy": {"warmup": 10},
  "cost": {"preset": "flux-dev-50"}
})");

}  // namespace

TEST_CASE("run writes traces that are byte-identical across reruns") {
  const fs::path dir = scratch("run");
  write_file(dir / "config.json", kRunConfig.dump());
  std::ostringstream log;
  CommonOptions opts;
  opts.out_dir = dir / "a";
  REQUIRE(cmd_run(dir / "config.json", opts, log) == kExitOk);
  opts.out_dir = dir / "b";
  REQUIRE(cmd_run(dir / "config.json", opts, log) == kExitOk);
  CHECK(slurp(dir / "a" / "trace.jsonl") == slurp(dir / "b" / "trace.jsonl"));
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));

  std::ifstream jsonl(dir / "a" / "trace.jsonl");
  std::vector<json> records;
  for (std::string line; std::getline(jsonl, line);) records.push_back(json::parse(line));
  REQUIRE(records.size() == 51);
  CHECK(records.back().contains("summary"));
  records.pop_back();

  std::ifstream csv(dir / "a" / "trace.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == kTraceCsvHeader);
  const auto keys = split(header, ',');
  std::size_t t = 0;
  for (std::string line; std::getline(csv, line); ++t) {
    const auto cells = split(line, ',');
    REQUIRE(cells.size() == keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const json& v = records[t][keys[i]];
      if (v.is_number_float()) {
        CHECK(std::strtod(cells[i].c_str(), nullptr) == v.get<double>());
      } else if (v.is_number_integer()) {
        CHECK(std::stoll(cells[i]) == v.get<long long>());
      } else if (v.is_boolean()) {
        CHECK(cells[i] == (v.get<bool>() ? "true" : "false"));
      } else {
        CHECK(cells[i] == v.get<std::string>());
      }
    }
  }
  CHECK(t == 50);

  const json summary = json::parse(slurp(dir / "a" / "summary.json"));
  RunConfig again = parse_config(summary.at("config"));
  CHECK(simulate(again).actual_full == summary.at("summary").at("actual_full").get<std::size_t>());
}

TEST_CASE("run exit codes") {
  const fs::path dir = scratch("exit");
  std::ostringstream log;
  CommonOptions opts;
  opts.out_dir = dir / "out";

  json bad = kRunConfig;
  bad["policy"]["warmup"] = 50;
  write_file(dir / "warmup.json", bad.dump());
  CHECK(cmd_run(dir / "warmup.json", opts, log) == kExitConfigError);

  json missing = kRunConfig;
  missing["controller"]["profile"] = "no_such_profile.json";
  write_file(dir / "missing.json", missing.dump());
  CHECK(cmd_run(dir / "missing.json", opts, log) == kExitMissingProfile);

  write_file(dir / "garbage.json", "{ not json");
  CHECK(cmd_run(dir / "garbage.json", opts, log) == kExitConfigError);

  json unknown = kRunConfig;
  unknown["policy"]["warmpu"] = 3;
  write_file(dir / "unknown.json", unknown.dump());
  CHECK(cmd_run(dir / "unknown.json", opts, log) == kExitConfigError);

  CHECK(cmd_run(dir / "absent.json", opts, log) == kExitConfigError);
}

TEST_CASE("seed overrides: flag beats environment beats config") {
  const fs::path dir = scratch("seed");
  write_file(dir / "config.json", kRunConfig.dump());
  std::ostringstream log;
  CommonOptions opts;

  opts.out_dir = dir / "flag";
  opts.seed = 11;
  REQUIRE(cmd_run(dir / "config.json", opts, log) == kExitOk);

  ::setenv("SOFTCAP_SEED", "11", 1);
  opts.seed.reset();
  opts.out_dir = dir / "env";
  REQUIRE(cmd_run(dir / "config.json", opts, log) == kExitOk);
  ::setenv("SOFTCAP_SEED", "eleven", 1);
  CHECK(cmd_run(dir / "config.json", opts, log) == kExitConfigError);
  ::unsetenv("SOFTCAP_SEED");

  CHECK(slurp(dir / "flag" / "trace.jsonl") == slurp(dir / "env" / "trace.jsonl"));
  opts.out_dir = dir / "config";
  REQUIRE(cmd_run(dir / "config.json", opts, log) == kExitOk);
  CHECK(slurp(dir / "flag" / "trace.jsonl") != slurp(dir / "config" / "trace.jsonl"));
}

TEST_CASE("config round-trips through its materialized form") {
  RunConfig cfg = parse_config(kRunConfig);
  cfg.policy.observer.increment = true;
  cfg.policy.controller.profile = ReferenceProfile({{0.0, 0.0}, {0.3, 0.5}, {1.0, 1.0}}, 0.3);
  const RunConfig back = parse_config(json::parse(to_json(cfg).dump()));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(simulate(back).total_cost == simulate(cfg).total_cost);
}

TEST_CASE("sweep rows match single runs and reproduce from their configs") {
  SweepSpec spec;
  spec.base = parse_config(kRunConfig);
  spec.caps = {1, 16, 30};
  spec.seeds = {0, 1, 2};
  const auto rows = run_sweep(spec, 1);
  REQUIRE(rows.size() == 9);
  for (const auto& row : rows) {
    REQUIRE(row.ok);
    RunConfig cfg = spec.base;
    cfg.policy.controller.cap = row.cap;
    cfg.trajectory.seed = row.seed;
    const auto single = simulate(cfg);
    CHECK(single.actual_full == row.summary.actual_full);
    CHECK(single.total_cost == row.summary.total_cost);
    const auto replayed = simulate(parse_config(json::parse(to_json(row.config).dump())));
    CHECK(replayed.actual_full == row.summary.actual_full);
    CHECK(replayed.speedup == row.summary.speedup);
    if (row.cap == 1) CHECK(row.summary.actual_full >= 10);
  }
  const auto threaded = run_sweep(spec, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(threaded[i].summary.total_cost == rows[i].summary.total_cost);

  const auto means = cap_means(rows);
  REQUIRE(means.size() == 3);
  CHECK(means[0].runs == 3);

  SweepSpec bad = spec;
  bad.caps = {16, 8};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sweep command writes outputs and flags failed rows") {
  const fs::path dir = scratch("sweep");
  json spec{{"base", kRunConfig}, {"caps", {8, 24}}, {"seeds", {0, 1}}, {"build_profile", {{"tau_ref", 0.35}, {"seeds", {0, 1}}}}};
  write_file(dir / "sweep.json", spec.dump());
  std::ostringstream log;
  CommonOptions opts;
  opts.out_dir = dir / "out";
  REQUIRE(cmd_sweep(dir / "sweep.json", opts, log) == kExitOk);
  for (const char* f : {"sweep.csv", "sweep_means.csv", "sweep_plot.csv", "profile.json", "configs/cap_8_seed_1.json"}) {
    CHECK(fs::exists(opts.out_dir / f));
  }
  const RunConfig row_cfg = load_config(opts.out_dir / "configs" / "cap_24_seed_1.json");
  CHECK(row_cfg.policy.controller.cap == 24);
  CHECK(row_cfg.policy.controller.profile == load_profile(opts.out_dir / "profile.json"));

  write_file(dir / "broken.trace", "SOFTCAP-TRACE v1 T=5 tokens=1 channels=1\n1\n2\n");
  json replay{{"base", {{"trajectory", {{"kind", "replay"}, {"replay_path", "broken.trace"}}}}},
              {"caps", {8}},
              {"seeds", {0}}};
  write_file(dir / "replay_sweep.json", replay.dump());
  opts.out_dir = dir / "replay";
  CHECK(cmd_sweep(dir / "replay_sweep.json", opts, log) == kExitPartialFailure);
  CHECK(slurp(opts.out_dir / "sweep.csv").find("error:") != std::string::npos);
}

TEST_CASE("ablation modes") {
  AblationSpec spec;
  spec.base = parse_config(kRunConfig);
  spec.seeds = {0, 1};

  SUBCASE("leave-one-out renormalizes the remaining weights") {
    spec.mode = AblationMode::cue_leave_one_out;
    const auto variants = ablation_variants(spec);
    REQUIRE(variants.size() == 5);
    const auto& w = variants[1].config.policy.observer.weights;
    CHECK(w[kMagnitude] == 0.0);
    CHECK(w[kDirection] == doctest::Approx(0.25 / 0.55));
    CHECK(run_ablation(spec).size() == 5);
  }
  SUBCASE("isolated volatility ignores inputs between refreshes") {
    spec.mode = AblationMode::cue_isolated;
    const auto variants = ablation_variants(spec);
    REQUIRE(variants.size() == 4);
    RunConfig cfg = variants[kVolatility].config;
    Trajectory traj = materialize(cfg);
    const auto a = run(traj, cfg.policy, cfg.cost);
    for (const auto& r : a.steps) {
      if (r.action == Action::cache) {
        auto values = std::vector<double>(traj[r.step].values().begin(), traj[r.step].values().end());
        for (double& v : values) v = -3.0 * v + 1.0;
        traj[r.step] = FeatureTensor(traj[r.step].tokens(), traj[r.step].channels(), values);
      }
    }
    const auto b = run(traj, cfg.policy, cfg.cost);
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
      CHECK(a.steps[t].action == b.steps[t].action);
      CHECK(a.steps[t].risk.score == b.steps[t].risk.score);
    }
  }
  SUBCASE("increment on never scores below increment off") {
    spec.mode = AblationMode::increment_on_off;
    const auto variants = ablation_variants(spec);
    REQUIRE(variants.size() == 2);
    RunConfig on = variants[1].config;
    const auto trace = run(materialize(on), on.policy, on.cost);
    for (const auto& r : trace.steps) CHECK(r.risk.score >= r.risk.base);
  }
  SUBCASE("weight grid: one row per tuple, infeasible tuples rejected") {
    spec.mode = AblationMode::weight_grid;
    spec.weight_grid = default_weight_grid();
    CHECK(run_ablation(spec).size() == spec.weight_grid.size());
    spec.weight_grid.push_back({0.5, 0.5, 0.5, 0.5});
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("controller: PI against the matched fixed threshold") {
    spec.mode = AblationMode::controller;
    spec.tau_grid = {0.2, 0.35, 0.5, 0.7};
    const auto rows = run_ablation(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].variant == "pi");
    CHECK(rows[1].variant.rfind("fixed(tau=", 0) == 0);
    CHECK(rows[1].configs[0].policy.controller.mode == ThresholdMode::fixed);
  }
  CHECK(ablation_mode_from_string("weight-grid") == AblationMode::weight_grid);
  CHECK_THROWS_AS(ablation_mode_from_string("everything"), ConfigError);
}

TEST_CASE("ablate command writes one CSV row per variant") {
  const fs::path dir = scratch("ablate");
  json spec{{"mode", "cue-isolated"}, {"base", kRunConfig}, {"seeds", {0}}};
  write_file(dir / "ablate.json", spec.dump());
  std::ostringstream log;
  CommonOptions opts;
  opts.out_dir = dir / "out";
  REQUIRE(cmd_ablate(dir / "ablate.json", opts, log) == kExitOk);
  std::ifstream csv(opts.out_dir / "ablation.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 5);

  spec["weights"] = {{0.9, 0.9, 0.0, 0.0}};
  spec["mode"] = "weight-grid";
  write_file(dir / "bad.json", spec.dump());
  CHECK(cmd_ablate(dir / "bad.json", opts, log) == kExitConfigError);
}

TEST_CASE("profile-build is deterministic and usable at another horizon") {
  const fs::path dir = scratch("profile");
  json spec{{"base", kRunConfig}, {"seeds", {0, 1, 2, 3}}, {"tau_ref", 0.35}};
  write_file(dir / "pb.json", spec.dump());
  std::ostringstream log;
  CommonOptions opts;
  opts.out_dir = dir / "a";
  REQUIRE(cmd_profile_build(dir / "pb.json", opts, log) == kExitOk);
  opts.out_dir = dir / "b";
  opts.jobs = 3;
  REQUIRE(cmd_profile_build(dir / "pb.json", opts, log) == kExitOk);
  CHECK(slurp(dir / "a" / "profile.json") == slurp(dir / "b" / "profile.json"));

  json other = kRunConfig;
  other["trajectory"]["steps"] = 80;
  other["controller"]["profile"] = (dir / "a" / "profile.json").string();
  RunConfig cfg = parse_config(other);
  CHECK(simulate(cfg).actual_full > 0);
}
