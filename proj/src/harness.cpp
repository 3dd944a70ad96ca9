#include "softcap/harness.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include "parallel.hpp"
#include "softcap/errors.hpp"
#include "softcap/profile_builder.hpp"
#include "softcap/report.hpp"

namespace softcap {

namespace {

using nlohmann::json;

RunConfig parse_base(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.contains("base")) return parse_config(json::object(), base_dir);
  const auto& b = doc.at("base");
  if (b.is_string()) {
    std::filesystem::path p(b.get<std::string>());
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return load_config(p);
  }
  return parse_config(b, base_dir);
}

std::vector<std::uint64_t> parse_seeds(const json& v) {
  if (!v.is_array()) throw ConfigError("seeds must be an array of integers");
  std::vector<std::uint64_t> out;
  for (const auto& s : v) {
    if (s.is_number_unsigned()) {
      out.push_back(s.get<std::uint64_t>());
    } else if (s.is_number_integer()) {
      out.push_back(static_cast<std::uint64_t>(s.get<std::int64_t>()));
    } else {
      throw ConfigError("seeds must be integers");
    }
  }
  return out;
}

void reject_unknown(const json& doc, const std::set<std::string>& allowed) {
  if (!doc.is_object()) throw ConfigError("spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in spec");
  }
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::optional<std::uint64_t> effective_seed(const CommonOptions& opts) {
  if (opts.seed) return opts.seed;
  return seed_from_env();
}

RunSummary simulate(RunConfig& cfg) {
  const Trajectory traj = materialize(cfg);
  return run(traj, cfg.policy, cfg.cost).summary;
}

template <typename Body>
int guarded(std::ostream& log, const char* command, Body&& body) {
  try {
    return body();
  } catch (const MissingProfileError& e) {
    log << command << ": " << e.what() << '\n';
    return kExitMissingProfile;
  } catch (const ConfigError& e) {
    log << command << ": configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    log << command << ": configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    log << command << ": runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

std::string cue_name(std::size_t i) {
  static const char* names[kNumCues] = {"magnitude", "direction", "anchor", "volatility"};
  return names[i];
}

std::string weights_label(const CueVector& w) {
  std::string s = "w=(";
  for (std::size_t i = 0; i < kNumCues; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", w[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + ")";
}

}  // namespace

// ---- profile-build -------------------------------------------------------

ProfileBuildSpec parse_profile_build_spec(const json& doc, const std::filesystem::path& base_dir) {
  ProfileBuildSpec spec;
  try {
    reject_unknown(doc, {"base", "seeds", "tau_ref"});
    spec.base = parse_base(doc, base_dir);
    if (doc.contains("seeds")) spec.seeds = parse_seeds(doc.at("seeds"));
    if (doc.contains("tau_ref")) spec.tau_ref = doc.at("tau_ref").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid profile-build spec: ") + e.what());
  }
  if (spec.seeds.empty()) throw ConfigError("profile-build needs at least one seed");
  if (!(spec.tau_ref > 0.0 && spec.tau_ref < 1.0)) throw ConfigError("tau_ref must lie in (0, 1)");
  return spec;
}

ReferenceProfile build_profile(const ProfileBuildSpec& spec, unsigned jobs) {
  std::vector<Trajectory> ensemble(spec.seeds.size());
  std::vector<RunConfig> configs(spec.seeds.size(), spec.base);
  detail::parallel_for(spec.seeds.size(), jobs, [&](std::size_t i) {
    configs[i].trajectory.seed = spec.seeds[i];
    ensemble[i] = materialize(configs[i]);
  });
  return build_profile(spec.tau_ref, ensemble, configs.front().policy, jobs);
}

// ---- sweep ---------------------------------------------------------------

void SweepSpec::validate() const {
  if (caps.empty()) throw ConfigError("sweep caps must be nonempty");
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (caps[i] == 0) throw ConfigError("sweep caps must be positive");
    if (i > 0 && caps[i] <= caps[i - 1]) throw ConfigError("sweep caps must be strictly increasing");
  }
  if (seeds.empty()) throw ConfigError("sweep seeds must be nonempty");
}

SweepSpec parse_sweep_spec(const json& doc, const std::filesystem::path& base_dir) {
  SweepSpec spec;
  try {
    reject_unknown(doc, {"base", "caps", "seeds", "build_profile"});
    spec.base = parse_base(doc, base_dir);
    spec.caps = doc.at("caps").get<std::vector<std::size_t>>();
    spec.seeds = parse_seeds(doc.at("seeds"));
    if (doc.contains("build_profile")) {
      const auto& b = doc.at("build_profile");
      if (!b.is_object()) throw ConfigError("build_profile must be an object");
      for (const auto& [key, value] : b.items()) {
        if (key != "tau_ref" && key != "seeds") throw ConfigError("unknown key '" + key + "' in build_profile");
      }
      ProfileBuildSpec pb;
      pb.base = spec.base;
      pb.seeds = b.contains("seeds") ? parse_seeds(b.at("seeds")) : spec.seeds;
      pb.tau_ref = b.value("tau_ref", 0.35);
      if (pb.seeds.empty()) throw ConfigError("build_profile needs at least one seed");
      if (!(pb.tau_ref > 0.0 && pb.tau_ref < 1.0)) throw ConfigError("tau_ref must lie in (0, 1)");
      spec.profile_build = std::move(pb);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::vector<SweepRow> run_sweep(SweepSpec spec, unsigned jobs) {
  spec.validate();
  if (spec.profile_build) spec.base.policy.controller.profile = build_profile(*spec.profile_build, jobs);

  std::vector<SweepRow> rows;
  rows.reserve(spec.caps.size() * spec.seeds.size());
  for (std::size_t cap : spec.caps) {
    for (std::uint64_t seed : spec.seeds) {
      SweepRow row;
      row.cap = cap;
      row.seed = seed;
      row.config = spec.base;
      row.config.policy.controller.cap = cap;
      row.config.trajectory.seed = seed;
      rows.push_back(std::move(row));
    }
  }
  detail::parallel_for(rows.size(), jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      row.summary = simulate(row.config);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<CapMean> cap_means(const std::vector<SweepRow>& rows) {
  std::vector<CapMean> out;
  for (const auto& row : rows) {
    if (out.empty() || out.back().cap != row.cap) out.push_back(CapMean{row.cap});
    if (!row.ok) continue;
    CapMean& m = out.back();
    ++m.runs;
    m.actual_full += static_cast<double>(row.summary.actual_full);
    m.crossing_full += static_cast<double>(row.summary.crossing_full);
    m.warmup_full += static_cast<double>(row.summary.warmup_full);
    m.guard_full += static_cast<double>(row.summary.guard_full);
    m.total_cost += row.summary.total_cost;
    m.speedup += row.summary.speedup;
  }
  for (auto& m : out) {
    if (m.runs == 0) continue;
    const double n = static_cast<double>(m.runs);
    m.actual_full /= n;
    m.crossing_full /= n;
    m.warmup_full /= n;
    m.guard_full /= n;
    m.total_cost /= n;
    m.speedup /= n;
  }
  return out;
}

// ---- ablation ------------------------------------------------------------

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::controller:
      return "controller";
    case AblationMode::cue_leave_one_out:
      return "cue-leave-one-out";
    case AblationMode::cue_isolated:
      return "cue-isolated";
    case AblationMode::weight_grid:
      return "weight-grid";
    case AblationMode::increment_on_off:
      return "increment-on-off";
  }
  return "unknown";
}

AblationMode ablation_mode_from_string(const std::string& name) {
  for (auto m : {AblationMode::controller, AblationMode::cue_leave_one_out, AblationMode::cue_isolated,
                 AblationMode::weight_grid, AblationMode::increment_on_off}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown ablation mode '" + name + "'");
}

std::vector<CueVector> default_weight_grid() {
  return {
      {0.45, 0.25, 0.15, 0.15}, {0.40, 0.30, 0.15, 0.15}, {0.50, 0.20, 0.15, 0.15},
      {0.45, 0.25, 0.20, 0.10}, {0.45, 0.25, 0.10, 0.20}, {0.40, 0.25, 0.20, 0.15},
  };
}

void AblationSpec::validate() const {
  if (seeds.empty()) throw ConfigError("ablation seeds must be nonempty");
  if (mode == AblationMode::weight_grid) {
    if (weight_grid.empty()) throw ConfigError("weight-grid ablation needs at least one weight tuple");
    for (const auto& w : weight_grid) {
      ObserverConfig o = base.policy.observer;
      o.weights = w;
      try {
        o.validate();
      } catch (const ConfigError& e) {
        throw ConfigError("infeasible weight tuple " + weights_label(w) + ": " + e.what());
      }
    }
  }
  if (mode == AblationMode::controller) {
    for (double tau : tau_grid) {
      if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau_grid values must lie in (0, 1)");
    }
  }
}

AblationSpec parse_ablation_spec(const json& doc, const std::filesystem::path& base_dir) {
  AblationSpec spec;
  try {
    reject_unknown(doc, {"mode", "base", "seeds", "weights", "tau_grid"});
    spec.mode = ablation_mode_from_string(doc.at("mode").get<std::string>());
    spec.base = parse_base(doc, base_dir);
    if (doc.contains("seeds")) spec.seeds = parse_seeds(doc.at("seeds"));
    if (doc.contains("weights")) {
      for (const auto& w : doc.at("weights")) {
        if (!w.is_array() || w.size() != kNumCues) throw ConfigError("weight tuples need 4 entries");
        CueVector v{};
        for (std::size_t i = 0; i < kNumCues; ++i) v[i] = w[i].get<double>();
        spec.weight_grid.push_back(v);
      }
    } else if (spec.mode == AblationMode::weight_grid) {
      spec.weight_grid = default_weight_grid();
    }
    if (doc.contains("tau_grid")) spec.tau_grid = doc.at("tau_grid").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid ablation spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::vector<AblationVariant> ablation_variants(const AblationSpec& spec) {
  std::vector<AblationVariant> out;
  const CueVector base_w = spec.base.policy.observer.weights;
  auto with_weights = [&](const std::string& name, CueVector w) {
    AblationVariant v{name, spec.base};
    v.config.policy.observer.weights = w;
    v.config.policy.observer.validate();
    out.push_back(std::move(v));
  };
  switch (spec.mode) {
    case AblationMode::cue_leave_one_out:
      out.push_back({"full", spec.base});
      for (std::size_t drop = 0; drop < kNumCues; ++drop) {
        CueVector w = base_w;
        w[drop] = 0.0;
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) throw ConfigError("dropping " + cue_name(drop) + " leaves no weight");
        for (double& x : w) x /= total;
        with_weights("no-" + cue_name(drop), w);
      }
      break;
    case AblationMode::cue_isolated:
      for (std::size_t keep = 0; keep < kNumCues; ++keep) {
        CueVector w{};
        w[keep] = 1.0;
        with_weights("only-" + cue_name(keep), w);
      }
      break;
    case AblationMode::weight_grid:
      for (const auto& w : spec.weight_grid) with_weights(weights_label(w), w);
      break;
    case AblationMode::increment_on_off: {
      AblationVariant off{"increment-off", spec.base};
      off.config.policy.observer.increment = false;
      AblationVariant on{"increment-on", spec.base};
      on.config.policy.observer.increment = true;
      out.push_back(std::move(off));
      out.push_back(std::move(on));
      break;
    }
    case AblationMode::controller: {
      AblationVariant pi{"pi", spec.base};
      pi.config.policy.controller.mode = ThresholdMode::pi;
      out.push_back(std::move(pi));
      break;
    }
  }
  return out;
}

namespace {

AblationRow evaluate_variant(const AblationVariant& variant, const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  AblationRow row;
  row.variant = variant.name;
  row.configs.assign(seeds.size(), variant.config);
  std::vector<RunSummary> summaries(seeds.size());
  detail::parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    row.configs[i].trajectory.seed = seeds[i];
    summaries[i] = simulate(row.configs[i]);
  });
  for (const auto& s : summaries) {
    row.actual_full += static_cast<double>(s.actual_full);
    row.total_cost += s.total_cost;
    row.mean_cache_error += s.mean_cache_error;
  }
  const double n = static_cast<double>(seeds.size());
  row.actual_full /= n;
  row.total_cost /= n;
  row.mean_cache_error /= n;
  return row;
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int i = 5; i <= 95; ++i) grid.push_back(i / 100.0);
  return grid;
}

}  // namespace

std::vector<AblationRow> run_ablation(const AblationSpec& spec, unsigned jobs) {
  spec.validate();
  const auto variants = ablation_variants(spec);
  std::vector<AblationRow> rows;
  for (const auto& v : variants) rows.push_back(evaluate_variant(v, spec.seeds, jobs));

  if (spec.mode == AblationMode::controller) {
    // Fixed-threshold variant whose mean Full count is closest to the PI run.
    const double target = rows.front().actual_full;
    const auto grid = spec.tau_grid.empty() ? default_tau_grid() : spec.tau_grid;
    std::optional<AblationRow> best;
    double best_gap = 0.0;
    double best_tau = 0.0;
    for (double tau : grid) {
      AblationVariant fixed{"", spec.base};
      fixed.config.policy.controller.mode = ThresholdMode::fixed;
      fixed.config.policy.controller.tau0 = tau;
      char label[48];
      std::snprintf(label, sizeof label, "fixed(tau=%g)", tau);
      fixed.name = label;
      AblationRow row = evaluate_variant(fixed, spec.seeds, jobs);
      const double gap = std::abs(row.actual_full - target);
      const double tie = std::abs(tau - spec.base.policy.controller.tau0);
      if (!best || gap < best_gap || (gap == best_gap && tie < std::abs(best_tau - spec.base.policy.controller.tau0))) {
        best = std::move(row);
        best_gap = gap;
        best_tau = tau;
      }
    }
    rows.push_back(std::move(*best));
  }
  return rows;
}

// ---- commands ------------------------------------------------------------

int cmd_run(const std::filesystem::path& config_path, const CommonOptions& opts, std::ostream& log) {
  return guarded(log, "run", [&] {
    RunConfig cfg = load_config(config_path);
    if (auto seed = effective_seed(opts)) cfg.trajectory.seed = *seed;
    const Trajectory traj = materialize(cfg);
    const RunTrace trace = run(traj, cfg.policy, cfg.cost);
    write_run_outputs(opts.out_dir, trace, to_json(cfg));
    const auto& s = trace.summary;
    log << "run: T=" << trace.steps.size() << " actual_full=" << s.actual_full << " (warmup " << s.warmup_full
        << ", guard " << s.guard_full << ", crossing " << s.crossing_full << ") total_cost=" << std::setprecision(6) << s.total_cost
        << " speedup=" << s.speedup << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log) {
  return guarded(log, "sweep", [&] {
    SweepSpec spec = parse_sweep_spec(read_json_file(spec_path), spec_path.parent_path());
    if (auto seed = effective_seed(opts)) spec.seeds = {*seed};
    if (spec.profile_build) {
      if (auto seed = effective_seed(opts)) spec.profile_build->seeds = {*seed};
    }
    const std::filesystem::path out = opts.out_dir;
    std::filesystem::create_directories(out / "configs");

    if (spec.profile_build) {
      spec.base.policy.controller.profile = build_profile(*spec.profile_build, opts.jobs);
      save_profile(out / "profile.json", spec.base.policy.controller.profile);
      spec.profile_build.reset();
    }
    const auto rows = run_sweep(spec, opts.jobs);

    std::ofstream csv(out / "sweep.csv");
    csv << "cap,seed,actual_full,crossing_full,warmup_full,guard_full,total_cost,speedup,status\n";
    std::size_t failures = 0;
    for (const auto& row : rows) {
      write_json(out / "configs" / ("cap_" + std::to_string(row.cap) + "_seed_" + std::to_string(row.seed) + ".json"),
                 to_json(row.config));
      csv << row.cap << ',' << row.seed << ',';
      if (row.ok) {
        const auto& s = row.summary;
        csv << s.actual_full << ',' << s.crossing_full << ',' << s.warmup_full << ',' << s.guard_full << ','
            << format_real(s.total_cost) << ',' << format_real(s.speedup) << ",ok\n";
      } else {
        ++failures;
        std::string msg = row.error;
        for (char& c : msg) {
          if (c == ',' || c == '\n') c = ' ';
        }
        csv << ",,,,,,error: " << msg << '\n';
        log << "sweep: cap=" << row.cap << " seed=" << row.seed << " failed: " << row.error << '\n';
      }
    }

    std::ofstream means(out / "sweep_means.csv");
    std::ofstream plot(out / "sweep_plot.csv");
    means << "cap,runs,actual_full,crossing_full,warmup_full,guard_full,total_cost,speedup\n";
    plot << "cap,mean_actual_full\n";
    log << "  cap  actual  crossing  warmup  guard\n";
    for (const auto& m : cap_means(rows)) {
      means << m.cap << ',' << m.runs << ',' << format_real(m.actual_full) << ',' << format_real(m.crossing_full)
            << ',' << format_real(m.warmup_full) << ',' << format_real(m.guard_full) << ','
            << format_real(m.total_cost) << ',' << format_real(m.speedup) << '\n';
      plot << m.cap << ',' << format_real(m.actual_full) << '\n';
      char line[96];
      std::snprintf(line, sizeof line, "%5zu  %6.2f  %8.2f  %6.2f  %5.2f\n", m.cap, m.actual_full, m.crossing_full,
                    m.warmup_full, m.guard_full);
      log << line;
    }
    return failures == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitPartialFailure);
  });
}

int cmd_ablate(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log) {
  return guarded(log, "ablate", [&] {
    AblationSpec spec = parse_ablation_spec(read_json_file(spec_path), spec_path.parent_path());
    if (auto seed = effective_seed(opts)) spec.seeds = {*seed};
    const auto rows = run_ablation(spec, opts.jobs);

    const std::filesystem::path out = opts.out_dir;
    std::filesystem::create_directories(out / "configs");
    std::ofstream csv(out / "ablation.csv");
    csv << "variant,actual_full,total_cost,mean_cache_l2_error\n";
    log << "ablate (" << to_string(spec.mode) << ", " << spec.seeds.size() << " seeds)\n";
    for (const auto& row : rows) {
      csv << '"' << row.variant << '"' << ',' << format_real(row.actual_full) << ',' << format_real(row.total_cost)
          << ',' << format_real(row.mean_cache_error) << '\n';
      for (std::size_t i = 0; i < row.configs.size(); ++i) {
        write_json(out / "configs" / (slug(row.variant) + "_seed_" + std::to_string(spec.seeds[i]) + ".json"),
                   to_json(row.configs[i]));
      }
      char line[160];
      std::snprintf(line, sizeof line, "  %-32s actual=%6.2f cost=%9.2f err=%.4g\n", row.variant.c_str(),
                    row.actual_full, row.total_cost, row.mean_cache_error);
      log << line;
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_profile_build(const std::filesystem::path& spec_path, const CommonOptions& opts, std::ostream& log) {
  return guarded(log, "profile-build", [&] {
    ProfileBuildSpec spec = parse_profile_build_spec(read_json_file(spec_path), spec_path.parent_path());
    if (auto seed = effective_seed(opts)) spec.seeds = {*seed};
    const ReferenceProfile profile = build_profile(spec, opts.jobs);
    std::filesystem::create_directories(opts.out_dir);
    const auto path = opts.out_dir / "profile.json";
    save_profile(path, profile);
    log << "profile-build: tau_ref=" << spec.tau_ref << " ensemble=" << spec.seeds.size()
        << " knots=" << profile.knots().size() << " -> " << path.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace softcap
