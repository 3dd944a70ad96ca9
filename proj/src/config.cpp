#include "softcap/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "softcap/errors.hpp"

namespace softcap {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& name, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError("section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in section '" + name + "'");
  }
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

void read_size(const json& section, const char* key, std::size_t& out) {
  if (!section.contains(key)) return;
  const auto& v = section.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  }
  out = v.get<std::size_t>();
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("seed must be an integer");
}

CueVector read_cues(const json& v, const char* key) {
  if (!v.is_array() || v.size() != kNumCues) throw ConfigError(std::string("'") + key + "' needs 4 numbers");
  CueVector out{};
  for (std::size_t i = 0; i < kNumCues; ++i) out[i] = v[i].get<double>();
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return path;
}

void parse_trajectory(const json& s, const std::filesystem::path& base_dir, TrajectorySpec& t) {
  reject_unknown(s, "trajectory",
                 {"kind", "steps", "tokens", "channels", "degree", "noise_scale", "bursts", "seed", "replay_path",
                  "coefficients"});
  if (s.contains("kind")) t.kind = trajectory_kind_from_string(s.at("kind").get<std::string>());
  if (t.kind == TrajectoryKind::replay) {
    // Shape comes from the file unless pinned explicitly.
    t.steps = 0;
    t.tokens = 0;
    t.channels = 0;
  }
  read_size(s, "steps", t.steps);
  read_size(s, "tokens", t.tokens);
  read_size(s, "channels", t.channels);
  if (s.contains("degree")) {
    std::size_t degree = 0;
    read_size(s, "degree", degree);
    if (degree > kMaxPolynomialDegree) throw ConfigError("polynomial degree exceeds 8");
    t.degree = static_cast<unsigned>(degree);
  }
  read(s, "noise_scale", t.noise_scale);
  if (s.contains("seed")) t.seed = parse_seed(s.at("seed"));
  if (s.contains("replay_path") && !s.at("replay_path").is_null()) {
    t.replay_path = resolve(base_dir, s.at("replay_path").get<std::string>());
  }
  read(s, "coefficients", t.coefficients);
  if (s.contains("bursts")) {
    t.bursts.clear();
    for (const auto& b : s.at("bursts")) {
      Burst burst;
      if (b.is_array() && b.size() == 3) {
        burst = {b[0].get<std::size_t>(), b[1].get<std::size_t>(), b[2].get<double>()};
      } else if (b.is_object()) {
        burst = {b.at("start").get<std::size_t>(), b.at("end").get<std::size_t>(), b.at("amplitude").get<double>()};
      } else {
        throw ConfigError("burst must be [start, end, amplitude] or an object");
      }
      t.bursts.push_back(burst);
    }
  }
}

void parse_cache(const json& s, CacheConfig& c) {
  reject_unknown(s, "cache", {"order", "max_skip", "scheme"});
  read_size(s, "order", c.order);
  read_size(s, "max_skip", c.max_skip);
  if (s.contains("scheme")) c.scheme = coefficient_scheme_from_string(s.at("scheme").get<std::string>());
}

void parse_observer(const json& s, ObserverConfig& o) {
  reject_unknown(s, "observer", {"norm_constants", "weights", "epsilon", "gamma", "increment", "reset_on_refresh"});
  if (s.contains("norm_constants")) o.norm_constants = read_cues(s.at("norm_constants"), "norm_constants");
  if (s.contains("weights")) o.weights = read_cues(s.at("weights"), "weights");
  read(s, "epsilon", o.epsilon);
  read(s, "gamma", o.gamma);
  read(s, "increment", o.increment);
  read(s, "reset_on_refresh", o.reset_on_refresh);
}

void parse_controller(const json& s, const std::filesystem::path& base_dir, ControllerConfig& c) {
  reject_unknown(s, "controller",
                 {"mode", "cap", "tau0", "kp", "ki", "tau_min", "tau_max", "integral_min", "integral_max", "profile"});
  if (s.contains("mode")) c.mode = threshold_mode_from_string(s.at("mode").get<std::string>());
  read_size(s, "cap", c.cap);
  read(s, "tau0", c.tau0);
  read(s, "kp", c.kp);
  read(s, "ki", c.ki);
  read(s, "tau_min", c.tau_min);
  read(s, "tau_max", c.tau_max);
  read(s, "integral_min", c.integral_min);
  read(s, "integral_max", c.integral_max);
  if (s.contains("profile") && !s.at("profile").is_null()) {
    const auto& p = s.at("profile");
    if (p.is_string()) {
      c.profile = load_profile(resolve(base_dir, p.get<std::string>()));
    } else if (p.is_object()) {
      c.profile = profile_from_json(p);
    } else {
      throw ConfigError("controller.profile must be a path or an inline profile object");
    }
  }
}

void parse_cost(const json& s, CostModel& c) {
  reject_unknown(s, "cost", {"preset", "c_full", "c_cache", "c_obs", "c_ctrl"});
  if (s.contains("preset")) c = CostModel::preset(s.at("preset").get<std::string>());
  read(s, "c_full", c.c_full);
  read(s, "c_cache", c.c_cache);
  read(s, "c_obs", c.c_obs);
  read(s, "c_ctrl", c.c_ctrl);
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    reject_unknown(doc, "<root>", {"trajectory", "cache", "observer", "controller", "policy", "cost"});
    if (doc.contains("trajectory")) parse_trajectory(doc.at("trajectory"), base_dir, cfg.trajectory);
    if (doc.contains("cache")) parse_cache(doc.at("cache"), cfg.policy.cache);
    if (doc.contains("observer")) parse_observer(doc.at("observer"), cfg.policy.observer);
    if (doc.contains("controller")) parse_controller(doc.at("controller"), base_dir, cfg.policy.controller);
    if (doc.contains("policy")) {
      const auto& s = doc.at("policy");
      reject_unknown(s, "policy", {"warmup"});
      read_size(s, "warmup", cfg.policy.warmup);
    }
    if (doc.contains("cost")) parse_cost(doc.at("cost"), cfg.cost);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  validate(cfg.trajectory);
  cfg.cost.validate();
  cfg.policy.steps = cfg.trajectory.steps;
  if (cfg.trajectory.kind != TrajectoryKind::replay || cfg.policy.steps != 0) {
    cfg.policy.validate();
  } else {
    cfg.policy.cache.validate();
    cfg.policy.observer.validate();
    cfg.policy.controller.validate();
  }
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path), path.parent_path());
}

json to_json(const RunConfig& cfg) {
  const auto& t = cfg.trajectory;
  json traj = {{"kind", to_string(t.kind)},
               {"steps", t.steps},
               {"tokens", t.tokens},
               {"channels", t.channels},
               {"degree", t.degree},
               {"noise_scale", t.noise_scale},
               {"seed", t.seed},
               {"coefficients", t.coefficients}};
  auto bursts = json::array();
  for (const auto& b : t.bursts) bursts.push_back({b.start, b.end, b.amplitude});
  traj["bursts"] = std::move(bursts);
  traj["replay_path"] = t.replay_path ? json(std::filesystem::absolute(*t.replay_path).string()) : json(nullptr);

  const auto& p = cfg.policy;
  const auto& c = p.controller;
  return {
      {"trajectory", std::move(traj)},
      {"cache", {{"order", p.cache.order}, {"max_skip", p.cache.max_skip}, {"scheme", to_string(p.cache.scheme)}}},
      {"observer",
       {{"norm_constants", p.observer.norm_constants},
        {"weights", p.observer.weights},
        {"epsilon", p.observer.epsilon},
        {"gamma", p.observer.gamma},
        {"increment", p.observer.increment},
        {"reset_on_refresh", p.observer.reset_on_refresh}}},
      {"controller",
       {{"mode", to_string(c.mode)},
        {"cap", c.cap},
        {"tau0", c.tau0},
        {"kp", c.kp},
        {"ki", c.ki},
        {"tau_min", c.tau_min},
        {"tau_max", c.tau_max},
        {"integral_min", c.integral_min},
        {"integral_max", c.integral_max},
        {"profile", to_json(c.profile)}}},
      {"policy", {{"warmup", p.warmup}}},
      {"cost",
       {{"c_full", cfg.cost.c_full},
        {"c_cache", cfg.cost.c_cache},
        {"c_obs", cfg.cost.c_obs},
        {"c_ctrl", cfg.cost.c_ctrl}}},
  };
}

Trajectory materialize(RunConfig& cfg) {
  Trajectory traj = generate(cfg.trajectory);
  if (cfg.policy.steps == 0) cfg.policy.steps = traj.size();
  cfg.policy.validate();
  return traj;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("SOFTCAP_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(env, &pos);
    if (pos != std::string(env).size()) throw std::invalid_argument("trailing");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(std::string("SOFTCAP_SEED is not an integer: ") + env);
  }
}

}  // namespace softcap
