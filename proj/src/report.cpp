#include "softcap/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "softcap/errors.hpp"

namespace softcap {

using nlohmann::ordered_json;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json to_json(const StepRecord& rec) {
  const auto& r = rec.risk;
  ordered_json j;
  j["t"] = rec.step;
  j["action"] = to_string(rec.action);
  j["reason"] = to_string(rec.reason);
  j["anchored"] = r.anchored;
  j["f_mag"] = r.raw[kMagnitude];
  j["f_dir"] = r.raw[kDirection];
  j["f_anc"] = r.raw[kAnchor];
  j["f_vol"] = r.raw[kVolatility];
  j["phi_mag"] = r.normalized[kMagnitude];
  j["phi_dir"] = r.normalized[kDirection];
  j["phi_anc"] = r.normalized[kAnchor];
  j["phi_vol"] = r.normalized[kVolatility];
  j["s_base"] = r.base;
  j["ds"] = r.increment;
  j["s"] = r.score;
  j["tau"] = rec.threshold;
  j["e"] = rec.error;
  j["I"] = rec.integral;
  j["n_actual"] = rec.n_actual;
  j["d"] = rec.distance;
  j["cost"] = rec.cost;
  j["approx_err"] = rec.approx_error;
  return j;
}

ordered_json to_json(const RunSummary& s) {
  ordered_json j;
  j["actual_full"] = s.actual_full;
  j["crossing_full"] = s.crossing_full;
  j["warmup_full"] = s.warmup_full;
  j["guard_full"] = s.guard_full;
  j["total_cost"] = s.total_cost;
  j["speedup"] = s.speedup;
  j["mean_cache_error"] = s.mean_cache_error;
  return j;
}

void write_jsonl(std::ostream& out, const RunTrace& trace) {
  for (const auto& rec : trace.steps) out << to_json(rec).dump() << '\n';
  ordered_json tail;
  tail["summary"] = to_json(trace.summary);
  out << tail.dump() << '\n';
}

void write_csv(std::ostream& out, const RunTrace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& rec : trace.steps) {
    const auto& r = rec.risk;
    out << rec.step << ',' << to_string(rec.action) << ',' << to_string(rec.reason) << ','
        << (r.anchored ? "true" : "false");
    for (double v : r.raw) out << ',' << format_real(v);
    for (double v : r.normalized) out << ',' << format_real(v);
    out << ',' << format_real(r.base) << ',' << format_real(r.increment) << ',' << format_real(r.score) << ','
        << format_real(rec.threshold) << ',' << format_real(rec.error) << ',' << format_real(rec.integral) << ','
        << rec.n_actual << ',' << rec.distance << ',' << format_real(rec.cost) << ','
        << format_real(rec.approx_error) << '\n';
  }
}

void write_run_outputs(const std::filesystem::path& dir, const RunTrace& trace, const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "trace.jsonl");
    if (!out) throw Error("cannot write " + (dir / "trace.jsonl").string());
    write_jsonl(out, trace);
  }
  {
    std::ofstream out(dir / "trace.csv");
    if (!out) throw Error("cannot write " + (dir / "trace.csv").string());
    write_csv(out, trace);
  }
  ordered_json summary;
  summary["summary"] = to_json(trace.summary);
  summary["config"] = config;
  std::ofstream out(dir / "summary.json");
  if (!out) throw Error("cannot write " + (dir / "summary.json").string());
  out << summary.dump(2) << '\n';
}

}  // namespace softcap
