#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "softcap/policy.hpp"

namespace softcap {

// Trace encodings.
//
// JSONL: one object per step with keys
//   t, action, reason, anchored, f_mag, f_dir, f_anc, f_vol,
//   phi_mag, phi_dir, phi_anc, phi_vol, s_base, ds, s, tau, e, I,
//   n_actual, d, cost, approx_err
// followed by a trailing {"summary": {...}} line.
//
// CSV: header row with the same step keys in the same order, then one row
// per step, reals as %.17g. JSON reals use the shortest round-trip form, so
// both encodings parse back to identical doubles.

inline constexpr const char* kTraceCsvHeader =
    "t,action,reason,anchored,f_mag,f_dir,f_anc,f_vol,phi_mag,phi_dir,phi_anc,phi_vol,"
    "s_base,ds,s,tau,e,I,n_actual,d,cost,approx_err";

nlohmann::ordered_json to_json(const StepRecord& rec);
nlohmann::ordered_json to_json(const RunSummary& summary);

void write_jsonl(std::ostream& out, const RunTrace& trace);
void write_csv(std::ostream& out, const RunTrace& trace);

/// %.17g
std::string format_real(double v);

/// Writes trace.jsonl, trace.csv and summary.json (summary plus config snapshot).
void write_run_outputs(const std::filesystem::path& dir, const RunTrace& trace, const nlohmann::json& config);

}  // namespace softcap
