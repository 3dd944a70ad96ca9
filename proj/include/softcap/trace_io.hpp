#pragma once

#include <filesystem>
#include <iosfwd>

#include "softcap/feature_tensor.hpp"

namespace softcap {

// Trace files hold one hidden state per step.
//
// Text form:
//   SOFTCAP-TRACE v1 T=<int> tokens=<int> channels=<int>
//   <tokens*channels whitespace-separated values>     (T lines, row-major)
//
// JSON form:
//   {"meta": {"T": .., "tokens": .., "channels": ..}, "steps": [[..], ..]}
//
// Values are written with 17 significant digits so a save/load cycle is
// bit-exact. load_trace() accepts either form (JSON if the first
// non-blank character is '{').

void write_trace(std::ostream& out, const Trajectory& trajectory);
void write_trace_json(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trace(std::istream& in);

void save_trace(const std::filesystem::path& path, const Trajectory& trajectory);
void save_trace_json(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory load_trace(const std::filesystem::path& path);

}  // namespace softcap
