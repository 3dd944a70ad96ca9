#include "softcap/trace_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "softcap/errors.hpp"

namespace softcap {

namespace {

constexpr const char* kMagic = "SOFTCAP-TRACE";

void require_uniform(const Trajectory& trajectory) {
  if (trajectory.empty()) throw InputError("cannot write an empty trajectory");
  for (const auto& h : trajectory) {
    if (!h.same_shape(trajectory.front())) throw InputError("trajectory tensors differ in shape");
  }
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Header {
  std::size_t steps = 0;
  std::size_t tokens = 0;
  std::size_t channels = 0;
};

std::size_t parse_field(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) throw ParseError("malformed header: expected '" + prefix + "<int>'");
  const std::string digits = token.substr(prefix.size());
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("malformed header: bad value for " + key);
  }
  return static_cast<std::size_t>(std::stoull(digits));
}

Header parse_header(const std::string& line) {
  std::istringstream ss(line);
  std::string magic, version, t, tokens, channels, extra;
  if (!(ss >> magic >> version >> t >> tokens >> channels) || magic != kMagic || version != "v1" ||
      (ss >> extra)) {
    throw ParseError("malformed header: '" + line + "'");
  }
  Header h{parse_field(t, "T"), parse_field(tokens, "tokens"), parse_field(channels, "channels")};
  if (h.steps == 0 || h.tokens == 0 || h.channels == 0) {
    throw ParseError("malformed header: T, tokens and channels must be positive");
  }
  return h;
}

bool blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

std::vector<double> parse_values(const std::string& line, std::size_t step, std::size_t expected) {
  std::vector<double> values;
  values.reserve(expected);
  const char* p = line.c_str();
  while (true) {
    while (*p != '\0' && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (*p == '\0') break;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(p, &end);
    if (end == p || (*end != '\0' && !std::isspace(static_cast<unsigned char>(*end)))) {
      throw ParseError("step " + std::to_string(step) + ": invalid number", step);
    }
    values.push_back(v);
    p = end;
  }
  if (values.size() != expected) {
    throw ParseError("step " + std::to_string(step) + ": expected " + std::to_string(expected) +
                         " values, got " + std::to_string(values.size()),
                     step);
  }
  return values;
}

FeatureTensor make_step(const Header& h, std::vector<double> values, std::size_t step) {
  try {
    return FeatureTensor(h.tokens, h.channels, std::move(values));
  } catch (const InputError& e) {
    throw ParseError("step " + std::to_string(step) + ": " + e.what(), step);
  }
}

Trajectory read_text(std::istream& in) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw ParseError("missing header");
  const Header h = parse_header(line);
  const std::size_t n = h.tokens * h.channels;

  Trajectory out;
  out.reserve(h.steps);
  for (std::size_t step = 0; step < h.steps; ++step) {
    if (!std::getline(in, line) || blank(line)) {
      throw ParseError("trace truncated: declared T=" + std::to_string(h.steps) + " but step " +
                           std::to_string(step) + " is missing",
                       step);
    }
    out.push_back(make_step(h, parse_values(line, step, n), step));
  }
  while (std::getline(in, line)) {
    if (!blank(line)) throw ParseError("trailing data after step " + std::to_string(h.steps - 1));
  }
  return out;
}

Trajectory read_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON trace: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("meta") || !doc["meta"].is_object()) {
    throw ParseError("missing header");
  }
  Header h;
  try {
    h.steps = doc["meta"].at("T").get<std::size_t>();
    h.tokens = doc["meta"].at("tokens").get<std::size_t>();
    h.channels = doc["meta"].at("channels").get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("malformed header: meta needs integer T, tokens, channels");
  }
  if (h.steps == 0 || h.tokens == 0 || h.channels == 0) {
    throw ParseError("malformed header: T, tokens and channels must be positive");
  }
  const auto steps = doc.value("steps", nlohmann::json::array());
  if (!steps.is_array()) throw ParseError("steps must be an array");
  const std::size_t n = h.tokens * h.channels;
  Trajectory out;
  for (std::size_t step = 0; step < h.steps; ++step) {
    if (step >= steps.size()) {
      throw ParseError("trace truncated: declared T=" + std::to_string(h.steps) + " but step " +
                           std::to_string(step) + " is missing",
                       step);
    }
    const auto& row = steps[step];
    if (!row.is_array() || row.size() != n) {
      throw ParseError("step " + std::to_string(step) + ": expected " + std::to_string(n) + " values", step);
    }
    std::vector<double> values;
    values.reserve(n);
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError("step " + std::to_string(step) + ": invalid number", step);
      values.push_back(v.get<double>());
    }
    out.push_back(make_step(h, std::move(values), step));
  }
  if (steps.size() > h.steps) throw ParseError("trailing data after step " + std::to_string(h.steps - 1));
  return out;
}

}  // namespace

void write_trace(std::ostream& out, const Trajectory& trajectory) {
  require_uniform(trajectory);
  const auto& first = trajectory.front();
  out << kMagic << " v1 T=" << trajectory.size() << " tokens=" << first.tokens()
      << " channels=" << first.channels() << '\n';
  for (const auto& h : trajectory) {
    const auto values = h.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i != 0) out << ' ';
      out << format_value(values[i]);
    }
    out << '\n';
  }
}

void write_trace_json(std::ostream& out, const Trajectory& trajectory) {
  require_uniform(trajectory);
  nlohmann::json doc;
  doc["meta"] = {{"T", trajectory.size()},
                 {"tokens", trajectory.front().tokens()},
                 {"channels", trajectory.front().channels()}};
  auto steps = nlohmann::json::array();
  for (const auto& h : trajectory) {
    steps.push_back(std::vector<double>(h.values().begin(), h.values().end()));
  }
  doc["steps"] = std::move(steps);
  out << doc.dump() << '\n';
}

Trajectory read_trace(std::istream& in) {
  int c;
  while ((c = in.peek()) != EOF && std::isspace(c)) in.get();
  if (c == '{') return read_json(in);
  return read_text(in);
}

void save_trace(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_trace(out, trajectory);
}

void save_trace_json(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_trace_json(out, trajectory);
}

Trajectory load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file " + path.string());
  return read_trace(in);
}

}  // namespace softcap
