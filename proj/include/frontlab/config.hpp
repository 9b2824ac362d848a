#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "frontlab/coefficient.hpp"
#include "frontlab/csv.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/front_solver.hpp"
#include "frontlab/initial_data.hpp"

namespace frontlab {

/// TOML-subset value: number, quoted string, boolean, or array of numbers.
struct TomlValue {
  std::variant<double, std::string, bool, std::vector<double>> v;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<std::vector<double>>(v); }
  double number() const { return std::get<double>(v); }
  const std::string& str() const { return std::get<std::string>(v); }
  bool boolean() const { return std::get<bool>(v); }
  const std::vector<double>& array() const { return std::get<std::vector<double>>(v); }
};

/// section -> key -> value; std::map keeps the canonical (sorted) order.
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline TomlValue parse_toml_value(const std::string& text, int line_no) {
  auto fail = [&](const std::string& msg) -> TomlValue {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
  };
  if (text.empty()) return fail("empty value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') return fail("unterminated string");
    return TomlValue{text.substr(1, text.size() - 2)};
  }
  if (text == "true") return TomlValue{true};
  if (text == "false") return TomlValue{false};
  if (text.front() == '[') {
    if (text.back() != ']') return fail("unterminated array");
    std::vector<double> vals;
    std::string body = text.substr(1, text.size() - 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string item = trim(body.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos));
      if (!item.empty()) {
        char* end = nullptr;
        double d = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size()) return fail("bad array element '" + item + "'");
        vals.push_back(d);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return TomlValue{vals};
  }
  char* end = nullptr;
  double d = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return fail("bad value '" + text + "'");
  return TomlValue{d};
}

}  // namespace detail

/// Parses the sectioned key-value config text (TOML syntax subset: [section],
/// key = value, # comments; values are numbers, "strings", booleans, or
/// arrays of numbers).
inline TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      // keep '#' inside quoted strings
      std::size_t q1 = line.find('"');
      if (q1 == std::string::npos || hash < q1) line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      table[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    table[section][key] = detail::parse_toml_value(val, line_no);
  }
  return table;
}

/// Canonical serialization: sections and keys sorted, numbers at 17
/// significant digits. serialize(parse(.)) is idempotent, which normalizes
/// configs for digesting.
inline std::string serialize_toml(const TomlTable& table) {
  std::string out;
  for (const auto& [section, entries] : table) {
    out += "[" + section + "]\n";
    for (const auto& [key, value] : entries) {
      out += key + " = ";
      if (value.is_number()) {
        out += fmt17(value.number());
      } else if (value.is_string()) {
        out += '"' + value.str() + '"';
      } else if (value.is_bool()) {
        out += value.boolean() ? "true" : "false";
      } else {
        out += '[';
        const auto& arr = value.array();
        for (std::size_t i = 0; i < arr.size(); ++i) {
          if (i) out += ", ";
          out += fmt17(arr[i]);
        }
        out += ']';
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string normalize_config(const std::string& text) {
  return serialize_toml(parse_toml(text));
}

/// FNV-1a 64-bit digest of the normalized config text, as fixed-width hex.
inline std::string config_digest(const std::string& text) {
  const std::string norm = normalize_config(text);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : norm) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Typed view of a run configuration. The raw table is kept for digesting and
/// for subcommand-specific [experiment] keys.
struct RunConfig {
  // [medium]
  std::string a_expr = "1";
  std::string b_expr = "1";
  double omega = 1.0;
  double L = 1.0;

  // [problem]
  double d = 1.0;
  double mu = 1.0;
  std::string mode = "two_front";
  double g0 = -1.0;
  double h0 = 1.0;
  std::string u0 = "cosine_bump";
  double u0_amplitude = 1.0;
  double u0_peak = 1.0;
  double u0_level = 1.0;
  double u0_shoulder_width = 0.25;

  // [numerics]
  int N = 256;
  double dt = 1e-3;
  double T = 1.0;
  int output_count = 50;
  std::vector<double> output_times;  // explicit list wins over output_count
  double tol = 1e-6;
  int eigen_grid = 256;
  int eigen_substeps = 0;
  double left_truncation = -40.0;
  std::string bc_far = "neumann_zero";
  bool snapshots = false;

  std::map<std::string, TomlValue> experiment;
  TomlTable raw;
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const TomlTable& t, const std::string& section)
      : section_(section) {
    auto it = t.find(section);
    if (it != t.end()) entries_ = &it->second;
  }

  template <typename F>
  void number(const char* key, F&& set) {
    const TomlValue* v = find(key);
    if (!v) return;
    if (!v->is_number()) fail(key, "expected a number");
    set(v->number());
  }
  template <typename F>
  void string(const char* key, F&& set) {
    const TomlValue* v = find(key);
    if (!v) return;
    if (!v->is_string()) fail(key, "expected a string");
    set(v->str());
  }
  template <typename F>
  void boolean(const char* key, F&& set) {
    const TomlValue* v = find(key);
    if (!v) return;
    if (!v->is_bool()) fail(key, "expected a boolean");
    set(v->boolean());
  }
  template <typename F>
  void array(const char* key, F&& set) {
    const TomlValue* v = find(key);
    if (!v) return;
    if (!v->is_array()) fail(key, "expected an array");
    set(v->array());
  }

  [[noreturn]] void fail(const char* key, const std::string& msg) const {
    throw ConfigError(section_ + "." + key + ": " + msg);
  }

 private:
  const TomlValue* find(const char* key) const {
    if (!entries_) return nullptr;
    auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
  }
  std::string section_;
  const std::map<std::string, TomlValue>* entries_ = nullptr;
};

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  cfg.raw = parse_toml(text);

  detail::ConfigReader medium(cfg.raw, "medium");
  medium.string("a", [&](const std::string& s) { cfg.a_expr = s; });
  medium.string("b", [&](const std::string& s) { cfg.b_expr = s; });
  medium.number("omega", [&](double v) { cfg.omega = v; });
  medium.number("L", [&](double v) { cfg.L = v; });

  detail::ConfigReader problem(cfg.raw, "problem");
  problem.number("d", [&](double v) { cfg.d = v; });
  problem.number("mu", [&](double v) { cfg.mu = v; });
  problem.string("mode", [&](const std::string& s) { cfg.mode = s; });
  problem.number("g0", [&](double v) { cfg.g0 = v; });
  problem.number("h0", [&](double v) { cfg.h0 = v; });
  problem.string("u0", [&](const std::string& s) { cfg.u0 = s; });
  problem.number("u0_amplitude", [&](double v) { cfg.u0_amplitude = v; });
  problem.number("u0_peak", [&](double v) { cfg.u0_peak = v; });
  problem.number("u0_level", [&](double v) { cfg.u0_level = v; });
  problem.number("u0_shoulder_width", [&](double v) { cfg.u0_shoulder_width = v; });

  detail::ConfigReader numerics(cfg.raw, "numerics");
  numerics.number("N", [&](double v) { cfg.N = static_cast<int>(v); });
  numerics.number("dt", [&](double v) { cfg.dt = v; });
  numerics.number("T", [&](double v) { cfg.T = v; });
  numerics.number("output_count", [&](double v) { cfg.output_count = static_cast<int>(v); });
  numerics.array("output_times", [&](const std::vector<double>& v) { cfg.output_times = v; });
  numerics.number("tol", [&](double v) { cfg.tol = v; });
  numerics.number("eigen_grid", [&](double v) { cfg.eigen_grid = static_cast<int>(v); });
  numerics.number("eigen_substeps", [&](double v) { cfg.eigen_substeps = static_cast<int>(v); });
  numerics.number("left_truncation", [&](double v) { cfg.left_truncation = v; });
  numerics.string("bc_far", [&](const std::string& s) { cfg.bc_far = s; });
  numerics.boolean("snapshots", [&](bool v) { cfg.snapshots = v; });

  auto exp_it = cfg.raw.find("experiment");
  if (exp_it != cfg.raw.end()) cfg.experiment = exp_it->second;

  // validation with field paths
  auto require = [](bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
  };
  require(cfg.omega > 0.0, "medium.omega", "must be positive");
  require(cfg.L > 0.0, "medium.L", "must be positive");
  require(cfg.d > 0.0, "problem.d", "must be positive");
  require(cfg.mu > 0.0, "problem.mu", "must be positive");
  require(cfg.g0 < cfg.h0, "problem.g0", "must satisfy g0 < h0");
  require(cfg.mode == "two_front" || cfg.mode == "half_line_left_front" ||
              cfg.mode == "half_line_right_front" || cfg.mode == "periodic_cell",
          "problem.mode", "unknown mode '" + cfg.mode + "'");
  require(cfg.u0 == "triangle" || cfg.u0 == "cosine_bump" || cfg.u0 == "plateau",
          "problem.u0", "unknown preset '" + cfg.u0 + "'");
  require(cfg.N >= 16, "numerics.N", "must be at least 16");
  require(cfg.dt > 0.0, "numerics.dt", "must be positive");
  require(cfg.T > 0.0, "numerics.T", "must be positive");
  require(cfg.output_count >= 1, "numerics.output_count", "must be at least 1");
  require(cfg.tol > 0.0, "numerics.tol", "must be positive");
  require(cfg.eigen_grid >= 32, "numerics.eigen_grid", "must be at least 32");
  require(cfg.bc_far == "neumann_zero" || cfg.bc_far == "clamp_to_steady",
          "numerics.bc_far", "unknown far boundary '" + cfg.bc_far + "'");

  // the coefficient expressions must parse
  try {
    parse_coefficient(cfg.a_expr);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("medium.a: ") + e.what());
  }
  try {
    parse_coefficient(cfg.b_expr);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("medium.b: ") + e.what());
  }
  return cfg;
}

inline MediumModel make_medium(const RunConfig& cfg) {
  return MediumModel{parse_coefficient(cfg.a_expr), parse_coefficient(cfg.b_expr),
                     cfg.omega, cfg.L};
}

inline InitialData make_initial_data(const RunConfig& cfg) {
  if (cfg.u0 == "triangle") return triangle_data(cfg.g0, cfg.h0, cfg.u0_peak);
  if (cfg.u0 == "plateau")
    return plateau_data(cfg.g0, cfg.h0, cfg.u0_level, cfg.u0_shoulder_width);
  return cosine_bump_data(cfg.g0, cfg.h0, cfg.u0_amplitude);
}

inline ProblemSpec make_problem_spec(const RunConfig& cfg) {
  ProblemSpec spec;
  spec.model = make_medium(cfg);
  spec.d = cfg.d;
  spec.mu = cfg.mu;
  if (cfg.mode == "two_front")
    spec.mode = DomainMode::two_front;
  else if (cfg.mode == "half_line_left_front")
    spec.mode = DomainMode::half_line_left_front;
  else if (cfg.mode == "half_line_right_front")
    spec.mode = DomainMode::half_line_right_front;
  else
    spec.mode = DomainMode::periodic_cell;
  spec.init = make_initial_data(cfg);
  spec.numerics.N = cfg.N;
  spec.numerics.dt = cfg.dt;
  spec.numerics.left_truncation = cfg.left_truncation;
  spec.numerics.bc_far = cfg.bc_far == "clamp_to_steady"
                             ? FarBoundary::clamp_to_steady
                             : FarBoundary::neumann_zero;
  return spec;
}

inline std::vector<double> make_output_times(const RunConfig& cfg) {
  if (!cfg.output_times.empty()) return cfg.output_times;
  return uniform_times(cfg.T, cfg.output_count);
}

}  // namespace frontlab
