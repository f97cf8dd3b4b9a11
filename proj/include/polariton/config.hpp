#pragma once

// key = value configuration files.
//
//   # comment
//   omega = 3          # trailing comments allowed
//   abs_v_over_u = 1.2, 0.99, 0.5, 0.01
//
// Keys are checked against a fixed registry when the file is parsed; unknown
// and duplicate keys are errors. Physical quantities are in units of Gamma.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/eigensolver.hpp"
#include "polariton/errors.hpp"
#include "polariton/fock_basis.hpp"
#include "polariton/hamiltonian.hpp"
#include "polariton/optical_map.hpp"

namespace polariton {

/// Shortest text that reads back to the same double ("%.17g").
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

enum class ValueKind { real, integer, unsigned64, boolean, real_list, boundary, cap };

inline const std::map<std::string, ValueKind, std::less<>>& config_keys() {
  static const std::map<std::string, ValueKind, std::less<>> keys = {
      // optical knobs
      {"gamma", ValueKind::real},
      {"eta", ValueKind::real},
      {"delta2", ValueKind::real},
      {"delta3", ValueKind::real},
      {"delta4", ValueKind::real},
      {"delta_q", ValueKind::real},
      {"omega", ValueKind::real},
      {"n_atom", ValueKind::real},
      {"n_mod", ValueKind::real},
      {"n_sites", ValueKind::real},
      {"delta_omega", ValueKind::real},
      {"strictness", ValueKind::real},
      {"lambda_xi_corrections", ValueKind::boolean},
      // optical grid
      {"delta_q_min", ValueKind::real},
      {"delta_q_max", ValueKind::real},
      {"delta_q_steps", ValueKind::integer},
      {"delta4_min", ValueKind::real},
      {"delta4_max", ValueKind::real},
      {"delta4_steps", ValueKind::integer},
      // lattice model
      {"sites", ValueKind::integer},
      {"n_up", ValueKind::integer},
      {"n_down", ValueKind::integer},
      {"nmax", ValueKind::cap},
      {"boundary", ValueKind::boundary},
      {"t_over_u", ValueKind::real_list},
      {"abs_v_over_u", ValueKind::real_list},
      {"abs_v_over_u_min", ValueKind::real},
      {"abs_v_over_u_max", ValueKind::real},
      {"abs_v_over_u_steps", ValueKind::integer},
      // solver
      {"k", ValueKind::integer},
      {"tol", ValueKind::real},
      {"max_iter", ValueKind::integer},
      {"seed", ValueKind::unsigned64},
  };
  return keys;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  // strtod handles inf/nan and the full decimal grammar; reject trailing junk.
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> to_real_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = to_real(s.substr(0, comma));
    if (!item) return std::nullopt;
    out.push_back(*item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline std::optional<Boundary> to_boundary(std::string_view s) {
  s = trim(s);
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  return std::nullopt;
}

// "inf" / "unbounded" -> kUnbounded; otherwise a positive integer.
inline std::optional<SiteCap> to_cap(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "unbounded") return SiteCap{kUnbounded};
  const auto v = to_integer<int>(s);
  if (!v || *v < 1) return std::nullopt;
  return SiteCap{*v};
}

inline std::optional<bool> to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

inline bool valid_value(ValueKind kind, std::string_view v) {
  switch (kind) {
    case ValueKind::real: return to_real(v).has_value();
    case ValueKind::integer: return to_integer<long long>(v).has_value();
    case ValueKind::unsigned64: return to_integer<std::uint64_t>(v).has_value();
    case ValueKind::boolean: return to_bool(v).has_value();
    case ValueKind::real_list: return to_real_list(v).has_value();
    case ValueKind::boundary: return to_boundary(v).has_value();
    case ValueKind::cap: return to_cap(v).has_value();
  }
  return false;
}

}  // namespace detail

/// Parsed and syntax-checked key/value pairs.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::size_t line;
  };

  bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

  void set(std::string key, std::string value, std::size_t line = 0) {
    entries_[std::move(key)] = {std::move(value), line};
  }

  std::optional<double> real(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_real(e->value) : std::nullopt;
  }
  std::optional<long long> integer(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_integer<long long>(e->value) : std::nullopt;
  }
  std::optional<std::uint64_t> unsigned64(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_integer<std::uint64_t>(e->value) : std::nullopt;
  }
  std::optional<bool> boolean(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_bool(e->value) : std::nullopt;
  }
  std::optional<std::vector<double>> real_list(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_real_list(e->value) : std::nullopt;
  }
  std::optional<Boundary> boundary(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_boundary(e->value) : std::nullopt;
  }
  std::optional<SiteCap> cap(std::string_view key) const {
    const auto* e = find(key);
    return e ? detail::to_cap(e->value) : std::nullopt;
  }

  double require_real(std::string_view key) const {
    const auto v = real(key);
    if (!v) throw ConfigError(0, "missing required key '" + std::string(key) + "'");
    return *v;
  }

  std::size_t line_of(std::string_view key) const {
    const auto* e = find(key);
    return e ? e->line : 0;
  }

 private:
  const Entry* find(std::string_view key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::map<std::string, Entry, std::less<>> entries_;
};

inline ConfigFile parse_config_text(std::string_view text) {
  ConfigFile cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");

    const auto& keys = config_keys();
    const auto kind = keys.find(key);
    if (kind == keys.end()) throw ConfigError(line_no, "unknown key '" + key + "'");
    if (cfg.has(key)) {
      throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(cfg.line_of(key)) + ")");
    }
    if (!detail::valid_value(kind->second, value)) {
      throw ConfigError(line_no, "invalid value '" + std::string(value) + "' for key '" + key + "'");
    }
    cfg.set(key, std::string(value), line_no);
  }
  return cfg;
}

inline ConfigFile parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Typed views

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  std::vector<double> points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      out.push_back(steps == 1 ? min : min + (max - min) * i / (steps - 1));
    }
    return out;
  }
};

struct OpticalJob {
  OpticalParams base;  // delta_q and delta4 are overridden by the grids
  Grid delta_q;
  Grid delta4;
  MapOptions map;
  double strictness = 10.0;
  unsigned threads = 1;
};

struct ModelJob {
  int sites = 8;
  int n_up = 3;
  int n_down = 3;
  SiteCap cap = kUnbounded;
  Boundary boundary = Boundary::periodic;
  std::vector<double> t_over_u{0.01};
  std::vector<double> abs_v_over_u;
  SolverOptions solver;
  std::size_t dense_limit = kDefaultDenseLimit;
  unsigned threads = 1;
};

namespace detail {

inline const char* const kOpticalKeys[] = {"gamma",  "eta",   "delta2", "delta3",
                                           "delta4", "delta_q", "omega", "n_atom",
                                           "n_mod",  "n_sites", "delta_omega"};

inline double* optical_field(OpticalParams& p, std::string_view key) {
  if (key == "gamma") return &p.gamma;
  if (key == "eta") return &p.eta;
  if (key == "delta2") return &p.delta2;
  if (key == "delta3") return &p.delta3;
  if (key == "delta4") return &p.delta4;
  if (key == "delta_q") return &p.delta_q;
  if (key == "omega") return &p.omega;
  if (key == "n_atom") return &p.n_atom;
  if (key == "n_mod") return &p.n_mod;
  if (key == "n_sites") return &p.n_sites;
  if (key == "delta_omega") return &p.delta_omega;
  return nullptr;
}

// Keys that belong to the optical map rather than the lattice model.
inline bool is_optical_key(std::string_view key) {
  for (const char* k : kOpticalKeys) {
    if (key == k) return true;
  }
  return key == "strictness" || key == "lambda_xi_corrections";
}

inline void check_optical(const OpticalParams& p, const ConfigFile& cfg) {
  if (!(p.omega > 0.0)) throw ConfigError(cfg.line_of("omega"), "omega must be positive");
  if (!(p.gamma > 0.0)) throw ConfigError(cfg.line_of("gamma"), "gamma must be positive");
  if (!(p.eta > 0.0)) throw ConfigError(cfg.line_of("eta"), "eta must be positive");
  if (!(p.n_atom > 0.0)) throw ConfigError(cfg.line_of("n_atom"), "n_atom must be positive");
  if (!(p.n_sites > 0.0)) throw ConfigError(cfg.line_of("n_sites"), "n_sites must be positive");
  if (!(p.n_mod > 0.0 && p.n_mod < p.n_atom)) {
    throw ConfigError(cfg.line_of("n_mod"), "n_mod must satisfy 0 < n_mod < n_atom");
  }
}

inline Grid require_grid(const ConfigFile& cfg, const std::string& name) {
  Grid g;
  g.min = cfg.require_real(name + "_min");
  g.max = cfg.require_real(name + "_max");
  const auto steps = cfg.integer(name + "_steps");
  if (!steps) throw ConfigError(0, "missing required key '" + name + "_steps'");
  if (*steps < 1) throw ConfigError(cfg.line_of(name + "_steps"), name + "_steps must be >= 1");
  g.steps = static_cast<int>(*steps);
  return g;
}

}  // namespace detail

/// Optical parameters. `gamma` and `delta_omega` default to 1 and 0; every
/// other knob must be present unless listed in `optional_keys`.
inline OpticalParams optical_params(const ConfigFile& cfg,
                                    const std::vector<std::string>& optional_keys = {}) {
  OpticalParams p;
  for (const char* key : detail::kOpticalKeys) {
    const std::string_view k(key);
    const bool defaulted = k == "gamma" || k == "delta_omega" ||
                           std::find(optional_keys.begin(), optional_keys.end(), k) != optional_keys.end();
    if (defaulted) {
      if (const auto v = cfg.real(k)) *detail::optical_field(p, k) = *v;
    } else {
      *detail::optical_field(p, k) = cfg.require_real(k);
    }
  }
  detail::check_optical(p, cfg);
  return p;
}

inline MapOptions map_options(const ConfigFile& cfg) {
  MapOptions m;
  m.lambda_xi_corrections = cfg.boolean("lambda_xi_corrections").value_or(false);
  return m;
}

inline double strictness(const ConfigFile& cfg) {
  const double s = cfg.real("strictness").value_or(10.0);
  if (!(s > 0.0)) throw ConfigError(cfg.line_of("strictness"), "strictness must be positive");
  return s;
}

inline OpticalJob optical_job(const ConfigFile& cfg) {
  OpticalJob job;
  job.base = optical_params(cfg, {"delta_q", "delta4"});
  job.delta_q = detail::require_grid(cfg, "delta_q");
  job.delta4 = detail::require_grid(cfg, "delta4");
  job.map = map_options(cfg);
  job.strictness = strictness(cfg);
  return job;
}

inline SolverOptions solver_options(const ConfigFile& cfg) {
  SolverOptions s;
  if (const auto k = cfg.integer("k")) {
    if (*k < 1 || *k > 16) throw ConfigError(cfg.line_of("k"), "k must lie in [1, 16]");
    s.k = static_cast<std::size_t>(*k);
  }
  if (const auto tol = cfg.real("tol")) {
    if (!(*tol > 0.0)) throw ConfigError(cfg.line_of("tol"), "tol must be positive");
    s.tol = *tol;
  }
  if (const auto it = cfg.integer("max_iter")) {
    if (*it < 1) throw ConfigError(cfg.line_of("max_iter"), "max_iter must be >= 1");
    s.max_iter = static_cast<std::size_t>(*it);
  }
  if (const auto seed = cfg.unsigned64("seed")) s.seed = *seed;
  return s;
}

/// Default |V|/U grid for crossover sweeps: 0.05, 0.10, ..., 1.50.
inline std::vector<double> default_crossover_grid() { return Grid{0.05, 1.5, 30}.points(); }

inline ModelJob model_job(const ConfigFile& cfg, std::vector<double> default_abs_v) {
  ModelJob job;
  const auto positive_int = [&](const char* key, int& out, int lo) {
    if (const auto v = cfg.integer(key)) {
      if (*v < lo) throw ConfigError(cfg.line_of(key), std::string(key) + " is out of range");
      out = static_cast<int>(*v);
    }
  };
  positive_int("sites", job.sites, 1);
  positive_int("n_up", job.n_up, 0);
  positive_int("n_down", job.n_down, 0);
  if (const auto cap = cfg.cap("nmax")) job.cap = *cap;
  if (const auto b = cfg.boundary("boundary")) job.boundary = *b;
  if (const auto t = cfg.real_list("t_over_u")) job.t_over_u = *t;
  for (const double t : job.t_over_u) {
    if (t < 0.0) throw ConfigError(cfg.line_of("t_over_u"), "t_over_u must be >= 0");
  }

  if (cfg.has("abs_v_over_u") && cfg.has("abs_v_over_u_min")) {
    throw ConfigError(cfg.line_of("abs_v_over_u_min"),
                      "give either abs_v_over_u or the abs_v_over_u_min/max/steps grid, not both");
  }
  if (const auto v = cfg.real_list("abs_v_over_u")) {
    job.abs_v_over_u = *v;
  } else if (cfg.has("abs_v_over_u_min") || cfg.has("abs_v_over_u_max") ||
             cfg.has("abs_v_over_u_steps")) {
    job.abs_v_over_u = detail::require_grid(cfg, "abs_v_over_u").points();
  } else {
    job.abs_v_over_u = std::move(default_abs_v);
  }
  if (job.abs_v_over_u.empty()) throw ConfigError(0, "abs_v_over_u list is empty");
  job.solver = solver_options(cfg);
  return job;
}

// ---------------------------------------------------------------------------
// Serialization (inverse of the typed views above)

inline std::string serialize(const OpticalParams& p) {
  std::string out;
  OpticalParams copy = p;
  for (const char* key : detail::kOpticalKeys) {
    out += std::string(key) + " = " + format_number(*detail::optical_field(copy, key)) + "\n";
  }
  return out;
}

inline std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_number(xs[i]);
  }
  return out;
}

inline std::string serialize(const ModelJob& job) {
  std::string out;
  out += "sites = " + std::to_string(job.sites) + "\n";
  out += "n_up = " + std::to_string(job.n_up) + "\n";
  out += "n_down = " + std::to_string(job.n_down) + "\n";
  out += "nmax = " + (job.cap ? std::to_string(*job.cap) : std::string("inf")) + "\n";
  out += std::string("boundary = ") + to_string(job.boundary) + "\n";
  out += "t_over_u = " + join_numbers(job.t_over_u) + "\n";
  out += "abs_v_over_u = " + join_numbers(job.abs_v_over_u) + "\n";
  out += "k = " + std::to_string(job.solver.k) + "\n";
  out += "tol = " + format_number(job.solver.tol) + "\n";
  out += "max_iter = " + std::to_string(job.solver.max_iter) + "\n";
  out += "seed = " + std::to_string(job.solver.seed) + "\n";
  return out;
}

}  // namespace polariton
