#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnls/gn_inequality.hpp"
#include "dnls/initial_data.hpp"
#include "dnls/trajectory.hpp"

namespace dnls::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double L = 2.0 * kPi;
  std::size_t N = 256;
};

struct Outputs {
  std::string dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  bool wants(const std::string& f) const {
    for (const auto& x : formats)
      if (x == f) return true;
    return false;
  }
};

struct GaugeCheckOptions {
  double beta = 0.75;
  double tolerance = 1e-6;
};

struct GnAuditOptions {
  int fields = 1000;
  std::vector<double> L = {0.5, 1.0, 2.0 * kPi, 10.0};
  std::vector<double> delta = {0.1, 1.0, 10.0};
  std::uint64_t seed = 1;
  int max_mode = 8;
  /// Multiplies C_GN on the (GN1) right side; anything but 1 is a fault injection.
  double debug_constant_scale = 1.0;
};

struct ThresholdScanOptions {
  std::vector<double> mass_fractions = {0.5, 0.9, 0.99};
};

struct RunConfig {
  GridSpec grid;
  SimConfig sim;
  DataSpec data;
  bool data_seed_set = false;
  double delta = 1.0;
  Outputs outputs;
  GaugeCheckOptions gauge_check;
  GnAuditOptions gn_audit;
  ThresholdScanOptions threshold_scan;

  /// Seed used for generated data: data.seed, else sim.seed.
  DataSpec effective_data() const {
    DataSpec d = data;
    if (!data_seed_set) d.seed = static_cast<std::uint64_t>(sim.seed);
    return d;
  }
};

namespace detail {

inline const char* name(Integrator i) { return i == Integrator::ifrk4 ? "ifrk4" : "etdrk4"; }
inline const char* name(Dealias d) { return d == Dealias::two_thirds ? "two_thirds" : "none"; }
inline const char* name(Equation e) { return e == Equation::dnls1 ? "dnls1" : "dnls2"; }
inline const char* name(DataKind k) {
  switch (k) {
    case DataKind::plane_wave: return "plane_wave";
    case DataKind::multimode: return "multimode";
    case DataKind::bump: return "bump";
  }
  return "multimode";
}

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline std::vector<double> get_reals(const json& obj, const char* key, const std::string& where,
                                     std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <class E>
E get_enum(const json& obj, const char* key, const std::string& where, E fallback,
           std::initializer_list<std::pair<const char*, E>> table) {
  const std::string s = get<std::string>(obj, key, where, "");
  if (s.empty() && !obj.contains(key)) return fallback;
  for (const auto& [n, e] : table)
    if (s == n) return e;
  throw ConfigError(where + "." + key + ": unknown value '" + s + "'");
}

}  // namespace detail

/// Validates a parsed configuration; throws ConfigError with a schema message.
inline void validate(const RunConfig& c) {
  try {
    TorusGrid g(c.grid.L, c.grid.N);
    dnls::validate(c.sim);
    dnls::validate(c.data, g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw ConfigError("delta must be positive");
  for (const auto& f : c.outputs.formats) {
    if (f != "csv" && f != "json" && f != "frames" && f != "plot") {
      throw ConfigError("outputs.formats: unknown format '" + f + "'");
    }
  }
  if (c.outputs.dir.empty()) throw ConfigError("outputs.dir must be non-empty");
  if (!(c.gauge_check.tolerance > 0.0)) throw ConfigError("gauge_check.tolerance must be positive");
  if (!std::isfinite(c.gauge_check.beta)) throw ConfigError("gauge_check.beta must be finite");
  const auto& a = c.gn_audit;
  if (a.fields < 0) throw ConfigError("gn_audit.fields must be nonnegative");
  if (a.max_mode < 1 || a.max_mode > static_cast<int>(c.grid.N / 3)) {
    throw ConfigError("gn_audit.max_mode outside [1, N/3]");
  }
  for (double L : a.L)
    if (!(L > 0.0)) throw ConfigError("gn_audit.L entries must be positive");
  for (double d : a.delta)
    if (!(d > 0.0)) throw ConfigError("gn_audit.delta entries must be positive");
  if (!(a.debug_constant_scale > 0.0)) throw ConfigError("gn_audit.debug_constant_scale must be positive");
  for (double m : c.threshold_scan.mass_fractions)
    if (!(m > 0.0)) throw ConfigError("threshold_scan.mass_fractions must be positive");
}

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  check_keys(j, "config", {"grid", "sim", "data", "delta", "outputs", "gauge_check", "gn_audit", "threshold_scan"});
  RunConfig c;
  const json empty = json::object();

  const json& g = j.contains("grid") ? j.at("grid") : empty;
  check_keys(g, "grid", {"L", "N"});
  c.grid.L = get<double>(g, "L", "grid", c.grid.L);
  const auto n = get<std::int64_t>(g, "N", "grid", static_cast<std::int64_t>(c.grid.N));
  if (n <= 0) throw ConfigError("grid.N must be positive");
  c.grid.N = static_cast<std::size_t>(n);

  const json& s = j.contains("sim") ? j.at("sim") : empty;
  check_keys(s, "sim", {"dt", "T", "record_stride", "integrator", "dealias", "equation", "beta", "seed", "blowup_factor"});
  c.sim.dt = get<double>(s, "dt", "sim", c.sim.dt);
  c.sim.T = get<double>(s, "T", "sim", c.sim.T);
  c.sim.record_stride = get<int>(s, "record_stride", "sim", c.sim.record_stride);
  c.sim.integrator = get_enum(s, "integrator", "sim", c.sim.integrator,
                              {{"ifrk4", Integrator::ifrk4}, {"etdrk4", Integrator::etdrk4}});
  c.sim.dealias = get_enum(s, "dealias", "sim", c.sim.dealias,
                           {{"two_thirds", Dealias::two_thirds}, {"none", Dealias::none}});
  c.sim.equation = get_enum(s, "equation", "sim", c.sim.equation,
                            {{"dnls1", Equation::dnls1}, {"dnls2", Equation::dnls2}});
  c.sim.beta = get<double>(s, "beta", "sim", c.sim.beta);
  c.sim.seed = get<std::int64_t>(s, "seed", "sim", c.sim.seed);
  c.sim.blowup_factor = get<double>(s, "blowup_factor", "sim", c.sim.blowup_factor);

  const json& d = j.contains("data") ? j.at("data") : empty;
  check_keys(d, "data", {"kind", "amplitude", "mode", "max_mode", "decay", "width", "center", "target_mass", "seed"});
  c.data.kind = get_enum(d, "kind", "data", c.data.kind,
                         {{"plane_wave", DataKind::plane_wave}, {"multimode", DataKind::multimode}, {"bump", DataKind::bump}});
  c.data.amplitude = get<double>(d, "amplitude", "data", c.data.amplitude);
  c.data.mode = get<int>(d, "mode", "data", c.data.mode);
  c.data.max_mode = get<int>(d, "max_mode", "data", c.data.max_mode);
  c.data.decay = get<double>(d, "decay", "data", c.data.decay);
  c.data.width = get<double>(d, "width", "data", c.data.width);
  c.data.center = get<double>(d, "center", "data", c.data.center);
  if (d.contains("target_mass") && !d.at("target_mass").is_null()) {
    c.data.target_mass = get<double>(d, "target_mass", "data", 0.0);
  }
  if (d.contains("seed")) {
    c.data.seed = get<std::uint64_t>(d, "seed", "data", 0);
    c.data_seed_set = true;
  }

  c.delta = get<double>(j, "delta", "config", c.delta);

  const json& o = j.contains("outputs") ? j.at("outputs") : empty;
  check_keys(o, "outputs", {"dir", "formats"});
  c.outputs.dir = get<std::string>(o, "dir", "outputs", c.outputs.dir);
  if (o.contains("formats")) {
    const auto& f = o.at("formats");
    if (!f.is_array()) throw ConfigError("outputs.formats: expected an array of strings");
    c.outputs.formats.clear();
    for (const auto& x : f) {
      if (!x.is_string()) throw ConfigError("outputs.formats: expected strings");
      c.outputs.formats.push_back(x.get<std::string>());
    }
  }

  const json& gc = j.contains("gauge_check") ? j.at("gauge_check") : empty;
  check_keys(gc, "gauge_check", {"beta", "tolerance"});
  c.gauge_check.beta = get<double>(gc, "beta", "gauge_check", c.gauge_check.beta);
  c.gauge_check.tolerance = get<double>(gc, "tolerance", "gauge_check", c.gauge_check.tolerance);

  const json& ga = j.contains("gn_audit") ? j.at("gn_audit") : empty;
  check_keys(ga, "gn_audit", {"fields", "L", "delta", "seed", "max_mode", "debug_constant_scale"});
  c.gn_audit.fields = get<int>(ga, "fields", "gn_audit", c.gn_audit.fields);
  c.gn_audit.L = get_reals(ga, "L", "gn_audit", c.gn_audit.L);
  c.gn_audit.delta = get_reals(ga, "delta", "gn_audit", c.gn_audit.delta);
  c.gn_audit.seed = get<std::uint64_t>(ga, "seed", "gn_audit", c.gn_audit.seed);
  c.gn_audit.max_mode = get<int>(ga, "max_mode", "gn_audit", c.gn_audit.max_mode);
  c.gn_audit.debug_constant_scale =
      get<double>(ga, "debug_constant_scale", "gn_audit", c.gn_audit.debug_constant_scale);

  const json& ts = j.contains("threshold_scan") ? j.at("threshold_scan") : empty;
  check_keys(ts, "threshold_scan", {"mass_fractions"});
  c.threshold_scan.mass_fractions =
      get_reals(ts, "mass_fractions", "threshold_scan", c.threshold_scan.mass_fractions);

  validate(c);
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Full serialization, every key explicit.
inline json to_json(const RunConfig& c) {
  using namespace detail;
  json j;
  j["grid"] = {{"L", c.grid.L}, {"N", c.grid.N}};
  j["sim"] = {{"dt", c.sim.dt},
              {"T", c.sim.T},
              {"record_stride", c.sim.record_stride},
              {"integrator", name(c.sim.integrator)},
              {"dealias", name(c.sim.dealias)},
              {"equation", name(c.sim.equation)},
              {"beta", c.sim.beta},
              {"seed", c.sim.seed},
              {"blowup_factor", c.sim.blowup_factor}};
  json d = {{"kind", name(c.data.kind)}, {"amplitude", c.data.amplitude}, {"mode", c.data.mode},
            {"max_mode", c.data.max_mode}, {"decay", c.data.decay}, {"width", c.data.width},
            {"center", c.data.center}};
  d["target_mass"] = c.data.target_mass ? json(*c.data.target_mass) : json(nullptr);
  if (c.data_seed_set) d["seed"] = c.data.seed;
  j["data"] = d;
  j["delta"] = c.delta;
  j["outputs"] = {{"dir", c.outputs.dir}, {"formats", c.outputs.formats}};
  j["gauge_check"] = {{"beta", c.gauge_check.beta}, {"tolerance", c.gauge_check.tolerance}};
  j["gn_audit"] = {{"fields", c.gn_audit.fields},
                   {"L", c.gn_audit.L},
                   {"delta", c.gn_audit.delta},
                   {"seed", c.gn_audit.seed},
                   {"max_mode", c.gn_audit.max_mode},
                   {"debug_constant_scale", c.gn_audit.debug_constant_scale}};
  j["threshold_scan"] = {{"mass_fractions", c.threshold_scan.mass_fractions}};
  return j;
}

}  // namespace dnls::cli
