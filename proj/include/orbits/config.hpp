#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbits/dynamics.hpp"
#include "orbits/errors.hpp"
#include "orbits/potentials.hpp"
#include "orbits/units.hpp"

namespace orbits {

struct SweepAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct RunOptions {
  double t_end = 200.0;
  double sample_dt = 0.01;
  double tol = 1e-10;
  double quad_tol = 1e-10;
  double tol_rat = 1e-6;
  long long q_max = 64;
  double tol_marginal = 1e-12;
  std::size_t n_points = 256;
};

struct PhysicalInput {
  PhysicalSystem system;
  RawPotential potential;
};

/// Parsed run configuration: exactly one of the dimensionless `potential`
/// route or the Gaussian-unit `physical` route may be present.
struct RunConfig {
  int schema_version = 1;
  std::optional<PotentialParams> potential;
  std::optional<PhysicalInput> physical;
  std::optional<MotionConstants> motion;
  std::optional<CMState> cm;
  RunOptions options;
  std::vector<SweepAxis> sweep_axes;
};

namespace detail {

inline double get_num(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw config_error("config: missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

inline double get_num_or(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw config_error("config: non-numeric field '" + key + "'");
  return j[key].get<double>();
}

inline PotentialKind parse_kind(const nlohmann::json& j) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw config_error("config: potential needs a string 'kind'");
  const std::string k = j["kind"].get<std::string>();
  if (k == "V1") return PotentialKind::V1;
  if (k == "V2") return PotentialKind::V2;
  if (k == "V3") return PotentialKind::V3;
  throw config_error("config: unknown potential kind '" + k + "'");
}

inline PotentialParams parse_potential(const nlohmann::json& j) {
  const PotentialKind kind = parse_kind(j);
  switch (kind) {
    case PotentialKind::V1:
      return PotentialParams::v1(get_num(j, "B"), get_num(j, "Gamma"), get_num(j, "Delta"));
    case PotentialKind::V2:
      return PotentialParams::v2(get_num(j, "A"), get_num(j, "B"), get_num(j, "Gamma"),
                                 get_num(j, "Delta"));
    case PotentialKind::V3:
      return PotentialParams::v3(get_num(j, "A"), get_num(j, "B"), get_num(j, "Gamma"),
                                 get_num(j, "Delta"), get_num(j, "E"));
  }
  throw config_error("config: bad potential kind");
}

inline RawPotential parse_raw_potential(const nlohmann::json& j) {
  RawPotential raw;
  raw.kind = parse_kind(j);
  raw.a = get_num(j, "a");
  raw.b = get_num(j, "b");
  raw.c = get_num(j, "c");
  raw.d = get_num(j, "d");
  raw.e = (raw.kind == PotentialKind::V3) ? get_num(j, "e") : 0.0;
  return raw;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config: top level must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw config_error("config: missing integer 'schema_version'");
  RunConfig cfg;
  cfg.schema_version = j["schema_version"].get<int>();
  if (cfg.schema_version != 1) throw config_error("config: unsupported schema_version");

  const bool has_dimensionless = j.contains("potential");
  const bool has_physical = j.contains("physical");
  if (has_dimensionless == has_physical)
    throw config_error("config: provide exactly one of 'potential' or 'physical'");

  if (has_dimensionless) cfg.potential = detail::parse_potential(j["potential"]);
  if (has_physical) {
    const auto& ph = j["physical"];
    if (!ph.is_object() || !ph.contains("system") || !ph.contains("potential"))
      throw config_error("config: 'physical' needs 'system' and 'potential'");
    PhysicalInput in;
    in.system.mass = detail::get_num(ph["system"], "m");
    in.system.charge = detail::get_num(ph["system"], "q");
    in.system.field = detail::get_num(ph["system"], "B_mag");
    in.potential = detail::parse_raw_potential(ph["potential"]);
    cfg.physical = in;
  }

  if (j.contains("motion")) {
    MotionConstants mc;
    mc.H = detail::get_num(j["motion"], "H");
    mc.p_theta = detail::get_num(j["motion"], "p_theta");
    cfg.motion = mc;
  }
  if (j.contains("cm")) {
    CMState s;
    s.H_cm = detail::get_num(j["cm"], "H_cm");
    s.p_theta_cm = detail::get_num(j["cm"], "p_theta_cm");
    s.theta0 = detail::get_num_or(j["cm"], "theta0", 0.0);
    cfg.cm = s;
  }
  if (j.contains("options")) {
    const auto& o = j["options"];
    RunOptions& opt = cfg.options;
    opt.t_end = detail::get_num_or(o, "t_end", opt.t_end);
    opt.sample_dt = detail::get_num_or(o, "sample_dt", opt.sample_dt);
    opt.tol = detail::get_num_or(o, "tol", opt.tol);
    opt.quad_tol = detail::get_num_or(o, "quad_tol", opt.quad_tol);
    opt.tol_rat = detail::get_num_or(o, "tol_rat", opt.tol_rat);
    opt.q_max = static_cast<long long>(detail::get_num_or(o, "q_max", double(opt.q_max)));
    opt.tol_marginal = detail::get_num_or(o, "tol_marginal", opt.tol_marginal);
    const double n_points = detail::get_num_or(o, "n_points", double(opt.n_points));
    if (!(n_points >= 1.0) || n_points > 1e8 || n_points != std::floor(n_points))
      throw config_error("config: n_points must be an integer in [1, 1e8]");
    opt.n_points = static_cast<std::size_t>(n_points);
    for (double v : {opt.t_end, opt.sample_dt, opt.tol, opt.quad_tol, opt.tol_rat,
                     opt.tol_marginal})
      if (!(v > 0.0)) throw config_error("config: options must be positive");
    if (opt.q_max < 1) throw config_error("config: options must be positive");
  }
  if (j.contains("sweep")) {
    const auto& sw = j["sweep"];
    if (!sw.is_object() || !sw.contains("axes") || !sw["axes"].is_array())
      throw config_error("config: 'sweep' needs an 'axes' array");
    for (const auto& ax : sw["axes"]) {
      SweepAxis axis;
      if (!ax.contains("param") || !ax["param"].is_string())
        throw config_error("config: sweep axis needs a string 'param'");
      axis.param = ax["param"].get<std::string>();
      axis.min = detail::get_num(ax, "min");
      axis.max = detail::get_num(ax, "max");
      const double count = detail::get_num(ax, "count");
      if (count < 0.0 || count != std::floor(count))
        throw config_error("config: sweep axis 'count' must be a nonnegative integer");
      axis.count = static_cast<std::size_t>(count);
      cfg.sweep_axes.push_back(axis);
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: JSON parse failure: ") + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json to_json(const PotentialParams& p) {
  nlohmann::json j;
  j["kind"] = to_string(p.kind);
  switch (p.kind) {
    case PotentialKind::V1:
      j["B"] = p.B;
      j["Gamma"] = p.Gamma;
      j["Delta"] = p.Delta;
      break;
    case PotentialKind::V2:
      j["A"] = p.A;
      j["B"] = p.B;
      j["Gamma"] = p.Gamma;
      j["Delta"] = p.Delta;
      break;
    case PotentialKind::V3:
      j["A"] = p.A;
      j["B"] = p.B;
      j["Gamma"] = p.Gamma;
      j["Delta"] = p.Delta;
      j["E"] = p.E;
      break;
  }
  return j;
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  if (cfg.potential) j["potential"] = to_json(*cfg.potential);
  if (cfg.physical) {
    nlohmann::json ph;
    ph["system"] = {{"m", cfg.physical->system.mass},
                    {"q", cfg.physical->system.charge},
                    {"B_mag", cfg.physical->system.field}};
    nlohmann::json raw;
    raw["kind"] = to_string(cfg.physical->potential.kind);
    raw["a"] = cfg.physical->potential.a;
    raw["b"] = cfg.physical->potential.b;
    raw["c"] = cfg.physical->potential.c;
    raw["d"] = cfg.physical->potential.d;
    if (cfg.physical->potential.kind == PotentialKind::V3) raw["e"] = cfg.physical->potential.e;
    ph["potential"] = raw;
    j["physical"] = ph;
  }
  if (cfg.motion) j["motion"] = {{"H", cfg.motion->H}, {"p_theta", cfg.motion->p_theta}};
  if (cfg.cm)
    j["cm"] = {{"H_cm", cfg.cm->H_cm},
               {"p_theta_cm", cfg.cm->p_theta_cm},
               {"theta0", cfg.cm->theta0}};
  j["options"] = {{"t_end", cfg.options.t_end},
                  {"sample_dt", cfg.options.sample_dt},
                  {"tol", cfg.options.tol},
                  {"quad_tol", cfg.options.quad_tol},
                  {"tol_rat", cfg.options.tol_rat},
                  {"q_max", cfg.options.q_max},
                  {"tol_marginal", cfg.options.tol_marginal},
                  {"n_points", cfg.options.n_points}};
  if (!cfg.sweep_axes.empty()) {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& ax : cfg.sweep_axes)
      axes.push_back({{"param", ax.param}, {"min", ax.min}, {"max", ax.max}, {"count", ax.count}});
    j["sweep"] = {{"axes", axes}};
  }
  return j;
}

/// Dimensionless parameters from whichever route the config provides.
inline PotentialParams resolved_potential(const RunConfig& cfg) {
  if (cfg.potential && cfg.physical)
    throw config_error("config: both dimensionless and physical potentials present");
  if (cfg.potential) return *cfg.potential;
  if (cfg.physical)
    return nondimensionalize(cfg.physical->potential, derive_scales(cfg.physical->system));
  throw config_error("config: no potential provided");
}

inline MotionConstants required_motion(const RunConfig& cfg) {
  if (!cfg.motion) throw config_error("config: 'motion' (H, p_theta) is required");
  return *cfg.motion;
}

}  // namespace orbits
