#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbits/config.hpp"
#include "orbits/dynamics.hpp"
#include "orbits/format.hpp"
#include "orbits/quadrature.hpp"
#include "orbits/svg.hpp"
#include "orbits/turning.hpp"

namespace orbits {

/// Sampled center-of-mass circle as CSV (t, x, y, residual); returns a
/// summary with the closed-form circle and the worst residual.
inline nlohmann::json cmd_cm(const RunConfig& cfg, std::ostream& csv) {
  if (!cfg.cm) throw config_error("cm: config needs a 'cm' block");
  const Circle orb = cm_orbit(*cfg.cm);
  const auto pts = cm_sample_points(*cfg.cm, cfg.options.n_points);
  write_csv_row(csv, {"t", "x", "y", "residual"});
  double max_resid = 0.0;
  const double period = 2.0 * std::numbers::pi;  // angular rate is -1
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double t = period * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(pts.size(), 1));
    const double resid = cm_residual(*cfg.cm, pts[k].x, pts[k].y);
    max_resid = std::max(max_resid, std::abs(resid));
    write_csv_row(csv, {format_double(t), format_double(pts[k].x), format_double(pts[k].y),
                        format_double(resid)});
  }
  nlohmann::json summary;
  summary["center"] = {orb.cx, orb.cy};
  summary["radius"] = orb.radius;
  summary["angular_rate"] = orb.angular_rate;
  summary["max_residual"] = max_resid;
  return summary;
}

namespace detail {

inline nlohmann::json domain_to_json(const RadialDomain& dom, const BoundednessReport& rep) {
  nlohmann::json j;
  j["classification"] = to_string(dom.classification);
  nlohmann::json tps = nlohmann::json::array();
  for (const auto& tp : dom.turning_points) {
    tps.push_back({{"gamma", tp.x},
                   {"multiplicity", tp.mult == Multiplicity::Double ? "double" : "simple"}});
  }
  j["turning_points"] = tps;
  nlohmann::json ivs = nlohmann::json::array();
  for (const auto& iv : dom.allowed) {
    nlohmann::json e;
    e["lo"] = iv.lo;
    if (iv.finite())
      e["hi"] = iv.hi;
    else
      e["hi"] = "inf";
    ivs.push_back(e);
  }
  j["intervals"] = ivs;
  j["conditions"] = {{"lower_ok", rep.lower_ok},
                     {"upper_ok", rep.upper_ok},
                     {"marginal", rep.marginal},
                     {"detail", rep.detail}};
  return j;
}

}  // namespace detail

/// Turning points, allowed intervals, classification, and the confinement
/// condition report as JSON.
inline nlohmann::json cmd_turning(const RunConfig& cfg) {
  const PotentialParams p = resolved_potential(cfg);
  const MotionConstants c = required_motion(cfg);
  return detail::domain_to_json(turning_points(p, c),
                                classify_boundedness(p, c, cfg.options.tol_marginal));
}

struct SimulateFlags {
  bool allow_escape = false;
  std::optional<std::size_t> interval;
  std::string svg_path;  // empty: no SVG
};

struct SimulateOutcome {
  bool aborted_on_escape = false;
  nlohmann::json summary;
};

/// Integrates from the perihelion of the selected interval and streams the
/// trajectory as CSV. Unbounded runs stop at an escape radius; without
/// --allow-escape that aborts the command after the partial output.
inline SimulateOutcome cmd_simulate(const RunConfig& cfg, const SimulateFlags& flags,
                                    std::ostream& csv) {
  const PotentialParams p = resolved_potential(cfg);
  const MotionConstants c = required_motion(cfg);
  const RadialDomain dom = turning_points(p, c);
  const RelState s0 = initial_state_at_perihelion(p, c, flags.interval.value_or(0));
  const double r0 = std::hypot(s0.x, s0.y);

  StepControl control;
  control.tol = cfg.options.tol;
  control.t_end = cfg.options.t_end;
  control.sample_dt = cfg.options.sample_dt;
  if (dom.classification != Confinement::Bounded)
    control.gamma_stop = flags.allow_escape ? 1e9 : 10.0 * r0;

  const Trajectory traj = integrate_relative(p, s0, control);

  write_csv_row(csv, {"t", "x", "y", "gamma", "theta_unwrapped", "H_drift", "ptheta_drift"});
  double max_h_drift = 0.0, max_p_drift = 0.0;
  std::vector<Vec2> pts;
  pts.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    const double gamma = std::hypot(s.state.x, s.state.y);
    max_h_drift = std::max(max_h_drift, s.H_drift);
    max_p_drift = std::max(max_p_drift, s.p_theta_drift);
    pts.push_back({s.state.x, s.state.y});
    write_csv_row(csv, {format_double(s.t), format_double(s.state.x), format_double(s.state.y),
                        format_double(gamma), format_double(s.theta), format_double(s.H_drift),
                        format_double(s.p_theta_drift)});
  }
  if (!flags.svg_path.empty()) {
    std::ofstream svg(flags.svg_path);
    if (!svg) throw config_error("simulate: cannot open SVG path '" + flags.svg_path + "'");
    write_svg_polyline(svg, pts);
  }

  SimulateOutcome outcome;
  outcome.aborted_on_escape =
      (traj.stop_reason == StopReason::GammaStop) && !flags.allow_escape;
  nlohmann::json& j = outcome.summary;
  j["classification"] = to_string(dom.classification);
  j["samples"] = traj.samples.size();
  j["t_final"] = traj.samples.back().t;
  j["gamma_first"] = r0;
  j["gamma_last"] = std::hypot(traj.samples.back().state.x, traj.samples.back().state.y);
  j["max_H_drift"] = max_h_drift;
  j["max_ptheta_drift"] = max_p_drift;
  j["stopped_at_gamma_stop"] = traj.stop_reason == StopReason::GammaStop;
  if (const auto cv = loop_spacing_cv(traj)) j["loop_spacing_cv"] = *cv;
  return outcome;
}

/// Apsidal angle and periodicity evidence for a bounded single-interval case.
inline nlohmann::json cmd_period(const RunConfig& cfg, std::optional<std::size_t> interval) {
  const PotentialParams p = resolved_potential(cfg);
  const MotionConstants c = required_motion(cfg);
  const RadialDomain dom = turning_points(p, c);
  if (dom.allowed.empty()) throw domain_error("period: no classically allowed radius");
  if (dom.allowed.size() > 1 && !interval)
    throw domain_error("period: several allowed intervals; pick one with --interval");
  const std::size_t idx = interval.value_or(0);
  if (idx >= dom.allowed.size()) throw domain_error("period: interval index out of range");
  const AllowedInterval iv = dom.allowed[idx];
  if (!iv.finite()) throw domain_error("period: selected interval is unbounded");
  QuadratureOptions qopt;
  qopt.tol = cfg.options.quad_tol;
  qopt.q_max = cfg.options.q_max;
  qopt.tol_rat = cfg.options.tol_rat;
  const ApsidalResult res = apsidal_angle(p, c, iv.lo, iv.hi, qopt);
  nlohmann::json j;
  j["delta_theta"] = res.delta_theta;
  j["alpha"] = res.alpha;
  j["estimated_error"] = res.estimated_error;
  if (res.rational_match) {
    const double approx =
        static_cast<double>(res.rational_match->num) / static_cast<double>(res.rational_match->den);
    j["rational"] = {{"p", res.rational_match->num},
                     {"q", res.rational_match->den},
                     {"residual", res.alpha - approx}};
  } else {
    j["rational"] = nullptr;
  }
  j["interval"] = {{"lo", iv.lo}, {"hi", iv.hi}};
  return j;
}

namespace detail {

inline void apply_sweep_param(PotentialParams& p, MotionConstants& c, const std::string& name,
                              double value) {
  if (name == "H") {
    c.H = value;
    return;
  }
  if (name == "p_theta") {
    c.p_theta = value;
    return;
  }
  const bool has_A = p.kind != PotentialKind::V1;
  const bool has_E = p.kind == PotentialKind::V3;
  if (name == "A" && has_A) {
    p.A = value;
    return;
  }
  if (name == "B") {
    p.B = value;
    return;
  }
  if (name == "Gamma") {
    p.Gamma = value;
    return;
  }
  if (name == "Delta") {
    p.Delta = value;
    return;
  }
  if (name == "E" && has_E) {
    p.E = value;
    return;
  }
  throw config_error("sweep: parameter '" + name + "' not valid for " + to_string(p.kind));
}

}  // namespace detail

/// Grid sweep over potential/motion parameters; one CSV row per point in
/// row-major order over the declared axes. Rows carry the classification,
/// up to four turning points, and (for bounded single-interval points) the
/// periodicity ratio alpha.
inline void cmd_sweep(const RunConfig& cfg, std::ostream& csv) {
  const PotentialParams base_p = resolved_potential(cfg);
  const MotionConstants base_c = required_motion(cfg);
  if (cfg.sweep_axes.empty()) throw config_error("sweep: config needs 'sweep.axes'");

  std::size_t total = 1;
  for (const auto& ax : cfg.sweep_axes) {
    PotentialParams probe_p = base_p;
    MotionConstants probe_c = base_c;
    detail::apply_sweep_param(probe_p, probe_c, ax.param, ax.min);  // validates the name
    if (ax.count > 0 && total > 1000000 / ax.count)
      throw config_error("sweep: grid exceeds 10^6 points");
    total *= ax.count;
  }

  std::vector<std::string> header;
  for (const auto& ax : cfg.sweep_axes) header.push_back(ax.param);
  for (const char* col : {"classification", "n_turning", "tp0", "tp1", "tp2", "tp3", "alpha"})
    header.push_back(col);
  write_csv_row(csv, header);
  if (total == 0) return;

  std::vector<std::size_t> idx(cfg.sweep_axes.size(), 0);
  QuadratureOptions qopt;
  qopt.tol = cfg.options.quad_tol;
  qopt.q_max = cfg.options.q_max;
  qopt.tol_rat = cfg.options.tol_rat;

  for (std::size_t row = 0; row < total; ++row) {
    PotentialParams p = base_p;
    MotionConstants c = base_c;
    std::vector<std::string> cells;
    for (std::size_t a = 0; a < cfg.sweep_axes.size(); ++a) {
      const auto& ax = cfg.sweep_axes[a];
      const double v = (ax.count == 1)
                           ? ax.min
                           : ax.min + (ax.max - ax.min) * static_cast<double>(idx[a]) /
                                 static_cast<double>(ax.count - 1);
      detail::apply_sweep_param(p, c, ax.param, v);
      cells.push_back(format_double(v));
    }
    const RadialDomain dom = turning_points(p, c);
    cells.push_back(to_string(dom.classification));
    cells.push_back(std::to_string(dom.turning_points.size()));
    for (std::size_t k = 0; k < 4; ++k)
      cells.push_back(k < dom.turning_points.size() ? format_double(dom.turning_points[k].x)
                                                    : std::string());
    std::string alpha_cell;
    if (dom.classification == Confinement::Bounded && dom.allowed.size() == 1 &&
        dom.allowed.front().finite() && !dom.allowed.front().zero_width()) {
      try {
        alpha_cell = format_double(
            apsidal_angle(p, c, dom.allowed.front().lo, dom.allowed.front().hi, qopt).alpha);
      } catch (const domain_error&) {
      } catch (const numeric_error&) {
      }
    }
    cells.push_back(alpha_cell);
    write_csv_row(csv, cells);

    // row-major increment: last axis fastest
    for (std::size_t a = cfg.sweep_axes.size(); a-- > 0;) {
      if (++idx[a] < cfg.sweep_axes[a].count) break;
      idx[a] = 0;
    }
  }
}

}  // namespace orbits
