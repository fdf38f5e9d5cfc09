#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "orbits/errors.hpp"
#include "orbits/potentials.hpp"
#include "orbits/turning.hpp"

namespace orbits {

/// Center-of-mass constants of motion plus the orientation of the guiding
/// center; energies/momenta dimensionless as usual.
struct CMState {
  double H_cm = 0.0;
  double p_theta_cm = 0.0;
  double theta0 = 0.0;
};

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double angular_rate = -1.0;  // units of omega_c
};

/// The center of mass moves on a circle of radius sqrt(H_cm) whose center
/// sits at distance sqrt(H_cm + p_theta_cm) along the theta0 direction,
/// traversed at the cyclotron rate -omega_c.
inline Circle cm_orbit(const CMState& s) {
  if (!(s.H_cm >= 0.0)) throw domain_error("cm_orbit: H_cm must be nonnegative");
  const double d2 = s.H_cm + s.p_theta_cm;
  if (d2 < 0.0) throw domain_error("cm_orbit: H_cm + p_theta_cm must be nonnegative");
  const double d = std::sqrt(d2);
  return {d * std::cos(s.theta0), d * std::sin(s.theta0), std::sqrt(s.H_cm), -1.0};
}

/// Residual of the closed-form orbit equation
///   xi^2 - 2 xi sqrt(H_cm + p_theta_cm) cos(theta - theta0) + p_theta_cm
/// at a sample point; zero on the orbit.
inline double cm_residual(const CMState& s, double x, double y) {
  const double xi = std::hypot(x, y);
  const double theta = std::atan2(y, x);
  return xi * xi - 2.0 * xi * std::sqrt(s.H_cm + s.p_theta_cm) * std::cos(theta - s.theta0) +
         s.p_theta_cm;
}

/// Evenly spaced points along the center-of-mass circle (a single point for
/// the zero-radius case).
inline std::vector<Vec2> cm_sample_points(const CMState& s, std::size_t n) {
  const Circle orb = cm_orbit(s);
  if (orb.radius == 0.0 || n == 0) return {{orb.cx, orb.cy}};
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    pts.push_back({orb.cx + orb.radius * std::cos(phi), orb.cy + orb.radius * std::sin(phi)});
  }
  return pts;
}

/// Cartesian state of the relative coordinate; time in 1/omega_c.
struct RelState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

/// Relative energy (v^2)/4 + V(r); conserved along the motion.
inline double relative_energy(const PotentialParams& p, const RelState& s) {
  const double r = std::hypot(s.x, s.y);
  return 0.25 * (s.vx * s.vx + s.vy * s.vy) + eval_potential(p, r);
}

/// Relative angular momentum (x vy - y vx)/2 + r^2/4; conserved.
inline double relative_angular_momentum(const RelState& s) {
  return 0.5 * (s.x * s.vy - s.y * s.vx) + 0.25 * (s.x * s.x + s.y * s.y);
}

/// State with zero radial velocity at radius r; the angular rate follows from
/// the conserved angular momentum: dtheta/dt = 2 p_theta / r^2 - 1/2.
inline RelState perihelion_state(double r, double p_theta) {
  detail::require_positive_radius(r, "perihelion_state");
  const double theta_dot = 2.0 * p_theta / (r * r) - 0.5;
  return {r, 0.0, 0.0, r * theta_dot};
}

/// Start state at the inner edge of the chosen allowed interval.
inline RelState initial_state_at_perihelion(const PotentialParams& p, const MotionConstants& c,
                                            std::size_t interval_index = 0) {
  const RadialDomain dom = turning_points(p, c);
  if (dom.allowed.empty())
    throw domain_error("initial_state_at_perihelion: no classically allowed radius");
  if (interval_index >= dom.allowed.size()) {
    std::ostringstream os;
    os << "initial_state_at_perihelion: interval index " << interval_index << " out of range ("
       << dom.allowed.size() << " intervals)";
    throw domain_error(os.str());
  }
  const double r0 = dom.allowed[interval_index].lo;
  if (!(r0 > 0.0))
    throw domain_error("initial_state_at_perihelion: allowed interval touches the origin");
  return perihelion_state(r0, c.p_theta);
}

struct TrajectorySample {
  double t = 0.0;
  RelState state;
  double theta = 0.0;  // unwrapped polar angle, integrated alongside the state
  double H_drift = 0.0;
  double p_theta_drift = 0.0;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double min_h = std::numeric_limits<double>::infinity();
  double max_h = 0.0;
};

enum class StopReason { Completed, GammaStop };

struct Trajectory {
  std::vector<TrajectorySample> samples;
  StepStats stats;
  StopReason stop_reason = StopReason::Completed;
  double H0 = 0.0;
  double p_theta0 = 0.0;
};

struct StepControl {
  double tol = 1e-10;       // local error tolerance (absolute and relative)
  double t_end = 200.0;
  double sample_dt = 0.01;
  double h_init = 1e-3;
  double h_max = 0.0;       // 0: capped at sample_dt
  double gamma_stop = 0.0;  // 0: disabled; otherwise stop once r >= gamma_stop
  double r_floor = 1e-9;
  std::size_t max_steps = 20'000'000;
};

namespace detail {

using State5 = std::array<double, 5>;  // x, y, vx, vy, theta

// Equations of motion of the relative coordinate in Cartesian form,
//   x'' = y' - 2 dV/dx,  y'' = -x' - 2 dV/dy,
// with theta integrated alongside for an exactly unwrapped polar angle.
inline bool relative_rhs(const PotentialParams& p, const State5& s, double r_floor, State5& out) {
  const double r2 = s[0] * s[0] + s[1] * s[1];
  if (!(r2 > r_floor * r_floor) || !std::isfinite(r2)) return false;
  const double r = std::sqrt(r2);
  const double dv = eval_potential_derivative(p, r);
  const double gx = dv * s[0] / r;
  const double gy = dv * s[1] / r;
  out = {s[2], s[3], s[3] - 2.0 * gx, -s[2] - 2.0 * gy, (s[0] * s[3] - s[1] * s[2]) / r2};
  return std::isfinite(out[2]) && std::isfinite(out[3]) && std::isfinite(out[4]);
}

}  // namespace detail

/// Integrates the relative motion with a Dormand-Prince 5(4) embedded pair
/// under PI step-size control, sampling on the sample_dt lattice. Conserved
/// quantities are monitored per sample, never projected.
inline Trajectory integrate_relative(const PotentialParams& p, const RelState& s0,
                                     const StepControl& control) {
  if (!(control.t_end > 0.0)) throw domain_error("integrate_relative: t_end must be positive");
  if (!(control.tol > 0.0)) throw domain_error("integrate_relative: tol must be positive");
  if (!(std::hypot(s0.x, s0.y) > control.r_floor))
    throw domain_error("integrate_relative: start state at the origin");

  using detail::State5;
  // Dormand-Prince RK5(4)7M tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Trajectory traj;
  traj.H0 = relative_energy(p, s0);
  traj.p_theta0 = relative_angular_momentum(s0);

  State5 y{s0.x, s0.y, s0.vx, s0.vy, std::atan2(s0.y, s0.x)};
  double t = 0.0;
  const double h_cap = (control.h_max > 0.0) ? control.h_max : control.sample_dt;
  double h_opt = std::min(control.h_init, h_cap);
  double err_prev = 1e-4;

  const auto record = [&](double tt, const State5& s) {
    RelState rs{s[0], s[1], s[2], s[3]};
    traj.samples.push_back({tt, rs, s[4], std::abs(relative_energy(p, rs) - traj.H0),
                            std::abs(relative_angular_momentum(rs) - traj.p_theta0)});
  };
  record(0.0, y);

  State5 k1;
  if (!detail::relative_rhs(p, y, control.r_floor, k1))
    throw domain_error("integrate_relative: start state is singular");

  std::size_t sample_index = 1;
  double next_sample = control.sample_dt;
  std::size_t steps = 0;

  while (t < control.t_end - 1e-12 * control.t_end) {
    if (++steps > control.max_steps)
      throw numeric_error("integrate_relative: step budget exhausted");
    double target = std::min(control.t_end, next_sample);
    double h = std::min({h_opt, h_cap, target - t});
    if (h < 1e-14 * (1.0 + std::abs(t))) {
      std::ostringstream os;
      os << "integrate_relative: step collapse at t = " << t;
      throw numeric_error(os.str());
    }

    State5 k2, k3, k4, k5, k6, k7, ytmp, ynew;
    bool ok = true;
    const auto stage = [&](State5& k, double frac_sum, const auto&... terms) {
      (void)frac_sum;
      for (std::size_t i = 0; i < 5; ++i) ytmp[i] = y[i] + h * (terms(i) + ...);
      ok = ok && detail::relative_rhs(p, ytmp, control.r_floor, k);
    };
    stage(k2, c2, [&](std::size_t i) { return a21 * k1[i]; });
    if (ok) stage(k3, c3, [&](std::size_t i) { return a31 * k1[i]; },
                  [&](std::size_t i) { return a32 * k2[i]; });
    if (ok) stage(k4, c4, [&](std::size_t i) { return a41 * k1[i]; },
                  [&](std::size_t i) { return a42 * k2[i]; },
                  [&](std::size_t i) { return a43 * k3[i]; });
    if (ok) stage(k5, c5, [&](std::size_t i) { return a51 * k1[i]; },
                  [&](std::size_t i) { return a52 * k2[i]; },
                  [&](std::size_t i) { return a53 * k3[i]; },
                  [&](std::size_t i) { return a54 * k4[i]; });
    if (ok) stage(k6, 1.0, [&](std::size_t i) { return a61 * k1[i]; },
                  [&](std::size_t i) { return a62 * k2[i]; },
                  [&](std::size_t i) { return a63 * k3[i]; },
                  [&](std::size_t i) { return a64 * k4[i]; },
                  [&](std::size_t i) { return a65 * k5[i]; });
    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      for (std::size_t i = 0; i < 5; ++i)
        ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      ok = detail::relative_rhs(p, ynew, control.r_floor, k7);
    }
    if (ok) {
      // the controller runs well below control.tol: dissipative RK error
      // accumulates almost linearly in t, and the conserved-quantity drift
      // contract (<= 1e-8 at tol = 1e-10 over t = 200) needs the headroom
      const double tol_local = control.tol / 200.0;
      double acc = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
        const double sc = tol_local * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
        acc += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(acc / 5.0);
    }

    if (err <= 1.0) {
      t = (std::abs(h - (target - t)) <= 1e-12 * (1.0 + target)) ? target : t + h;
      y = ynew;
      k1 = k7;  // FSAL
      ++traj.stats.accepted;
      traj.stats.min_h = std::min(traj.stats.min_h, h);
      traj.stats.max_h = std::max(traj.stats.max_h, h);
      if (t == next_sample) {
        record(t, y);
        ++sample_index;
        next_sample = control.sample_dt * static_cast<double>(sample_index);
        if (next_sample > control.t_end) next_sample = control.t_end;
      } else if (t >= control.t_end - 1e-12 * control.t_end &&
                 traj.samples.back().t < t) {
        record(t, y);
      }
      if (control.gamma_stop > 0.0 && std::hypot(y[0], y[1]) >= control.gamma_stop) {
        if (traj.samples.back().t < t) record(t, y);
        traj.stop_reason = StopReason::GammaStop;
        return traj;
      }
      const double e_clamped = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e_clamped, -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 5.0);
      h_opt = h * fac;
      err_prev = e_clamped;
    } else {
      ++traj.stats.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h_opt = h * fac;
    }
  }
  return traj;
}

namespace detail {

// value of the degree-3 Lagrange interpolant through (tq[0..3], fq[0..3])
inline double lagrange4(const double* tq, const double* fq, double t) {
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    double term = fq[j];
    for (int k = 0; k < 4; ++k)
      if (k != j) term *= (t - tq[k]) / (tq[j] - tq[k]);
    acc += term;
  }
  return acc;
}

}  // namespace detail

/// Half the unwrapped angular advance between two successive interior radial
/// minima; the empirical counterpart of the apsidal-angle quadrature. Minima
/// are located as upward zero crossings of the radial velocity
/// (x vx + y vy)/r, refined through 4-point cubic interpolation.
inline double measure_apsidal_angle(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 8) throw domain_error("measure_apsidal_angle: too few samples");
  std::vector<double> r(s.size()), rdot(s.size());
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    r[i] = std::hypot(s[i].state.x, s[i].state.y);
    rdot[i] = (s[i].state.x * s[i].state.vx + s[i].state.y * s[i].state.vy) / r[i];
    rmin = std::min(rmin, r[i]);
    rmax = std::max(rmax, r[i]);
  }
  if (rmax - rmin <= 1e-9 * (1.0 + rmax))
    throw domain_error("measure_apsidal_angle: no radial oscillation (circular orbit)");

  std::vector<double> theta_at_min;
  for (std::size_t i = 1; i + 2 < s.size() && theta_at_min.size() < 2; ++i) {
    if (!(rdot[i] < 0.0 && rdot[i + 1] >= 0.0)) continue;
    const double tq[4] = {s[i - 1].t, s[i].t, s[i + 1].t, s[i + 2].t};
    const double rq[4] = {rdot[i - 1], rdot[i], rdot[i + 1], rdot[i + 2]};
    double tstar = s[i].t - rdot[i] * (s[i + 1].t - s[i].t) / (rdot[i + 1] - rdot[i]);
    for (int it = 0; it < 4; ++it) {
      const double f = detail::lagrange4(tq, rq, tstar);
      const double h = 1e-6 * (tq[2] - tq[1]);
      const double df =
          (detail::lagrange4(tq, rq, tstar + h) - detail::lagrange4(tq, rq, tstar - h)) /
          (2.0 * h);
      if (df == 0.0) break;
      const double next = tstar - f / df;
      if (!(next >= tq[0] && next <= tq[3])) break;
      tstar = next;
    }
    const double thq[4] = {s[i - 1].theta, s[i].theta, s[i + 1].theta, s[i + 2].theta};
    theta_at_min.push_back(detail::lagrange4(tq, thq, tstar));
  }
  if (theta_at_min.size() < 2)
    throw domain_error("measure_apsidal_angle: fewer than two radial minima in the trajectory");
  return 0.5 * (theta_at_min[1] - theta_at_min[0]);
}

/// Coefficient of variation of the radius gained per full angular turn over
/// the last `loops` turns; empty when fewer crossings exist. Characterizes
/// the outward drift regularity of marginal/escaping spirals.
inline std::optional<double> loop_spacing_cv(const Trajectory& traj, int loops = 5) {
  const auto& s = traj.samples;
  if (s.size() < 4) return std::nullopt;
  const double theta_start = s.front().theta;
  const double total = s.back().theta - theta_start;
  const double dir = (total < 0.0) ? -1.0 : 1.0;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> r_at_crossing;
  double level = theta_start + dir * two_pi;
  for (std::size_t i = 1; i < s.size(); ++i) {
    while ((s[i].theta - level) * dir >= 0.0) {
      const double prev = s[i - 1].theta;
      const double cur = s[i].theta;
      if (cur == prev) break;
      const double w = (level - prev) / (cur - prev);
      const double x = s[i - 1].state.x + w * (s[i].state.x - s[i - 1].state.x);
      const double y = s[i - 1].state.y + w * (s[i].state.y - s[i - 1].state.y);
      r_at_crossing.push_back(std::hypot(x, y));
      level += dir * two_pi;
    }
  }
  if (static_cast<int>(r_at_crossing.size()) < loops + 1) return std::nullopt;
  std::vector<double> spacing;
  for (std::size_t i = r_at_crossing.size() - loops - 1; i + 1 < r_at_crossing.size(); ++i)
    spacing.push_back(r_at_crossing[i + 1] - r_at_crossing[i]);
  double mean = 0.0;
  for (double v : spacing) mean += v;
  mean /= static_cast<double>(spacing.size());
  if (mean == 0.0) return std::nullopt;
  double var = 0.0;
  for (double v : spacing) var += (v - mean) * (v - mean);
  var /= static_cast<double>(spacing.size());
  return std::sqrt(var) / std::abs(mean);
}

}  // namespace orbits
