// ODE-side apsidal-angle measurement used as the independent cross-check for
// the quadrature path. Sampling resolves both the angular rate and the
// perihelion passage sharpness, and the result is accepted only after two
// successive resolution halvings agree.
#pragma once

#include <algorithm>
#include <cmath>

#include "orbits/dynamics.hpp"
#include "orbits/potentials.hpp"
#include "orbits/turning.hpp"

namespace ode_oracle {

inline double second_radial_minimum_time(const orbits::Trajectory& traj) {
  const auto& s = traj.samples;
  int crossings = 0;
  double prev_rdot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = std::hypot(s[i].state.x, s[i].state.y);
    const double rdot = (s[i].state.x * s[i].state.vx + s[i].state.y * s[i].state.vy) / r;
    if (i > 0 && prev_rdot < 0.0 && rdot >= 0.0) {
      ++crossings;
      if (crossings == 2) return s[i].t;
    }
    prev_rdot = rdot;
  }
  return -1.0;
}

/// Apsidal angle measured from an integrated trajectory, refined until two
/// resolutions agree to agree_tol.
inline double apsidal_angle(const orbits::PotentialParams& p, const orbits::MotionConstants& c,
                            double r_min, double r_max, double agree_tol = 2e-5) {
  using namespace orbits;
  const RelState s0 = initial_state_at_perihelion(p, c);

  const double theta_rate = std::abs(2.0 * c.p_theta / (r_min * r_min)) + 0.5;
  const double speed_scale = 2.0 * std::sqrt(1.0 + std::abs(c.H));
  const double width = r_max - r_min;
  double dt_coarse = std::min({0.01, 0.1 / theta_rate, width / (10.0 * speed_scale)});

  // time scale of the turning-point passages, sqrt(r / (2 |V_eff'|))
  double dt_sharp = dt_coarse;
  for (double r : {r_min, r_max}) {
    const double f = std::abs(eval_force_radial(p, c, r));
    if (f > 0.0) dt_sharp = std::min(dt_sharp, std::sqrt(r / (2.0 * f)) / 8.0);
  }

  // coarse pass bounds how long two radial periods take
  StepControl coarse;
  coarse.tol = 1e-11;
  coarse.sample_dt = dt_coarse;
  double t_two = -1.0;
  for (double t_end = 30.0; t_end <= 960.0 && t_two < 0.0; t_end *= 2.0) {
    coarse.t_end = t_end;
    t_two = second_radial_minimum_time(integrate_relative(p, s0, coarse));
  }
  if (t_two < 0.0) throw domain_error("ode_oracle: no two radial minima up to t = 960");

  StepControl fine;
  fine.tol = 1e-11;
  fine.t_end = t_two + 10.0 * dt_coarse;
  double dt = std::max(std::min(dt_coarse, dt_sharp), 1e-6);
  double previous = 0.0;
  bool have_previous = false;
  for (int level = 0; level < 4; ++level) {
    fine.sample_dt = dt;
    const double measured = measure_apsidal_angle(integrate_relative(p, s0, fine));
    if (have_previous && std::abs(measured - previous) <= agree_tol) return measured;
    previous = measured;
    have_previous = true;
    dt *= 0.5;
  }
  return previous;
}

}  // namespace ode_oracle
