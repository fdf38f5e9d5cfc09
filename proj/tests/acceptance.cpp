// Acceptance suite: each test case checks one release criterion at its
// stated tolerance and prints a single pass/fail line.
#include <catch2/catch.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orbits/orbits.hpp"
#include "ode_oracle.hpp"
#include "oracles.hpp"

using namespace orbits;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int num, const std::string& label, bool ok, const std::string& detail = "") {
  std::printf("criterion %d (%s): %s%s%s\n", num, label.c_str(), ok ? "PASS" : "FAIL",
              detail.empty() ? "" : " - ", detail.c_str());
  std::fflush(stdout);
}

struct NamedCase {
  std::string name;
  PotentialParams p;
  MotionConstants c;
};

// The ten reference configurations exercised by the conservation suite: the
// three V1 and three V2 parameter studies, the three V3 threshold regimes,
// and the V3 double-well. The double-well energy is placed between the
// barrier top and the shallower minimum.
std::vector<NamedCase> reference_cases() {
  std::vector<NamedCase> cases = {
      {"v1_base", PotentialParams::v1(1, 1, 1), {10.0, 0.0}},
      {"v1_attractive", PotentialParams::v1(1, 5, 5), {10.0, 0.0}},
      {"v1_repulsive", PotentialParams::v1(5, 1, 1), {10.0, 0.0}},
      {"v2_base", PotentialParams::v2(1, 1, 1, 1), {10.0, 0.0}},
      {"v2_repulsive", PotentialParams::v2(5, 1, 1, 1), {10.0, 0.0}},
      {"v2_attractive", PotentialParams::v2(1, 5, 5, 5), {10.0, 0.0}},
      {"v3_weak_below_threshold", PotentialParams::v3(1e-3, 1e-3, 1e-3, 1e-3, 0.05), {10.0, 0.0}},
      {"v3_marginal", PotentialParams::v3(1, 1, 1, 1, 1.0 / 16.0), {10.0, 0.0}},
      {"v3_escape", PotentialParams::v3(1, 1, 1, 1, 0.1), {10.0, 0.0}},
  };
  const PotentialParams two_well = PotentialParams::v3(3.0, -6.0, -6.0, 16.0, -0.2);
  const WellStructure ws = well_structure(two_well, {0.0, 0.0});
  REQUIRE(ws.critical.size() == 3);
  const double barrier = ws.critical[1].value;
  const double shallower = std::max(ws.critical[0].value, ws.critical[2].value);
  cases.push_back({"v3_two_well", two_well, {0.5 * (barrier + shallower), 0.0}});
  return cases;
}

// Magnitude scale of the energy evaluation: drift below eps times this is
// unresolvable in double precision (matters only for the escaping run, whose
// kinetic and potential terms grow to ~1e66 while H stays at 10).
double energy_condition(const PotentialParams& p, const RelState& s) {
  const double r = std::hypot(s.x, s.y);
  const double kinetic = 0.25 * (s.vx * s.vx + s.vy * s.vy);
  const double a = std::abs(p.A), b = std::abs(p.B), g = std::abs(p.Gamma),
               d = std::abs(p.Delta), e = std::abs(p.E);
  double vmag = 0.0;
  const double r2 = r * r;
  switch (p.kind) {
    case PotentialKind::V1: vmag = 1.0 / r + b / r2 + g * r + d * r2; break;
    case PotentialKind::V2: vmag = a / r2 + b * r2 + g * r2 * r2 + d * r2 * r2 * r2; break;
    case PotentialKind::V3:
      vmag = a / (r2 * r2) + b / (r2 * r) + g / r2 + d / r + e * r2;
      break;
  }
  return kinetic + vmag;
}

double angmom_condition(const RelState& s) {
  return 0.5 * (std::abs(s.x * s.vy) + std::abs(s.y * s.vx)) +
         0.25 * (s.x * s.x + s.y * s.y);
}

std::vector<double> oracle_turning_roots(const PotentialParams& p, const MotionConstants& c) {
  const GPoly g = g_polynomial(p, c);
  const Poly poly = trimmed(g.poly);
  const double bound = detail::cauchy_bound(poly);
  auto roots = oracles::scan_poly_roots(poly.c, 1e-6, bound, 16384, true);
  return roots;
}

PotentialParams draw_confined(std::mt19937_64& rng, PotentialKind kind, double p_theta) {
  const auto u = [&](double lo, double hi) { return oracles::uniform(rng, lo, hi); };
  switch (kind) {
    case PotentialKind::V1:
      return PotentialParams::v1(u(-p_theta * p_theta + 0.1, 4.0), u(-3.0, 3.0),
                                 u(-1.0 / 16.0 + 0.02, 3.0));
    case PotentialKind::V2:
      return PotentialParams::v2(u(-p_theta * p_theta + 0.1, 4.0), u(-3.0, 3.0), u(-3.0, 3.0),
                                 u(0.02, 3.0));
    case PotentialKind::V3:
      return PotentialParams::v3(u(0.02, 4.0), u(-3.0, 3.0), u(-3.0, 3.0), u(-3.0, 3.0),
                                 u(-3.0, 1.0 / 16.0 - 0.02));
  }
  return {};
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("criterion 1: conservation on the reference configurations") {
  bool ok = true;
  std::string detail;
  double worst_case_seconds = 0.0;
  for (const auto& nc : reference_cases()) {
    const Timer timer;
    const RelState s0 = initial_state_at_perihelion(nc.p, nc.c);
    StepControl control;
    control.t_end = 200.0;
    control.tol = 1e-10;
    const Trajectory traj = integrate_relative(nc.p, s0, control);
    const double tol_h = 1e-8 * (1.0 + std::abs(traj.H0));
    const double tol_p = 1e-8 * (1.0 + std::abs(traj.p_theta0));
    const double eps = std::numeric_limits<double>::epsilon();
    for (const auto& s : traj.samples) {
      const double floor_h = 32.0 * eps * energy_condition(nc.p, s.state);
      const double floor_p = 32.0 * eps * angmom_condition(s.state);
      if (s.H_drift > tol_h + floor_h || s.p_theta_drift > tol_p + floor_p) {
        ok = false;
        if (detail.empty()) detail = nc.name + ": drift above tolerance";
      }
    }
    const double elapsed = timer.seconds();
    worst_case_seconds = std::max(worst_case_seconds, elapsed);
    if (elapsed >= 5.0) {
      ok = false;
      if (detail.empty()) detail = nc.name + ": runtime target exceeded";
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "10 cases, slowest %.2fs", worst_case_seconds);
  report(1, "conservation to t=200 at tol 1e-10", ok, detail.empty() ? buf : detail);
  CHECK(ok);
}

TEST_CASE("criterion 2: turning points match the sign-scan oracle") {
  const Timer timer;
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(20250802);
  for (PotentialKind kind : {PotentialKind::V1, PotentialKind::V2, PotentialKind::V3}) {
    const std::size_t max_count = (kind == PotentialKind::V3) ? 4 : 2;
    for (int trial = 0; trial < 10000; ++trial) {
      const double pt = oracles::uniform(rng, -1.5, 1.5);
      const PotentialParams p = draw_confined(rng, kind, pt);
      const MotionConstants c{oracles::uniform(rng, -5.0, 30.0), pt};
      const RadialDomain dom = turning_points(p, c);
      if (dom.turning_points.size() > max_count) {
        ok = false;
        if (detail.empty()) detail = "root count bound violated";
        continue;
      }
      const GPoly g = g_polynomial(p, c);
      for (const auto& tp : dom.turning_points) {
        if (std::abs(g.poly(tp.x)) > 1e-9 * (1.0 + g.poly.term_scale(tp.x))) {
          ok = false;
          if (detail.empty()) detail = "returned root fails the G residual";
        }
      }
      for (double expect : oracle_turning_roots(p, c)) {
        bool matched = false;
        for (const auto& tp : dom.turning_points)
          if (std::abs(tp.x - expect) <= 1e-9 * (1.0 + expect)) matched = true;
        if (!matched) {
          ok = false;
          if (detail.empty()) {
            std::ostringstream os;
            os << "missed oracle root " << expect << " (" << to_string(kind) << ")";
            detail = os.str();
          }
        }
      }
    }
  }
  const double elapsed = timer.seconds();
  if (elapsed >= 60.0) {
    ok = false;
    if (detail.empty()) detail = "runtime target exceeded";
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "3x10^4 draws, %.1fs", elapsed);
  report(2, "turning-point oracle equivalence", ok, detail.empty() ? buf : detail);
  CHECK(ok);
}

TEST_CASE("criterion 3: confinement within oracle turning radii") {
  bool ok = true;
  std::string detail;
  int bounded_cases = 0;
  for (const auto& nc : reference_cases()) {
    const RadialDomain dom = turning_points(nc.p, nc.c);
    if (dom.classification != Confinement::Bounded) continue;
    ++bounded_cases;
    const auto oracle = oracle_turning_roots(nc.p, nc.c);
    REQUIRE(oracle.size() >= 2);
    // the start interval is the innermost: its bounds are the first two roots
    const double lo = oracle[0];
    const double hi = oracle[1];
    const RelState s0 = initial_state_at_perihelion(nc.p, nc.c);
    StepControl control;
    control.t_end = 200.0;
    control.tol = 1e-10;
    const Trajectory traj = integrate_relative(nc.p, s0, control);
    for (const auto& s : traj.samples) {
      const double r = std::hypot(s.state.x, s.state.y);
      if (r < lo - 1e-6 || r > hi + 1e-6) {
        ok = false;
        if (detail.empty()) detail = nc.name + ": sample outside the oracle interval";
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d bounded cases", bounded_cases);
  report(3, "confinement between turning radii", ok, detail.empty() ? buf : detail);
  CHECK(ok);
}

TEST_CASE("criterion 4: quadrature vs ODE apsidal angle on random bounded cases") {
  const Timer timer;
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(41761);
  int done = 0;
  int trial = 0;
  double worst = 0.0;
  while (done < 100 && trial < 4000) {
    const auto kind = static_cast<PotentialKind>(trial % 3);
    ++trial;
    const double pt = oracles::uniform(rng, -1.0, 1.0);
    const PotentialParams p = draw_confined(rng, kind, pt);
    const MotionConstants c{oracles::uniform(rng, 1.0, 15.0), pt};
    const RadialDomain dom = turning_points(p, c);
    if (dom.classification != Confinement::Bounded || dom.allowed.size() != 1) continue;
    const AllowedInterval iv = dom.allowed[0];
    if (iv.zero_width() || !(iv.lo > 0.0)) continue;
    if (iv.hi - iv.lo < 0.05 * (1.0 + iv.lo)) continue;
    ++done;
    const ApsidalResult quad = apsidal_angle(p, c, iv.lo, iv.hi);
    const double measured = ode_oracle::apsidal_angle(p, c, iv.lo, iv.hi);
    const double diff = std::abs(quad.delta_theta - measured);
    worst = std::max(worst, diff);
    if (diff > 1e-4) {
      ok = false;
      if (detail.empty()) {
        std::ostringstream os;
        os << "difference " << diff << " on " << to_string(kind);
        detail = os.str();
      }
    }
  }
  if (done < 100) {
    ok = false;
    detail = "could not assemble 100 bounded draws";
  }
  const double elapsed = timer.seconds();
  if (elapsed >= 120.0) {
    ok = false;
    if (detail.empty()) detail = "runtime target exceeded";
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "100 cases, worst |diff| %.2e, %.1fs", worst, elapsed);
  report(4, "apsidal-angle cross-check", ok, detail.empty() ? buf : detail);
  CHECK(ok);
}

TEST_CASE("criterion 5: center-of-mass closed form") {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(195);
  for (int trial = 0; trial < 1000; ++trial) {
    CMState s;
    s.H_cm = oracles::uniform(rng, 0.0, 10.0);
    s.p_theta_cm = oracles::uniform(rng, -s.H_cm, 10.0);
    s.theta0 = oracles::uniform(rng, -3.141592, 3.141592);
    const Circle orb = cm_orbit(s);
    const double want_r = std::sqrt(s.H_cm);
    const double want_d = std::sqrt(s.H_cm + s.p_theta_cm);
    if (std::abs(orb.radius - want_r) > 1e-14 * (1.0 + want_r) ||
        std::abs(std::hypot(orb.cx, orb.cy) - want_d) > 1e-14 * (1.0 + want_d)) {
      ok = false;
      if (detail.empty()) detail = "radius/center distance beyond 1e-14";
    }
    for (const auto& pt : cm_sample_points(s, 32)) {
      if (std::abs(cm_residual(s, pt.x, pt.y)) > 1e-12) {
        ok = false;
        if (detail.empty()) detail = "orbit-equation residual above 1e-12";
      }
    }
  }
  report(5, "center-of-mass circle", ok, detail.empty() ? "1000 states x 32 points" : detail);
  CHECK(ok);
}

TEST_CASE("criterion 6: classification sweeps bracket both thresholds") {
  bool ok = true;
  std::string detail;

  {
    nlohmann::json j{
        {"schema_version", 1},
        {"potential", {{"kind", "V1"}, {"B", 1.0}, {"Gamma", 1.0}, {"Delta", 1.0}}},
        {"motion", {{"H", 10.0}, {"p_theta", 0.0}}},
        {"options", {{"quad_tol", 1e-8}}},
        {"sweep", {{"axes", {{{"param", "Delta"}, {"min", -0.2}, {"max", 0.2}, {"count", 401}}}}}}};
    std::ostringstream out;
    cmd_sweep(parse_config(j), out);
    double last_unbounded = -1e300, first_bounded = 1e300;
    const auto lines = csv_lines(out.str());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto cells = split_csv(lines[i]);
      const double v = std::stod(cells[0]);
      if (cells[1] == "bounded") first_bounded = std::min(first_bounded, v);
      if (cells[1] == "unbounded") last_unbounded = std::max(last_unbounded, v);
    }
    if (!(last_unbounded < -1.0 / 16.0 && -1.0 / 16.0 < first_bounded &&
          first_bounded - last_unbounded <= 1e-3 + 1e-12)) {
      ok = false;
      detail = "V1 Delta transition not bracketed at -1/16";
    }
  }
  {
    nlohmann::json j{
        {"schema_version", 1},
        {"potential",
         {{"kind", "V3"}, {"A", 1.0}, {"B", 1.0}, {"Gamma", 1.0}, {"Delta", 1.0}, {"E", 0.0}}},
        {"motion", {{"H", 10.0}, {"p_theta", 0.0}}},
        {"options", {{"quad_tol", 1e-8}}},
        {"sweep", {{"axes", {{{"param", "E"}, {"min", 0.0}, {"max", 0.2}, {"count", 201}}}}}}};
    std::ostringstream out;
    cmd_sweep(parse_config(j), out);
    double last_bounded = -1e300, first_unbounded = 1e300;
    const auto lines = csv_lines(out.str());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto cells = split_csv(lines[i]);
      const double v = std::stod(cells[0]);
      if (cells[1] == "bounded") last_bounded = std::max(last_bounded, v);
      if (cells[1] == "unbounded") first_unbounded = std::min(first_unbounded, v);
    }
    if (!(last_bounded < 1.0 / 16.0 && 1.0 / 16.0 < first_unbounded &&
          first_unbounded - last_bounded <= 1e-3 + 1e-12)) {
      ok = false;
      detail = "V3 E transition not bracketed at 1/16";
    }
  }
  report(6, "threshold bracketing sweeps", ok, detail.empty() ? "both thresholds" : detail);
  CHECK(ok);
}

TEST_CASE("criterion 7: V3 regime behaviors") {
  bool ok = true;
  std::string detail;

  {  // escape above the threshold
    const PotentialParams p = PotentialParams::v3(1, 1, 1, 1, 0.1);
    const MotionConstants c{10.0, 0.0};
    const RelState s0 = initial_state_at_perihelion(p, c);
    StepControl control;
    control.t_end = 50.0;
    const Trajectory traj = integrate_relative(p, s0, control);
    const double r0 = std::hypot(s0.x, s0.y);
    const double r_end = std::hypot(traj.samples.back().state.x, traj.samples.back().state.y);
    if (!(r_end > 10.0 * r0)) {
      ok = false;
      detail = "escape run stayed below 10x the start radius";
    }
  }
  {  // marginal: constant loop spacing
    const PotentialParams p = PotentialParams::v3(1, 1, 1, 1, 1.0 / 16.0);
    const MotionConstants c{10.0, 0.0};
    const RelState s0 = initial_state_at_perihelion(p, c);
    StepControl control;
    control.t_end = 200.0;
    const Trajectory traj = integrate_relative(p, s0, control);
    const auto cv = loop_spacing_cv(traj, 5);
    if (!cv || !(*cv < 0.05)) {
      ok = false;
      detail = "marginal run loop spacing not steady";
    }
  }
  {  // double well: two minima, four turning points, two intervals
    const PotentialParams p = PotentialParams::v3(3.0, -6.0, -6.0, 16.0, -0.2);
    const WellStructure ws = well_structure(p, {0.0, 0.0});
    int minima = 0;
    for (const auto& cp : ws.critical)
      if (cp.kind == CriticalKind::Minimum) ++minima;
    if (minima != 2) {
      ok = false;
      detail = "double-well potential did not produce two minima";
    } else {
      const double barrier = ws.critical[1].value;
      const double shallower = std::max(ws.critical[0].value, ws.critical[2].value);
      const MotionConstants below{0.5 * (barrier + shallower), 0.0};
      const RadialDomain dom = turning_points(p, below);
      const bool disjoint = dom.allowed.size() == 2 && dom.allowed[0].hi < dom.allowed[1].lo;
      if (dom.turning_points.size() != 4 || !disjoint) {
        ok = false;
        detail = "below-barrier energy did not yield four turning points in two intervals";
      }
    }
  }
  report(7, "V3 regimes: escape, marginal drift, double well", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 8: restricted sextic coefficient") {
  bool ok = true;
  std::string detail;
  // hand-evaluated: zeta = -16/(16E-1)
  //   B=Gamma=Delta=1, E=0, p=0, H=1: A = 4 - (32+4)^2/(4*16*4 - 64) = -2.75
  //   B=p=H=0, Gamma=1, Delta=2, E=0: A = zeta*Delta^2/4 = 16
  //   Delta=B=0: A = 0
  struct HandCase {
    double B, Gamma, Delta, E, pt, H, expect;
  };
  const HandCase cases[] = {
      {1.0, 1.0, 1.0, 0.0, 0.0, 1.0, -2.75},
      {0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 16.0},
      {0.0, 1.0, 0.0, 0.0, 0.3, 0.7, 0.0},
  };
  for (const auto& hc : cases) {
    const double got = kulkarni_restricted_A(hc.B, hc.Gamma, hc.Delta, hc.E, hc.pt, hc.H);
    if (std::abs(got - hc.expect) > 1e-12 * (1.0 + std::abs(hc.expect))) {
      ok = false;
      detail = "hand-evaluated value mismatch";
    }
  }
  bool threw_threshold = false, threw_denominator = false;
  try {
    kulkarni_restricted_A(1.0, 1.0, 1.0, 1.0 / 16.0, 0.0, 1.0);
  } catch (const domain_error&) {
    threw_threshold = true;
  }
  try {
    kulkarni_restricted_A(1.0, 4.0, 1.0, 0.0, 0.0, 1.0);  // denominator exactly zero
  } catch (const domain_error&) {
    threw_denominator = true;
  }
  if (!threw_threshold || !threw_denominator) {
    ok = false;
    detail = "missing domain error on degenerate input";
  }
  report(8, "restricted sextic coefficient", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 9: analytic forces against finite differences") {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(9001);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto kind = static_cast<PotentialKind>(trial % 3);
    PotentialParams p;
    const auto u = [&](double lo, double hi) { return oracles::uniform(rng, lo, hi); };
    switch (kind) {
      case PotentialKind::V1: p = PotentialParams::v1(u(-3, 3), u(-3, 3), u(-3, 3)); break;
      case PotentialKind::V2: p = PotentialParams::v2(u(-3, 3), u(-3, 3), u(-3, 3), u(-3, 3)); break;
      case PotentialKind::V3:
        p = PotentialParams::v3(u(-3, 3), u(-3, 3), u(-3, 3), u(-3, 3), u(-1, 1));
        break;
    }
    const MotionConstants c{0.0, u(-2, 2)};
    const double r = u(0.1, 10.0);
    const double fd =
        -oracles::central_difference([&](double x) { return eval_effective(p, c, x); }, r, h);
    const double exact = eval_force_radial(p, c, r);
    const double rel = std::abs(exact - fd) / std::max({1.0, std::abs(exact), std::abs(fd)});
    worst = std::max(worst, rel);
    if (rel > 1e-6) {
      ok = false;
      if (detail.empty()) detail = "radial force mismatch";
    }

    const double ang = u(-3.141592, 3.141592);
    const double x = r * std::cos(ang), y = r * std::sin(ang);
    const Vec2 grad = eval_gradient_cartesian(p, x, y);
    const double fdx = oracles::central_difference(
        [&](double t) { return eval_potential(p, std::hypot(t, y)); }, x, h);
    const double fdy = oracles::central_difference(
        [&](double t) { return eval_potential(p, std::hypot(x, t)); }, y, h);
    const double relx = std::abs(grad.x - fdx) / std::max({1.0, std::abs(grad.x), std::abs(fdx)});
    const double rely = std::abs(grad.y - fdy) / std::max({1.0, std::abs(grad.y), std::abs(fdy)});
    worst = std::max({worst, relx, rely});
    if (relx > 1e-6 || rely > 1e-6) {
      ok = false;
      if (detail.empty()) detail = "cartesian gradient mismatch";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "worst rel %.2e", worst);
  report(9, "gradient checks", ok, detail.empty() ? buf : detail);
  CHECK(ok);
}
