#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "orbits/errors.hpp"
#include "orbits/polyroots.hpp"
#include "orbits/potentials.hpp"

namespace orbits {

/// Turning-point polynomial G together with the power k of the prefactor
/// relating it to the energy balance: G(r) = 16 r^k (H - V_eff(r)).
struct GPoly {
  Poly poly;
  int prefactor_power = 2;  // 2 for V1/V2, 4 for V3
};

/// Builds G from the printed coefficient formulas.
inline GPoly g_polynomial(const PotentialParams& p, const MotionConstants& c) {
  const double H = c.H;
  const double pt = c.p_theta;
  switch (p.kind) {
    case PotentialKind::V1:
      return {Poly({-16.0 * p.B - 16.0 * pt * pt, -16.0, 16.0 * H + 8.0 * pt, -16.0 * p.Gamma,
                    -1.0 - 16.0 * p.Delta}),
              2};
    case PotentialKind::V2:
      return {Poly({-16.0 * p.A - 16.0 * pt * pt, 0.0, 16.0 * H + 8.0 * pt, 0.0,
                    -1.0 - 16.0 * p.B, 0.0, -16.0 * p.Gamma, 0.0, -16.0 * p.Delta}),
              2};
    case PotentialKind::V3:
      return {Poly({-16.0 * p.A, -16.0 * p.B, -16.0 * p.Gamma - 16.0 * pt * pt, -16.0 * p.Delta,
                    8.0 * pt + 16.0 * H, 0.0, 16.0 * p.E - 1.0}),
              4};
  }
  throw domain_error("g_polynomial: bad kind");
}

enum class Confinement { Bounded, Unbounded, Marginal, Empty };

inline const char* to_string(Confinement c) {
  switch (c) {
    case Confinement::Bounded: return "bounded";
    case Confinement::Unbounded: return "unbounded";
    case Confinement::Marginal: return "marginal";
    case Confinement::Empty: return "empty";
  }
  return "?";
}

/// Classically allowed radial interval; hi is +infinity for an unbounded one.
struct AllowedInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool finite() const { return std::isfinite(hi); }
  bool zero_width() const { return hi == lo; }
};

struct RadialDomain {
  std::vector<RealRoot> turning_points;  // nonnegative, ascending
  std::vector<AllowedInterval> allowed;  // disjoint, ascending
  Confinement classification = Confinement::Empty;
};

/// Search cap for the sextic bracketing, scaled by the energy terms of G.
inline double default_r_cap(const MotionConstants& c) {
  return 10.0 * (1.0 + 16.0 * std::abs(c.H) + 8.0 * std::abs(c.p_theta) + 2.0);
}

namespace detail {

// Newton-polishes a simple turning point against H - V_eff directly, which is
// better conditioned than the cleared-denominator G near small radii.
inline double polish_turning_point(const PotentialParams& p, const MotionConstants& c, double r) {
  for (int it = 0; it < 3; ++it) {
    if (!(r > 0.0)) break;
    const double f = c.H - eval_effective(p, c, r);
    const double df = eval_force_radial(p, c, r);  // d/dr (H - V_eff)
    if (df == 0.0) break;
    const double next = r - f / df;
    if (!std::isfinite(next) || next <= 0.0) break;
    if (std::abs(next - r) > 0.1 * (1.0 + std::abs(r))) break;
    r = next;
  }
  return r;
}

inline std::vector<RealRoot> nonnegative_g_roots(const PotentialParams& p,
                                                 const MotionConstants& c, const GPoly& g,
                                                 const RootTolerances& tol) {
  std::vector<RealRoot> out;
  if (p.kind == PotentialKind::V2) {
    // G2 is even: reduce with X = r^2, solve the quartic, map back. X = 0
    // roots are artifacts of the 16 r^2 prefactor and are dropped.
    const Poly& full = g.poly;
    std::vector<double> xc;
    for (std::size_t i = 0; i < full.c.size(); i += 2) xc.push_back(full.c[i]);
    const RealRoots xroots = solve_quartic(Poly(std::move(xc)), tol);
    for (const auto& xr : xroots.roots) {
      if (xr.x <= 1e-10) continue;
      out.push_back({std::sqrt(xr.x), xr.mult});
    }
  } else {
    const RealRoots roots = (p.kind == PotentialKind::V1) ? solve_quartic(g.poly, tol)
                                                          : solve_real_roots(g.poly, tol);
    for (const auto& r : roots.roots) {
      if (r.x <= 1e-12) continue;
      out.push_back(r);
    }
  }
  for (auto& r : out)
    if (r.mult == Multiplicity::Simple) r.x = polish_turning_point(p, c, r.x);
  std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });
  return out;
}

}  // namespace detail

/// Turning points of the radial motion and the allowed intervals between
/// them, classified from the sign structure of G. Tangency cases (energy at
/// a well minimum) need merge/imag tolerances near sqrt(eps) to collapse.
inline RadialDomain turning_points(const PotentialParams& p, const MotionConstants& c,
                                   const RootTolerances& tol = {}) {
  const GPoly g = g_polynomial(p, c);
  RadialDomain dom;
  dom.turning_points = detail::nonnegative_g_roots(p, c, g, tol);

  const auto g_positive = [&](double r) { return g.poly(r) > 0.0; };
  const std::vector<RealRoot>& tp = dom.turning_points;
  const double inf = std::numeric_limits<double>::infinity();

  // walk the segments (0, r1), (r1, r2), ..., (rn, inf) by sampling G
  std::vector<double> edges;
  edges.push_back(0.0);
  for (const auto& r : tp) edges.push_back(r.x);
  edges.push_back(inf);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i];
    const double hi = edges[i + 1];
    double probe;
    if (std::isinf(hi))
      probe = lo * 1.5 + 1.0;
    else if (lo == 0.0)
      probe = hi * 0.5;
    else
      probe = 0.5 * (lo + hi);
    if (hi - lo <= 0.0) continue;
    if (g_positive(probe)) {
      if (!dom.allowed.empty() && dom.allowed.back().hi == lo)
        dom.allowed.back().hi = hi;  // double root interior to an allowed band
      else
        dom.allowed.push_back({lo, hi});
    }
  }
  // double roots walled in on both sides are circular orbits: zero-width bands
  for (const auto& r : tp) {
    if (r.mult != Multiplicity::Double) continue;
    bool inside = false;
    for (const auto& iv : dom.allowed)
      if (r.x >= iv.lo && r.x <= iv.hi) inside = true;
    if (!inside) dom.allowed.push_back({r.x, r.x});
  }
  std::sort(dom.allowed.begin(), dom.allowed.end(),
            [](const AllowedInterval& a, const AllowedInterval& b) { return a.lo < b.lo; });

  if (dom.allowed.empty()) {
    dom.classification = Confinement::Empty;
  } else if (classify_boundedness(p, c).marginal) {
    dom.classification = Confinement::Marginal;
  } else {
    bool any_infinite = false;
    for (const auto& iv : dom.allowed)
      if (!iv.finite()) any_infinite = true;
    dom.classification = any_infinite ? Confinement::Unbounded : Confinement::Bounded;
  }
  return dom;
}

/// The unique allowed interval containing r_start.
inline AllowedInterval allowed_interval_for(const PotentialParams& p, const MotionConstants& c,
                                            double r_start) {
  detail::require_positive_radius(r_start, "allowed_interval_for");
  const double slack = 1e-12 * (1.0 + std::abs(c.H));
  if (c.H - eval_effective(p, c, r_start) < -slack) {
    std::ostringstream os;
    os << "allowed_interval_for: start radius " << r_start << " lies in a forbidden region";
    throw domain_error(os.str());
  }
  const RadialDomain dom = turning_points(p, c);
  for (const auto& iv : dom.allowed) {
    const double pad = 1e-9 * (1.0 + std::abs(iv.lo));
    if (r_start >= iv.lo - pad && r_start <= iv.hi + pad) return iv;
  }
  throw domain_error("allowed_interval_for: no allowed interval contains the start radius");
}

enum class CriticalKind { Minimum, Maximum };

struct CriticalPoint {
  double r = 0.0;
  double value = 0.0;  // V_eff at the critical radius
  CriticalKind kind = CriticalKind::Minimum;
};

struct WellStructure {
  std::vector<CriticalPoint> critical;  // ascending in r, kinds alternating
  int well_count = 0;
};

struct WellScanOptions {
  double r_lo = 1e-4;
  double r_hi = 0.0;  // 0: default_r_cap
  int grid = 4000;    // log-spaced sample count
};

/// Critical points of V_eff located by bracketing sign changes of the radial
/// force on a log-spaced grid, refined by bisection.
inline WellStructure well_structure(const PotentialParams& p, const MotionConstants& c,
                                    WellScanOptions opt = {}) {
  if (opt.r_hi <= 0.0) opt.r_hi = default_r_cap(c);
  WellStructure ws;
  const double log_lo = std::log(opt.r_lo);
  const double log_hi = std::log(opt.r_hi);
  const int n = std::max(opt.grid, 16);
  double prev_r = opt.r_lo;
  double prev_f = eval_force_radial(p, c, prev_r);
  for (int i = 1; i <= n; ++i) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * i / n);
    const double f = eval_force_radial(p, c, r);
    if ((prev_f > 0.0 && f < 0.0) || (prev_f < 0.0 && f > 0.0)) {
      double a = prev_r, b = r, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = eval_force_radial(p, c, m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      // force + -> - means V_eff' - -> +: a minimum
      const CriticalKind kind = (prev_f > 0.0) ? CriticalKind::Minimum : CriticalKind::Maximum;
      ws.critical.push_back({root, eval_effective(p, c, root), kind});
    }
    prev_r = r;
    prev_f = f;
  }
  for (const auto& cp : ws.critical)
    if (cp.kind == CriticalKind::Minimum) ++ws.well_count;
  return ws;
}

}  // namespace orbits
