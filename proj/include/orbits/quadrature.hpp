#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "orbits/errors.hpp"
#include "orbits/polyroots.hpp"
#include "orbits/potentials.hpp"
#include "orbits/turning.hpp"

namespace orbits {

struct Rational {
  long long num = 0;
  long long den = 1;
};

struct ApsidalResult {
  double delta_theta = 0.0;
  double estimated_error = 0.0;
  double alpha = 0.0;  // delta_theta/pi - 1
  std::optional<Rational> rational_match;
};

struct QuadratureOptions {
  double tol = 1e-10;
  int max_depth = 48;
  long long q_max = 64;
  double tol_rat = 1e-6;
};

inline double periodicity_alpha(double delta_theta) {
  return delta_theta / std::numbers::pi - 1.0;
}

/// Best continued-fraction convergent p/q with q <= q_max, returned only when
/// it approximates alpha within tol_rat. Rationality is reported as evidence,
/// never decided.
inline std::optional<Rational> rational_approx(double alpha, long long q_max, double tol_rat) {
  if (!std::isfinite(alpha) || std::abs(alpha) > 1e12 || q_max < 1) return std::nullopt;
  long long p_prev = 1, q_prev = 0;
  long long p_cur = static_cast<long long>(std::floor(alpha)), q_cur = 1;
  double x = alpha;
  for (int it = 0; it < 64; ++it) {
    const double frac = x - std::floor(x);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    if (!std::isfinite(x) || x > 9e15) break;
    const long long a = static_cast<long long>(std::floor(x));
    const long long p_next = a * p_cur + p_prev;
    const long long q_next = a * q_cur + q_prev;
    if (q_next > q_max || q_next <= 0) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
  }
  const double approx = static_cast<double>(p_cur) / static_cast<double>(q_cur);
  if (std::abs(alpha - approx) <= tol_rat) return Rational{p_cur, q_cur};
  return std::nullopt;
}

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& gauss) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  kronrod = kGK15WeightsK[7] * f0;
  gauss = kGK15WeightsG[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGK15Nodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kGK15WeightsK[i] * fsum;
    if (i % 2 == 1) gauss += kGK15WeightsG[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
}

template <typename F>
inline void adaptive_gk(const F& f, double a, double b, double tol_abs, double span, int depth,
                        int max_depth, double& total, double& err_total) {
  double k, g;
  gk15(f, a, b, k, g);
  const double err = std::abs(k - g);
  if (err <= tol_abs * (b - a) / span || b - a <= 1e-14 * span) {
    total += k;
    err_total += err;
    return;
  }
  if (depth >= max_depth)
    throw numeric_error("adaptive quadrature did not converge (depth limit)");
  const double mid = 0.5 * (a + b);
  adaptive_gk(f, a, mid, tol_abs, span, depth + 1, max_depth, total, err_total);
  adaptive_gk(f, mid, b, tol_abs, span, depth + 1, max_depth, total, err_total);
}

// Removes the two interval-endpoint roots from G by synthetic division:
// G(r) = (r - r_min)(r - r_max) S(r); returns Q = -S, positive across the
// allowed interval.
inline Poly deflate_interval(const Poly& g, double r_min, double r_max) {
  const auto divide_out = [](const Poly& p, double root) {
    Poly q;
    q.c.assign(p.c.size() - 1, 0.0);
    double carry = p.c.back();
    for (std::size_t i = p.c.size() - 1; i-- > 0;) {
      q.c[i] = carry;
      carry = p.c[i] + carry * root;
    }
    return q;  // remainder `carry` is the residual of an imperfect root; dropped
  };
  Poly s = divide_out(divide_out(g, r_min), r_max);
  for (double& v : s.c) v = -v;
  return s;
}

}  // namespace detail

/// Angular advance over a sub-range [a, b] of the allowed interval
/// [r_min, r_max], with the inverse-square-root endpoint singularities
/// removed analytically: G factors as (r - r_min)(r_max - r) Q(r) and the
/// substitution r = r_min + (r_max - r_min) sin^2(u) cancels both square
/// roots against the Jacobian, leaving 8 f(r)/sqrt(Q(r)) du (f gains a factor
/// r for V3, whose G carries an r^4 prefactor).
inline std::pair<double, double> apsidal_angle_segment(const PotentialParams& p,
                                                       const MotionConstants& c, double r_min,
                                                       double r_max, double a, double b,
                                                       const QuadratureOptions& opts = {}) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw domain_error("apsidal_angle: interval must satisfy 0 < r_min < r_max");
  if (!(a >= r_min && b <= r_max && a < b))
    throw domain_error("apsidal_angle: sub-range must lie inside [r_min, r_max]");
  const GPoly g = g_polynomial(p, c);
  const double width = r_max - r_min;
  if (width <= 1e-8 * (1.0 + r_max))
    throw domain_error("apsidal_angle: zero-width interval (circular orbit)");
  for (double endpoint : {r_min, r_max}) {
    const double resid = std::abs(g.poly(endpoint));
    if (resid > 1e-6 * g.poly.term_scale(endpoint))
      throw domain_error("apsidal_angle: interval endpoints are not turning points");
  }

  const Poly q = detail::deflate_interval(g.poly, r_min, r_max);
  // a double turning point leaves Q with a zero at that endpoint
  const double q_scale = std::max(q.term_scale(r_min), q.term_scale(r_max));
  if (!(q(r_min) > 1e-7 * q_scale) || !(q(r_max) > 1e-7 * q_scale))
    throw domain_error("apsidal_angle: double turning point (circular orbit)");

  const bool extra_r = (p.kind == PotentialKind::V3);
  const auto integrand = [&](double u) {
    const double su = std::sin(u);
    const double r = r_min + width * su * su;
    const double qv = q(r);
    if (!(qv > 0.0))
      throw domain_error("apsidal_angle: G not positive inside the interval");
    double f = c.p_theta / r - r / 4.0;
    if (extra_r) f *= r;
    return 8.0 * f / std::sqrt(qv);
  };

  const auto u_of_r = [&](double r) {
    const double ratio = std::clamp((r - r_min) / width, 0.0, 1.0);
    return std::asin(std::sqrt(ratio));
  };
  const double ua = u_of_r(a);
  const double ub = u_of_r(b);

  // first sweep at coarse tolerance fixes the scale for the refinement pass
  double coarse = 0.0, coarse_err = 0.0;
  detail::adaptive_gk(integrand, ua, ub, 1e-3, ub - ua, 0, opts.max_depth, coarse, coarse_err);
  const double tol_abs = opts.tol * (1.0 + std::abs(coarse));
  double total = 0.0, err_total = 0.0;
  detail::adaptive_gk(integrand, ua, ub, tol_abs, ub - ua, 0, opts.max_depth, total, err_total);
  return {total, err_total};
}

/// Apsidal angle over the whole allowed interval plus periodicity evidence.
inline ApsidalResult apsidal_angle(const PotentialParams& p, const MotionConstants& c,
                                   double r_min, double r_max,
                                   const QuadratureOptions& opts = {}) {
  const auto [value, err] = apsidal_angle_segment(p, c, r_min, r_max, r_min, r_max, opts);
  ApsidalResult res;
  res.delta_theta = value;
  res.estimated_error = err;
  res.alpha = periodicity_alpha(value);
  res.rational_match = rational_approx(res.alpha, opts.q_max, opts.tol_rat);
  return res;
}

}  // namespace orbits
