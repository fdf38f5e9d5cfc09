#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "orbits/errors.hpp"

namespace orbits {

/// Dense real polynomial, coefficients in ascending degree order.
struct Poly {
  std::vector<double> c;

  Poly() = default;
  explicit Poly(std::vector<double> ascending) : c(std::move(ascending)) {}

  int degree() const { return static_cast<int>(c.size()) - 1; }

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  }

  Poly derivative() const {
    Poly d;
    if (c.size() <= 1) {
      d.c = {0.0};
      return d;
    }
    d.c.resize(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * static_cast<double>(i);
    return d;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
  }

  /// Sum of |c_i x^i|; the natural scale against which residuals are judged.
  double term_scale(double x) const {
    double acc = 0.0, xp = 1.0;
    for (double v : c) {
      acc += std::abs(v * xp);
      xp *= x;
    }
    return acc;
  }
};

/// Drops high-order coefficients smaller than rel_tol times the largest one.
inline Poly trimmed(const Poly& p, double rel_tol = 1e-14) {
  const double cutoff = rel_tol * p.max_abs_coeff();
  Poly out = p;
  while (out.c.size() > 1 && std::abs(out.c.back()) <= cutoff) out.c.pop_back();
  return out;
}

enum class Multiplicity { Simple, Double };

struct RealRoot {
  double x = 0.0;
  Multiplicity mult = Multiplicity::Simple;
};

struct RealRoots {
  std::vector<RealRoot> roots;  // strictly ascending after merging

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(roots.size());
    for (const auto& r : roots) v.push_back(r.x);
    return v;
  }
};

struct RootTolerances {
  double imag = 1e-10;      // complex pairs closer than imag*(1+|Re|) count as real
  double merge = 1e-8;      // roots closer than merge*(1+|r|) collapse to a double
  double residual = 1e-10;  // |P(r)| <= residual * term_scale accepted as a root
};

namespace detail {

inline bool nearly_zero_poly(const Poly& p) {
  for (double v : p.c)
    if (v != 0.0) return false;
  return true;
}

/// Monic quadratic x^2 + b x + c. Near-real complex pairs (imaginary part
/// below tol_imag scale) collapse onto the real axis as a double root.
inline void monic_quadratic_roots(double b, double c, double tol_imag,
                                  std::vector<RealRoot>& out) {
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double r1, r2;
    if (q != 0.0) {
      r1 = q;
      r2 = c / q;
    } else {
      r1 = r2 = -0.5 * b;
    }
    if (r1 > r2) std::swap(r1, r2);
    if (r1 == r2) {
      out.push_back({r1, Multiplicity::Double});
    } else {
      out.push_back({r1, Multiplicity::Simple});
      out.push_back({r2, Multiplicity::Simple});
    }
    return;
  }
  const double im = 0.5 * std::sqrt(-disc);
  const double re = -0.5 * b;
  if (im <= tol_imag * (1.0 + std::abs(re))) out.push_back({re, Multiplicity::Double});
}

/// All real roots of the monic cubic x^3 + a2 x^2 + a1 x + a0.
inline std::vector<double> monic_cubic_roots(double a2, double a1, double a0) {
  // depressed form u^3 + p u + q with x = u - a2/3
  const double shift = a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = a0 - a2 * a1 / 3.0 + 2.0 * a2 * a2 * a2 / 27.0;
  std::vector<double> roots;
  const double half_q = 0.5 * q;
  const double disc = half_q * half_q + p * p * p / 27.0;
  if (disc > 0.0) {
    // one real root; pick the cube root free of cancellation
    const double sq = std::sqrt(disc);
    const double m = -half_q - (q >= 0.0 ? sq : -sq);
    const double alpha = std::cbrt(m);
    const double beta = (alpha != 0.0) ? -p / (3.0 * alpha) : std::cbrt(-q);
    roots.push_back(alpha + beta - shift);
  } else if (p == 0.0) {
    roots.push_back(std::cbrt(-q) - shift);
  } else {
    const double rad = std::sqrt(-p / 3.0);
    double cosarg = -half_q / (rad * rad * rad);
    cosarg = std::clamp(cosarg, -1.0, 1.0);
    const double phi = std::acos(cosarg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(2.0 * rad * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0) - shift);
  }
  // one Newton step against the monic cubic tightens trig-path roots
  for (double& r : roots) {
    const double f = ((r + a2) * r + a1) * r + a0;
    const double df = (3.0 * r + 2.0 * a2) * r + a1;
    if (df != 0.0) {
      const double step = f / df;
      if (std::isfinite(step)) r -= step;
    }
  }
  return roots;
}

inline void newton_polish(const Poly& p, const Poly& dp, double& x) {
  double best = x;
  double best_abs = std::abs(p(x));
  double cur = x;
  for (int it = 0; it < 3; ++it) {
    const double d = dp(cur);
    if (d == 0.0) break;
    const double next = cur - p(cur) / d;
    if (!std::isfinite(next)) break;
    const double fa = std::abs(p(next));
    if (fa < best_abs) {
      best_abs = fa;
      best = next;
    }
    cur = next;
  }
  x = best;
}

/// Sorts, polishes, and merges candidate roots. Pairs collapse into one root
/// flagged Double when they sit within the merge tolerance, or when the
/// polynomial is at rounding level across the gap between them (the noise
/// band around an even-multiplicity root produces spurious crossings wider
/// than any fixed distance tolerance).
inline RealRoots finalize_roots(const Poly& p, std::vector<RealRoot> cand,
                                const RootTolerances& tol, bool polish) {
  if (polish) {
    const Poly dp = p.derivative();
    for (auto& r : cand)
      if (r.mult == Multiplicity::Simple) newton_polish(p, dp, r.x);
  }
  std::sort(cand.begin(), cand.end(), [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });
  const double noise = 32.0 * std::numeric_limits<double>::epsilon();
  RealRoots out;
  for (const auto& r : cand) {
    if (!out.roots.empty()) {
      RealRoot& last = out.roots.back();
      const double gap = std::abs(r.x - last.x);
      bool merge = gap <= tol.merge * (1.0 + std::abs(r.x));
      if (!merge && gap <= 1e-4 * (1.0 + std::abs(r.x))) {
        const double mid = 0.5 * (r.x + last.x);
        merge = std::abs(p(mid)) <= noise * p.term_scale(mid);
      }
      if (merge) {
        if (std::abs(p(r.x)) < std::abs(p(last.x))) last.x = r.x;
        last.mult = Multiplicity::Double;
        continue;
      }
    }
    out.roots.push_back(r);
  }
  return out;
}

}  // namespace detail

/// Number of sign changes in the nonzero coefficient sequence: an upper bound
/// (of matching parity) on the count of positive real roots.
inline int descartes_positive_bound(const Poly& p) {
  const double cutoff = 1e-14 * p.max_abs_coeff();
  int changes = 0;
  int prev_sign = 0;
  for (double v : p.c) {
    if (std::abs(v) <= cutoff) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (prev_sign != 0 && s != prev_sign) ++changes;
    prev_sign = s;
  }
  return changes;
}

/// Closed-form real roots for degree <= 4. Quartics go through Ferrari's
/// construction: the resolvent cubic splits the depressed quartic into two
/// quadratics. Lower degrees delegate to the quadratic/cubic formulas.
inline RealRoots solve_quartic(const Poly& input, const RootTolerances& tol = {}) {
  for (double v : input.c)
    if (!std::isfinite(v)) throw domain_error("solve_quartic: non-finite coefficient");
  if (detail::nearly_zero_poly(input)) throw domain_error("solve_quartic: zero polynomial");
  const Poly p = trimmed(input);
  const int n = p.degree();
  if (n > 4) throw domain_error("solve_quartic: degree exceeds 4");

  std::vector<RealRoot> cand;
  if (n == 0) return {};
  if (n == 1) {
    cand.push_back({-p.c[0] / p.c[1], Multiplicity::Simple});
    return detail::finalize_roots(p, std::move(cand), tol, false);
  }
  if (n == 2) {
    detail::monic_quadratic_roots(p.c[1] / p.c[2], p.c[0] / p.c[2], tol.imag, cand);
    return detail::finalize_roots(p, std::move(cand), tol, true);
  }
  if (n == 3) {
    for (double r : detail::monic_cubic_roots(p.c[2] / p.c[3], p.c[1] / p.c[3], p.c[0] / p.c[3]))
      cand.push_back({r, Multiplicity::Simple});
    return detail::finalize_roots(p, std::move(cand), tol, true);
  }

  const double a3 = p.c[3] / p.c[4];
  const double a2 = p.c[2] / p.c[4];
  const double a1 = p.c[1] / p.c[4];
  const double a0 = p.c[0] / p.c[4];

  // depress with x = y - a3/4: y^4 + P y^2 + Q y + R
  const double P = a2 - 3.0 * a3 * a3 / 8.0;
  const double Q = a1 - a3 * a2 / 2.0 + a3 * a3 * a3 / 8.0;
  const double R = a0 - a3 * a1 / 4.0 + a3 * a3 * a2 / 16.0 - 3.0 * a3 * a3 * a3 * a3 / 256.0;
  const double shift = a3 / 4.0;

  // resolvent cubic 8t^3 + 8P t^2 + (2P^2 - 8R) t - Q^2 = 0, monic form;
  // any root works algebraically, the largest keeps sqrt(2t) well away from
  // cancellation
  const auto tcand = detail::monic_cubic_roots(P, P * P / 4.0 - R, -Q * Q / 8.0);
  double t = -std::numeric_limits<double>::infinity();
  for (double v : tcand) t = std::max(t, v);

  const double tiny_t = 1e-14 * (1.0 + P * P + std::abs(R));
  if (!(t > tiny_t)) {
    // Q effectively vanished: biquadratic y^4 + P y^2 + R
    std::vector<RealRoot> zroots;
    detail::monic_quadratic_roots(P, R, tol.imag, zroots);
    for (const auto& z : zroots) {
      if (z.x > tiny_t) {
        const double y = std::sqrt(z.x);
        cand.push_back({y - shift, z.mult});
        cand.push_back({-y - shift, z.mult});
      } else if (z.x >= -1e-12 * (1.0 + std::abs(P) + std::abs(R))) {
        cand.push_back({-shift, Multiplicity::Double});
      }
    }
    return detail::finalize_roots(p, std::move(cand), tol, true);
  }

  const double s = std::sqrt(2.0 * t);
  const double u = Q / (2.0 * s);
  detail::monic_quadratic_roots(-s, P / 2.0 + t + u, tol.imag, cand);
  detail::monic_quadratic_roots(s, P / 2.0 + t - u, tol.imag, cand);
  for (auto& r : cand) r.x -= shift;
  return detail::finalize_roots(p, std::move(cand), tol, true);
}

namespace detail {

inline double cauchy_bound(const Poly& p) {
  const double lead = std::abs(p.c.back());
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < p.c.size(); ++i) m = std::max(m, std::abs(p.c[i]));
  return 1.0 + m / lead;
}

inline double bisect_root(const Poly& p, double a, double b, double fa) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = p(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(a) + std::abs(b)))
      break;
  }
  return 0.5 * (a + b);
}

/// Recursive derivative-sequence bracketing: the real roots of P' split the
/// line into monotone segments, each holding at most one root of P.
inline std::vector<double> bracketed_real_roots(const Poly& p) {
  const int n = p.degree();
  if (n <= 0) return {};
  if (n == 1) return {-p.c[0] / p.c[1]};
  if (n == 2) {
    std::vector<RealRoot> rr;
    monic_quadratic_roots(p.c[1] / p.c[2], p.c[0] / p.c[2], 0.0, rr);
    std::vector<double> out;
    for (const auto& r : rr)
      if (r.mult == Multiplicity::Simple) out.push_back(r.x);
    // keep an exact double root too; it still separates monotone segments
    if (rr.size() == 1 && rr[0].mult == Multiplicity::Double) out.push_back(rr[0].x);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<double> crit = bracketed_real_roots(trimmed(p.derivative()));
  const double bound = cauchy_bound(p);
  std::vector<double> nodes;
  nodes.push_back(-bound);
  for (double c : crit)
    if (c > -bound && c < bound) nodes.push_back(c);
  nodes.push_back(bound);

  std::vector<double> roots;
  double fa = p(nodes.front());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double fb = p(nodes[i + 1]);
    if (fa == 0.0) roots.push_back(nodes[i]);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
      roots.push_back(bisect_root(p, nodes[i], nodes[i + 1], fa));
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(nodes.back());
  return roots;
}

}  // namespace detail

/// All real roots via derivative-sequence bracketing; correctness does not
/// depend on root spacing. Even-multiplicity roots that never cross zero are
/// picked up at critical points with residual-level |P|.
inline RealRoots solve_real_roots(const Poly& input, const RootTolerances& tol = {}) {
  for (double v : input.c)
    if (!std::isfinite(v)) throw domain_error("solve_real_roots: non-finite coefficient");
  if (detail::nearly_zero_poly(input)) throw domain_error("solve_real_roots: zero polynomial");
  const Poly p = trimmed(input);
  if (p.degree() > 8) throw domain_error("solve_real_roots: degree exceeds 8");
  if (p.degree() < 1) return {};

  std::vector<double> raw = detail::bracketed_real_roots(p);

  // touch roots: critical points where P returns to rounding level without a
  // sign change (even multiplicity); ones that land on a bracketed root
  // upgrade it to Double during the merge below
  std::vector<RealRoot> cand;
  for (double r : raw) cand.push_back({r, Multiplicity::Simple});
  for (double c : detail::bracketed_real_roots(trimmed(p.derivative()))) {
    if (std::abs(p(c)) > tol.residual * p.term_scale(c)) continue;
    cand.push_back({c, Multiplicity::Double});
  }
  return detail::finalize_roots(p, std::move(cand), tol, true);
}

/// Printed restriction on V3's inverse-quartic coefficient under which the
/// sextic turning-point polynomial admits algebraic solutions:
///   zeta = -16/(16E - 1)
///   A = zeta*Delta^2/4
///       - (Delta*p_theta*zeta + 2*Delta*H*zeta + 4*B)^2
///         / (4*zeta*(p_theta + 2*H)^2 - 64*(Gamma + p_theta^2))
inline double kulkarni_restricted_A(double B, double Gamma, double Delta, double E,
                                    double p_theta, double H) {
  const double denom_zeta = 16.0 * E - 1.0;
  if (denom_zeta == 0.0) throw domain_error("kulkarni_restricted_A: E = 1/16");
  const double zeta = -16.0 / denom_zeta;
  const double num = Delta * p_theta * zeta + 2.0 * Delta * H * zeta + 4.0 * B;
  const double pt2h = p_theta + 2.0 * H;
  const double den = 4.0 * zeta * pt2h * pt2h - 64.0 * (Gamma + p_theta * p_theta);
  if (den == 0.0) throw domain_error("kulkarni_restricted_A: zero denominator");
  return zeta * Delta * Delta / 4.0 - num * num / den;
}

}  // namespace orbits
