#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "orbits/errors.hpp"

namespace orbits {

enum class PotentialKind { V1, V2, V3 };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::V1: return "V1";
    case PotentialKind::V2: return "V2";
    case PotentialKind::V3: return "V3";
  }
  return "?";
}

/// Dimensionless parameters of the three interaction potentials, with r the
/// dimensionless inter-particle separation:
///
///   V1(r) = 1/r + B/r^2 + Gamma*r + Delta*r^2   (the Coulomb coefficient is fixed at 1)
///   V2(r) = A/r^2 + B*r^2 + Gamma*r^4 + Delta*r^6
///   V3(r) = A/r^4 + B/r^3 + Gamma/r^2 + Delta/r - E*r^2
struct PotentialParams {
  PotentialKind kind = PotentialKind::V1;
  double A = 0.0;  // unused for V1
  double B = 0.0;
  double Gamma = 0.0;
  double Delta = 0.0;
  double E = 0.0;  // V3 only

  static PotentialParams v1(double B, double Gamma, double Delta) {
    return {PotentialKind::V1, 0.0, B, Gamma, Delta, 0.0};
  }
  static PotentialParams v2(double A, double B, double Gamma, double Delta) {
    return {PotentialKind::V2, A, B, Gamma, Delta, 0.0};
  }
  static PotentialParams v3(double A, double B, double Gamma, double Delta, double E) {
    return {PotentialKind::V3, A, B, Gamma, Delta, E};
  }
};

/// Conserved quantities of the relative motion: energy in units q^2/l_B and
/// angular momentum in units m*omega_c*l_B^2.
struct MotionConstants {
  double H = 0.0;
  double p_theta = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {
inline void require_positive_radius(double r, const char* who) {
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << who << ": radius must be positive (got " << r << ")";
    throw domain_error(os.str());
  }
}
}  // namespace detail

/// Bare potential V(r).
inline double eval_potential(const PotentialParams& p, double r) {
  detail::require_positive_radius(r, "eval_potential");
  switch (p.kind) {
    case PotentialKind::V1:
      return 1.0 / r + p.B / (r * r) + p.Gamma * r + p.Delta * r * r;
    case PotentialKind::V2: {
      const double r2 = r * r;
      return p.A / r2 + r2 * (p.B + r2 * (p.Gamma + r2 * p.Delta));
    }
    case PotentialKind::V3: {
      const double r2 = r * r;
      return p.A / (r2 * r2) + p.B / (r2 * r) + p.Gamma / r2 + p.Delta / r - p.E * r2;
    }
  }
  throw domain_error("eval_potential: bad kind");
}

/// dV/dr of the bare potential.
inline double eval_potential_derivative(const PotentialParams& p, double r) {
  detail::require_positive_radius(r, "eval_potential_derivative");
  switch (p.kind) {
    case PotentialKind::V1:
      return -1.0 / (r * r) - 2.0 * p.B / (r * r * r) + p.Gamma + 2.0 * p.Delta * r;
    case PotentialKind::V2: {
      const double r2 = r * r;
      return -2.0 * p.A / (r2 * r) + r * (2.0 * p.B + r2 * (4.0 * p.Gamma + r2 * 6.0 * p.Delta));
    }
    case PotentialKind::V3: {
      const double r2 = r * r;
      const double r3 = r2 * r;
      return -4.0 * p.A / (r3 * r2) - 3.0 * p.B / (r2 * r2) - 2.0 * p.Gamma / r3 -
             p.Delta / r2 - 2.0 * p.E * r;
    }
  }
  throw domain_error("eval_potential_derivative: bad kind");
}

/// Effective radial potential (p_theta/r - r/4)^2 + V(r); the squared term is
/// the rotational kinetic energy after eliminating the angular velocity with
/// the conserved angular momentum.
inline double eval_effective(const PotentialParams& p, const MotionConstants& c, double r) {
  detail::require_positive_radius(r, "eval_effective");
  const double w = c.p_theta / r - r / 4.0;
  return w * w + eval_potential(p, r);
}

/// Exact radial force -dV_eff/dr.
inline double eval_force_radial(const PotentialParams& p, const MotionConstants& c, double r) {
  detail::require_positive_radius(r, "eval_force_radial");
  const double w = c.p_theta / r - r / 4.0;
  // d/dr of w^2 is 2w * (-p_theta/r^2 - 1/4)
  return 2.0 * w * (c.p_theta / (r * r) + 0.25) - eval_potential_derivative(p, r);
}

/// Cartesian gradient of the bare potential, grad V = V'(r) * (x, y)/r.
inline Vec2 eval_gradient_cartesian(const PotentialParams& p, double x, double y) {
  const double r = std::hypot(x, y);
  if (!(r > 0.0)) throw domain_error("eval_gradient_cartesian: point at the origin");
  const double dv = eval_potential_derivative(p, r);
  return {dv * x / r, dv * y / r};
}

struct BoundednessReport {
  bool lower_ok = false;   // repulsive wall near r -> 0
  bool upper_ok = false;   // attractive force as r -> infinity
  bool marginal = false;   // some condition met with equality within tolerance
  std::string detail;
};

/// Checks the two confinement inequalities of the active potential:
///   V1: B > -p_theta^2       and  Delta > -1/16
///   V2: A > -p_theta^2       and  Delta > 0
///   V3: A > 0                and  E < 1/16
inline BoundednessReport classify_boundedness(const PotentialParams& p, const MotionConstants& c,
                                              double tol_marginal = 1e-12) {
  double lower_margin = 0.0, upper_margin = 0.0;
  const char* lower_text = nullptr;
  const char* upper_text = nullptr;
  switch (p.kind) {
    case PotentialKind::V1:
      lower_margin = p.B + c.p_theta * c.p_theta;
      upper_margin = p.Delta + 1.0 / 16.0;
      lower_text = "B > -p_theta^2";
      upper_text = "Delta > -1/16";
      break;
    case PotentialKind::V2:
      lower_margin = p.A + c.p_theta * c.p_theta;
      upper_margin = p.Delta;
      lower_text = "A > -p_theta^2";
      upper_text = "Delta > 0";
      break;
    case PotentialKind::V3:
      lower_margin = p.A;
      upper_margin = 1.0 / 16.0 - p.E;
      lower_text = "A > 0";
      upper_text = "E < 1/16";
      break;
  }
  BoundednessReport rep;
  rep.lower_ok = lower_margin > 0.0;
  rep.upper_ok = upper_margin > 0.0;
  const bool lower_marginal = std::abs(lower_margin) <= tol_marginal;
  const bool upper_marginal = std::abs(upper_margin) <= tol_marginal;
  rep.marginal = lower_marginal || upper_marginal;
  std::ostringstream os;
  os << lower_text << ": " << (lower_marginal ? "equality" : (rep.lower_ok ? "holds" : "fails"))
     << " (margin " << lower_margin << "); " << upper_text << ": "
     << (upper_marginal ? "equality" : (rep.upper_ok ? "holds" : "fails")) << " (margin "
     << upper_margin << ")";
  rep.detail = os.str();
  return rep;
}

}  // namespace orbits
