#pragma once

#include <cmath>
#include <sstream>

#include "orbits/errors.hpp"
#include "orbits/potentials.hpp"

namespace orbits {

/// Two identical particles (mass m, charge q) in a uniform magnetic field of
/// magnitude B, all in Gaussian units.
struct PhysicalSystem {
  double mass = 1.0;
  double charge = 1.0;
  double field = 1.0;
};

/// Scale constants of the dimensionless system: lengths in l_B, times in
/// 1/omega_c, energies in q^2/l_B, angular momenta in m*omega_c*l_B^2.
struct Scales {
  double length = 1.0;     // l_B = cbrt(m / B^2)
  double frequency = 1.0;  // omega_c = q B / m
  double energy = 1.0;     // q^2 / l_B
  double angmom = 1.0;     // m * omega_c * l_B^2
};

/// Dimensional potential coefficients as written in Gaussian units. The unit
/// of each coefficient depends on the kind and on the power of the separation
/// it multiplies. For V1 the leading coefficient is pinned to a = q^2; e is
/// meaningful only for V3.
struct RawPotential {
  PotentialKind kind = PotentialKind::V1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

inline Scales derive_scales(const PhysicalSystem& sys) {
  if (!(sys.mass > 0.0) || !std::isfinite(sys.mass))
    throw domain_error("derive_scales: mass must be positive");
  if (!(sys.field > 0.0) || !std::isfinite(sys.field))
    throw domain_error("derive_scales: field must be positive");
  if (sys.charge == 0.0 || !std::isfinite(sys.charge))
    throw domain_error("derive_scales: charge must be nonzero");
  Scales s;
  s.length = std::cbrt(sys.mass / (sys.field * sys.field));
  s.frequency = sys.charge * sys.field / sys.mass;
  s.energy = sys.charge * sys.charge / s.length;
  s.angmom = sys.mass * s.frequency * s.length * s.length;
  return s;
}

enum class UnitKind { Length, Time, Energy, AngularMomentum };

/// Converts a dimensionless value back to Gaussian units.
inline double redimensionalize(double value, UnitKind kind, const Scales& s) {
  switch (kind) {
    case UnitKind::Length: return value * s.length;
    case UnitKind::Time: return value / s.frequency;
    case UnitKind::Energy: return value * s.energy;
    case UnitKind::AngularMomentum: return value * s.angmom;
  }
  throw domain_error("redimensionalize: bad unit kind");
}

namespace detail {
// q^2 recovered from the stored scales (energy = q^2 / l_B).
inline double charge_squared(const Scales& s) { return s.energy * s.length; }
}  // namespace detail

/// Maps dimensional coefficients to the dimensionless parameter set. For V1
/// the Coulomb coefficient must equal q^2 and maps to the fixed 1/r term.
inline PotentialParams nondimensionalize(const RawPotential& raw, const Scales& s) {
  const double q2 = detail::charge_squared(s);
  const double l = s.length;
  switch (raw.kind) {
    case PotentialKind::V1: {
      if (std::abs(raw.a - q2) > 1e-12 * std::abs(q2)) {
        std::ostringstream os;
        os << "nondimensionalize: V1 requires a = q^2 (a = " << raw.a << ", q^2 = " << q2 << ")";
        throw domain_error(os.str());
      }
      return PotentialParams::v1(raw.b / (q2 * l), raw.c * l * l / q2, raw.d * l * l * l / q2);
    }
    case PotentialKind::V2: {
      const double l3 = l * l * l;
      return PotentialParams::v2(raw.a / (l * q2), raw.b * l3 / q2, raw.c * l3 * l * l / q2,
                                 raw.d * l3 * l3 * l / q2);
    }
    case PotentialKind::V3: {
      const double l3 = l * l * l;
      return PotentialParams::v3(raw.a / (l3 * q2), raw.b / (l * l * q2), raw.c / (l * q2),
                                 raw.d / q2, raw.e * l3 / q2);
    }
  }
  throw domain_error("nondimensionalize: bad kind");
}

/// Inverse of nondimensionalize; restores the Gaussian-unit coefficients.
inline RawPotential redimensionalize_potential(const PotentialParams& p, const Scales& s) {
  const double q2 = detail::charge_squared(s);
  const double l = s.length;
  RawPotential raw;
  raw.kind = p.kind;
  switch (p.kind) {
    case PotentialKind::V1:
      raw.a = q2;
      raw.b = p.B * q2 * l;
      raw.c = p.Gamma * q2 / (l * l);
      raw.d = p.Delta * q2 / (l * l * l);
      break;
    case PotentialKind::V2: {
      const double l3 = l * l * l;
      raw.a = p.A * l * q2;
      raw.b = p.B * q2 / l3;
      raw.c = p.Gamma * q2 / (l3 * l * l);
      raw.d = p.Delta * q2 / (l3 * l3 * l);
      break;
    }
    case PotentialKind::V3: {
      const double l3 = l * l * l;
      raw.a = p.A * l3 * q2;
      raw.b = p.B * l * l * q2;
      raw.c = p.Gamma * l * q2;
      raw.d = p.Delta * q2;
      raw.e = p.E * q2 / l3;
      break;
    }
  }
  return raw;
}

}  // namespace orbits
