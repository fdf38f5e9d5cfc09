#include <catch2/catch.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "orbits/units.hpp"
#include "oracles.hpp"

using namespace orbits;

TEST_CASE("derive_scales on the all-unity system") {
  const Scales s = derive_scales({1.0, 1.0, 1.0});
  CHECK(s.length == 1.0);
  CHECK(s.frequency == 1.0);
  CHECK(s.energy == 1.0);
  CHECK(s.angmom == 1.0);
}

TEST_CASE("derive_scales cube-root arithmetic") {
  const Scales s = derive_scales({8.0, 1.0, 1.0});
  CHECK(s.length == Approx(2.0).epsilon(1e-15));
  CHECK(s.frequency == Approx(0.125).epsilon(1e-15));
}

TEST_CASE("derive_scales general case m=1 q=2 B=3") {
  const Scales s = derive_scales({1.0, 2.0, 3.0});
  CHECK(s.length == Approx(std::pow(3.0, -2.0 / 3.0)).epsilon(1e-15));
  CHECK(s.frequency == Approx(6.0).epsilon(1e-15));
  CHECK(s.energy == Approx(4.0 * std::pow(3.0, 2.0 / 3.0)).epsilon(1e-14));
  CHECK(s.angmom == Approx(1.0 * 6.0 * std::pow(3.0, -4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("derive_scales rejects invalid systems") {
  CHECK_THROWS_AS(derive_scales({-1.0, 1.0, 1.0}), domain_error);
  CHECK_THROWS_AS(derive_scales({0.0, 1.0, 1.0}), domain_error);
  CHECK_THROWS_AS(derive_scales({1.0, 0.0, 1.0}), domain_error);
  CHECK_THROWS_AS(derive_scales({1.0, 1.0, 0.0}), domain_error);
  CHECK_THROWS_AS(derive_scales({1.0, 1.0, -2.0}), domain_error);
}

TEST_CASE("derive_scales is pure: repeated calls are bit-identical") {
  const PhysicalSystem sys{3.7, -1.25, 0.081};
  const Scales a = derive_scales(sys);
  const Scales b = derive_scales(sys);
  CHECK(std::memcmp(&a, &b, sizeof(Scales)) == 0);
}

TEST_CASE("nondimensionalize V1") {
  const Scales unit = derive_scales({1.0, 1.0, 1.0});
  SECTION("zero coefficients map to zero") {
    const PotentialParams p = nondimensionalize({PotentialKind::V1, 1.0, 0.0, 0.0, 0.0, 0.0}, unit);
    CHECK(p.B == 0.0);
    CHECK(p.Gamma == 0.0);
    CHECK(p.Delta == 0.0);
  }
  SECTION("unit scales are the identity") {
    const PotentialParams p = nondimensionalize({PotentialKind::V1, 1.0, 1.0, 1.0, 1.0, 0.0}, unit);
    CHECK(p.B == Approx(1.0).epsilon(1e-15));
    CHECK(p.Gamma == Approx(1.0).epsilon(1e-15));
    CHECK(p.Delta == Approx(1.0).epsilon(1e-15));
  }
  SECTION("the Coulomb coefficient is pinned to q^2") {
    CHECK_THROWS_AS(nondimensionalize({PotentialKind::V1, 2.0, 0.0, 0.0, 0.0, 0.0}, unit),
                    domain_error);
  }
}

TEST_CASE("nondimensionalize V3 inverse-quartic coefficient") {
  // l_B = 2 comes from m=8, q=1, B=1; then A = a/(l^3 q^2) = 8/8 = 1
  const Scales s = derive_scales({8.0, 1.0, 1.0});
  const PotentialParams p =
      nondimensionalize({PotentialKind::V3, 8.0, 0.0, 0.0, 0.0, 0.0}, s);
  CHECK(p.A == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("redimensionalize unit kinds") {
  const Scales unit = derive_scales({1.0, 1.0, 1.0});
  CHECK(redimensionalize(1.0, UnitKind::Length, unit) == 1.0);

  Scales s = unit;
  s.frequency = 4.0;
  CHECK(redimensionalize(2.0, UnitKind::Time, s) == Approx(0.5).epsilon(1e-15));

  // q = 2, l_B = 2 -> energy unit q^2/l = 2
  const Scales s2 = derive_scales({32.0, 2.0, 2.0});
  REQUIRE(s2.length == Approx(2.0).epsilon(1e-15));
  CHECK(redimensionalize(3.0, UnitKind::Energy, s2) == Approx(6.0).epsilon(1e-14));
}

TEST_CASE("potential coefficients round-trip through the dimensionless form") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    PhysicalSystem sys;
    sys.mass = std::exp(oracles::uniform(rng, -2.0, 2.0));
    sys.charge = std::exp(oracles::uniform(rng, -1.0, 1.0)) * (trial % 2 ? 1.0 : -1.0);
    sys.field = std::exp(oracles::uniform(rng, -2.0, 2.0));
    const Scales s = derive_scales(sys);

    RawPotential raw;
    raw.kind = static_cast<PotentialKind>(trial % 3);
    const double q2 = sys.charge * sys.charge;
    raw.a = (raw.kind == PotentialKind::V1) ? q2 : oracles::uniform(rng, -5.0, 5.0);
    raw.b = oracles::uniform(rng, -5.0, 5.0);
    raw.c = oracles::uniform(rng, -5.0, 5.0);
    raw.d = oracles::uniform(rng, -5.0, 5.0);
    raw.e = oracles::uniform(rng, -5.0, 5.0);
    if (raw.kind != PotentialKind::V3) raw.e = 0.0;

    const RawPotential back = redimensionalize_potential(nondimensionalize(raw, s), s);
    CHECK(back.a == Approx(raw.a).margin(1e-14).epsilon(1e-14));
    CHECK(back.b == Approx(raw.b).margin(1e-14).epsilon(1e-14));
    CHECK(back.c == Approx(raw.c).margin(1e-14).epsilon(1e-14));
    CHECK(back.d == Approx(raw.d).margin(1e-14).epsilon(1e-14));
    CHECK(back.e == Approx(raw.e).margin(1e-14).epsilon(1e-14));
  }
}
