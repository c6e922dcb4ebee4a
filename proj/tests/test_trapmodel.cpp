#include "iontrap/trapmodel.hpp"

#include <random>

#include "doctest.h"

using namespace iontrap;

namespace {

TrapGeometry linear_geom() { return {TrapKind::Linear, 0.75e-3, 3e-3, 0.3}; }

TrapDrive drive_150v() {
  TrapDrive d;
  d.rf_amplitude = 150.0;
  d.rf_frequency = 2.0 * pi * 7e6;
  d.dc_endcap = 50.0;
  return d;
}

// Locate the first a=0 instability boundary by bisection on the monodromy
// verdict; used both as the oracle for fixed q checks and directly.
double boundary_q(int steps = 2000) {
  double lo = 0.5, hi = 1.2;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mathieu_stable(0.0, mid, steps))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("mathieu_params zero drive") {
  TrapDrive d;
  d.rf_frequency = 2.0 * pi * 7e6;
  const MathieuParams p = mathieu_params(sr88_ion(), linear_geom(), d);
  for (int ax = 0; ax < 3; ++ax) {
    CHECK(p.a[ax] == 0.0);
    CHECK(p.q[ax] == 0.0);
  }
}

TEST_CASE("mathieu_params linear operating point") {
  const IonSpecies sr = sr88_ion();
  const MathieuParams p = mathieu_params(sr, linear_geom(), drive_150v());

  // Hand evaluation of 2QV/(m Omega^2 R^2).
  const double omega = 2.0 * pi * 7e6;
  const double q_hand = 2.0 * sr.charge * 150.0 / (sr.mass * omega * omega * 0.75e-3 * 0.75e-3);
  CHECK(p.q[0] == doctest::Approx(q_hand).epsilon(1e-13));
  CHECK(p.q[0] == doctest::Approx(0.30).epsilon(0.04));
  CHECK(p.q[1] == -p.q[0]);
  CHECK(p.q[2] == 0.0);

  const double az_hand = 8.0 * 0.3 * sr.charge * 50.0 / (sr.mass * omega * omega * 3e-3 * 3e-3);
  CHECK(p.a[2] == doctest::Approx(az_hand).epsilon(1e-13));

  TrapDrive doubled = drive_150v();
  doubled.rf_amplitude *= 2.0;
  const MathieuParams p2 = mathieu_params(sr, linear_geom(), doubled);
  CHECK(p2.q[0] == doctest::Approx(2.0 * p.q[0]).epsilon(1e-14));
  CHECK(p2.a[2] == p.a[2]);
}

TEST_CASE("Laplace constraint on random inputs") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uv(0.0, 500.0), uu(-100.0, 100.0);
  std::uniform_real_distribution<double> ur(1e-4, 1e-2), uk(0.05, 1.0);
  const IonSpecies sr = sr88_ion();
  for (int i = 0; i < 200; ++i) {
    TrapGeometry g{i % 2 ? TrapKind::Linear : TrapKind::QuadrupoleRing, ur(rng), ur(rng), uk(rng)};
    TrapDrive d;
    d.rf_amplitude = uv(rng);
    d.rf_frequency = 2.0 * pi * 7e6;
    d.dc_endcap = uu(rng);
    const MathieuParams p = mathieu_params(sr, g, d);
    const double scale = std::abs(p.a[0]) + std::abs(p.a[1]) + std::abs(p.a[2]) + 1e-30;
    CHECK(std::abs(p.a[0] + p.a[1] + p.a[2]) / scale < 1e-12);
  }
}

TEST_CASE("floquet stability verdicts") {
  CHECK(mathieu_stable(0.0, 0.0));   // free particle, |trace| = 2
  CHECK(mathieu_stable(0.0, 0.3));
  CHECK(!mathieu_stable(0.0, 0.95));
  CHECK_THROWS_AS(mathieu_stable(0.0, 0.3, 2), std::invalid_argument);
}

TEST_CASE("first instability boundary near 0.908") {
  const double q_star = boundary_q();
  CHECK(q_star > 0.90);
  CHECK(q_star < 0.92);
  // Step-size robustness: quadrupling the resolution moves the boundary
  // by less than 1e-6 (Richardson-style consistency of the RK4 scheme).
  CHECK(std::abs(q_star - boundary_q(8000)) < 1e-6);
}

TEST_CASE("floquet agrees with the pseudopotential domain") {
  for (double q = 0.0; q <= 0.4; q += 0.02) CHECK(mathieu_stable(0.0, q));
}

TEST_CASE("secular_frequencies") {
  MathieuParams p;
  auto s0 = secular_frequencies(p, 2.0 * pi * 7e6);
  CHECK(s0[0].omega == 0.0);
  CHECK(!s0[0].dc_unstable);

  p.q = {0.30, -0.30, 0.0};
  auto s = secular_frequencies(p, 2.0 * pi * 7e6);
  CHECK(s[0].omega / (2.0 * pi) == doctest::Approx(3.5e6 * std::sqrt(0.045)).epsilon(1e-13));
  CHECK(s[0].omega / (2.0 * pi) == doctest::Approx(742e3).epsilon(1e-2));

  MathieuParams dc;
  dc.a = {0.01, 0.0, 0.0};
  auto sd = secular_frequencies(dc, 2.0 * pi * 7e6);
  CHECK(sd[0].omega == doctest::Approx(pi * 7e6 * 0.1).epsilon(1e-13));

  MathieuParams unstable;
  unstable.a = {-0.01, 0.0, 0.01};
  auto su = secular_frequencies(unstable, 2.0 * pi * 7e6);
  CHECK(su[0].dc_unstable);
  CHECK(su[0].omega == 0.0);

  CHECK_THROWS_AS(secular_frequencies(p, 0.0), std::invalid_argument);
}

TEST_CASE("trap_depth") {
  const IonSpecies sr = sr88_ion();
  const MathieuParams p = mathieu_params(sr, linear_geom(), drive_150v());
  const TrapDepth d = trap_depth(p, drive_150v(), sr, linear_geom());
  // Radial: q V Q / 8, about 5.7 eV at this operating point.
  CHECK(d.joules[0] / constants::elementary_charge ==
        doctest::Approx(p.q[0] * 150.0 / 8.0).epsilon(1e-13));
  CHECK(d.joules[0] / constants::elementary_charge == doctest::Approx(5.67).epsilon(1e-2));
  CHECK(d.kelvin[0] == doctest::Approx(d.joules[0] / constants::boltzmann).epsilon(1e-14));

  TrapDrive off = drive_150v();
  off.rf_amplitude = 0.0;
  off.dc_endcap = 0.0;
  const MathieuParams p0 = mathieu_params(sr, linear_geom(), off);
  const TrapDepth d0 = trap_depth(p0, off, sr, linear_geom());
  CHECK(d0.joules[0] == 0.0);
  CHECK(d0.joules[2] == 0.0);

  // Depth scales as V^2 at fixed geometry and Omega (q is linear in V).
  TrapDrive doubled = drive_150v();
  doubled.rf_amplitude *= 2.0;
  const TrapDepth d2 =
      trap_depth(mathieu_params(sr, linear_geom(), doubled), doubled, sr, linear_geom());
  CHECK(d2.joules[0] == doctest::Approx(4.0 * d.joules[0]).epsilon(1e-13));
}

TEST_CASE("chain equilibrium small n analytic") {
  auto u1 = chain_equilibrium_dimensionless(1);
  REQUIRE(u1.size() == 1);
  CHECK(u1[0] == 0.0);

  auto u2 = chain_equilibrium_dimensionless(2);
  const double x2 = std::cbrt(0.25);  // (1/2)^(2/3)
  CHECK(u2[0] == doctest::Approx(-x2).epsilon(1e-9));
  CHECK(u2[1] == doctest::Approx(x2).epsilon(1e-9));

  auto u3 = chain_equilibrium_dimensionless(3);
  const double x3 = std::cbrt(1.25);  // (5/4)^(1/3)
  CHECK(u3[0] == doctest::Approx(-x3).epsilon(1e-9));
  CHECK(std::abs(u3[1]) < 1e-9);
  CHECK(u3[2] == doctest::Approx(x3).epsilon(1e-9));

  CHECK_THROWS_AS(chain_equilibrium_dimensionless(0), std::invalid_argument);
}

TEST_CASE("chain equilibrium structure for larger n") {
  for (int n : {4, 7, 10, 20}) {
    auto u = chain_equilibrium_dimensionless(n);
    REQUIRE(static_cast<int>(u.size()) == n);
    for (int i = 1; i < n; ++i) CHECK(u[i] > u[i - 1]);
    // Antisymmetric about the centre.
    for (int i = 0; i < n; ++i) CHECK(u[i] == doctest::Approx(-u[n - 1 - i]).epsilon(1e-9));
    // Spacing shrinks toward the centre.
    for (int i = 1; i + 1 < n; ++i) {
      const double left = u[i] - u[i - 1];
      const double right = u[i + 1] - u[i];
      if (i < n / 2)
        CHECK(left > right);
      else if (i > (n - 1) - n / 2)
        CHECK(left < right);
    }
  }
}

TEST_CASE("chain equilibrium in physical units") {
  const IonSpecies sr = sr88_ion();
  const double wz = 2.0 * pi * 100e3;
  const IonChain chain = chain_equilibrium(3, sr, wz);
  CHECK(chain.residual < 1e-12);
  const double ell_hand = std::cbrt(
      sr.charge * sr.charge / (4.0 * pi * constants::vacuum_permittivity * sr.mass * wz * wz));
  CHECK(chain.length_scale == doctest::Approx(ell_hand).epsilon(1e-13));
  CHECK(chain.positions[2] == doctest::Approx(std::cbrt(1.25) * ell_hand).epsilon(1e-9));
  CHECK_THROWS_AS(chain_equilibrium(3, sr, 0.0), std::invalid_argument);
}
