#include "iontrap/lockmodel.hpp"

#include <cmath>

#include "doctest.h"

using namespace iontrap;

namespace {

OpticalCavity triangular_cavity() { return {200.0, 1e9, 0.03}; }
OpticalCavity doubling_cavity() { return {60.0, 1e9, 0.03}; }

}  // namespace

TEST_CASE("airy transmission line shape") {
  const OpticalCavity c = triangular_cavity();
  CHECK(airy_transmission(c, 0.0) == 1.0);
  // Half maximum exactly at half the FWHM, fsr/(2F) = 2.5 MHz here.
  CHECK(std::abs(airy_transmission(c, c.fsr / (2.0 * c.finesse)) - 0.5) < 1e-12);
  // Antiresonance close to the textbook 1/(1 + (2F/pi)^2).
  const double floor = airy_transmission(c, c.fsr / 2.0);
  CHECK(floor == doctest::Approx(1.0 / (1.0 + std::pow(2.0 * c.finesse / pi, 2))).epsilon(1e-4));

  for (double d : {0.3e6, 1.7e6, 12.0e6, 499.0e6}) {
    CHECK(airy_transmission(c, d) == airy_transmission(c, -d));            // even
    CHECK(airy_transmission(c, d + c.fsr) == doctest::Approx(airy_transmission(c, d)).epsilon(1e-9));
  }
}

TEST_CASE("hc error signal") {
  const OpticalCavity c = triangular_cavity();
  CHECK(hc_error(c, 0.0) == 0.0);
  for (double d : {0.1e6, 1.0e6, 2.5e6, 40.0e6, 499.0e6})
    CHECK(hc_error(c, -d) == doctest::Approx(-hc_error(c, d)).epsilon(1e-13));
  // Positive slope through resonance and unit peak.
  CHECK(hc_error(c, 0.2e6) > 0.0);
  double peak = 0.0;
  for (double d = -c.fsr / 2; d <= c.fsr / 2; d += c.fsr / 4000)
    peak = std::max(peak, std::abs(hc_error(c, d)));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hc extremum location for finesse 60") {
  const OpticalCavity c = doubling_cavity();
  double best_d = 0.0, best = 0.0;
  for (double d = 0.0; d <= c.fsr / 4; d += c.fsr / 200000) {
    const double v = std::abs(hc_error(c, d));
    if (v > best) {
      best = v;
      best_d = d;
    }
  }
  // Extremum sits at half the cavity linewidth (Lorentzian x/(1+x^2) peak).
  const double linewidth = c.fsr / c.finesse;
  CHECK(best_d > 0.3 * linewidth);
  CHECK(best_d < 0.7 * linewidth);
}

TEST_CASE("pdh error signal") {
  const OpticalCavity c = triangular_cavity();
  const double fm = 20e6;
  CHECK(pdh_error(c, 0.0, fm) == 0.0);
  // Sideband zero crossing within half a linewidth of +fm (the exact
  // expression keeps a small carrier-times-far-sideband offset at fm).
  const double w = 0.5 * c.linewidth();
  CHECK(pdh_error(c, fm - w, fm) * pdh_error(c, fm + w, fm) < 0.0);
  for (double d : {0.1e6, 2.0e6, 15.0e6, 21.0e6, 80.0e6})
    CHECK(pdh_error(c, -d, fm) == doctest::Approx(-pdh_error(c, d, fm)).epsilon(1e-13));
  // Positive central slope and capture range of about +-fm: the signal
  // keeps the restoring sign between the carrier and each sideband zero.
  CHECK(pdh_error(c, 0.5e6, fm) > 0.0);
  for (double d = 0.2e6; d < fm - 0.5e6; d += 0.5e6) CHECK(pdh_error(c, d, fm) * 1.0 > -1e-12);
  CHECK_THROWS_AS(pdh_error(c, 0.0, fm, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(pdh_error(c, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("rb reference error") {
  ReferenceProfile ref;
  ref.aom_shift = 400e6;
  ref.lines = {{-500e6, 0.5, 1.3e9}};
  // Symmetric straddle of a single line: zero at center + shift/2.
  CHECK(std::abs(rb_error(ref, -500e6 + 200e6)) < 1e-12);

  // Zero crossing at -300 MHz with negative-to-positive... locate it.
  double lo = -320e6, hi = -280e6;
  const double flo = rb_error(ref, lo);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (rb_error(ref, mid) * flo > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(-300e6).epsilon(1e-6));

  ReferenceProfile bad = ref;
  bad.lines[0].depth = 1.5;
  CHECK_THROWS_AS(rb_error(bad, 0.0), std::invalid_argument);
}

TEST_CASE("dither discriminator is odd with positive slope") {
  const OpticalCavity c = triangular_cavity();
  CHECK(dither_error(c, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(dither_error(c, 0.5e6) > 0.0);
  for (double d : {0.4e6, 2.0e6, 4.9e6})
    CHECK(dither_error(c, -d) == doctest::Approx(-dither_error(c, d)).epsilon(1e-9));
}

TEST_CASE("every discriminator crosses zero with positive slope at resonance") {
  const OpticalCavity c = triangular_cavity();
  ReferenceProfile ref;
  ref.aom_shift = 400e6;
  ref.lines = {{-200e6, 0.5, 1.3e9}};  // zero crossing at 0 for this offset choice
  std::vector<Discriminator> discs = {
      [&](double d) { return hc_error(c, d); },
      [&](double d) { return pdh_error(c, d, 20e6); },
      [&](double d) { return dither_error(c, d); },
      [&](double d) { return rb_error(ref, d); },
  };
  for (const auto& disc : discs) {
    const double w = c.linewidth();
    int sign_changes = 0;
    double prev = disc(-w);
    for (double d = -w; d <= w; d += w / 200) {
      const double v = disc(d);
      if (prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0)) ++sign_changes;
      if (v != 0.0) prev = v;
    }
    CHECK(sign_changes == 1);
    CHECK(discriminator_slope(disc, w) > 0.0);
  }
}

TEST_CASE("servo open loop ramps at the drift rate") {
  LockPlant plant;
  plant.discriminator = [](double) { return 0.0; };
  plant.drift = 1e6;
  PiServo servo;  // kp = ki = 0
  const ServoTrace t = servo_run(plant, servo, 1e-4, 1e-7, 0);
  REQUIRE(!t.times.empty());
  const double end = t.detuning.back();
  CHECK(end == doctest::Approx(1e6 * 1e-4).epsilon(1e-3));
}

TEST_CASE("servo locks from within the capture range") {
  const OpticalCavity c = triangular_cavity();
  LockPlant plant;
  plant.discriminator = [&](double d) { return pdh_error(c, d, 20e6); };
  plant.actuator_gain = 2e6;
  PiServo servo;
  servo.kp = 0.5;
  servo.ki = 1e6;
  const double initial = 1e6;
  const ServoTrace t = servo_run(plant, servo, 2e-4, 1e-8, 0, initial);
  CHECK(!t.lock_lost_time.has_value());
  CHECK(std::abs(t.detuning.back()) < 1e-3 * initial);
}

TEST_CASE("steady-state error under drift matches drift/(ki*slope)") {
  const OpticalCavity c = triangular_cavity();
  LockPlant plant;
  plant.discriminator = [&](double d) { return pdh_error(c, d, 20e6); };
  plant.actuator_gain = 2e6;
  plant.drift = 1e6;
  PiServo servo;
  servo.kp = 0.5;
  servo.ki = 1e6;
  const ServoTrace t = servo_run(plant, servo, 2e-4, 1e-8, 0, 1e6);
  // slope here is the full loop frequency discrimination slope, the
  // normalized discriminator slope times the actuator gain.
  const double slope = discriminator_slope(plant.discriminator, c.linewidth()) * plant.actuator_gain;
  const double predicted = plant.drift / (servo.ki * slope);
  CHECK(t.detuning.back() == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("servo is bitwise reproducible per seed") {
  const OpticalCavity c = triangular_cavity();
  LockPlant plant;
  plant.discriminator = [&](double d) { return pdh_error(c, d, 20e6); };
  plant.actuator_gain = 2e6;
  plant.noise_rms = 1e3;
  PiServo servo;
  servo.kp = 0.5;
  servo.ki = 1e6;
  const ServoTrace a = servo_run(plant, servo, 5e-5, 1e-8, 99, 1e6);
  const ServoTrace b = servo_run(plant, servo, 5e-5, 1e-8, 99, 1e6);
  REQUIRE(a.detuning.size() == b.detuning.size());
  for (std::size_t i = 0; i < a.detuning.size(); ++i) {
    CHECK(a.detuning[i] == b.detuning[i]);
    CHECK(a.actuator[i] == b.actuator[i]);
  }
  const ServoTrace other = servo_run(plant, servo, 5e-5, 1e-8, 100, 1e6);
  CHECK(a.detuning.back() != other.detuning.back());
}

TEST_CASE("servo rejects an unstable discrete configuration") {
  LockPlant plant;
  plant.discriminator = [](double) { return 0.0; };
  PiServo servo;
  servo.ki = 1e8;
  CHECK_THROWS_AS(servo_run(plant, servo, 1e-4, 1e-8, 0), std::invalid_argument);
}

TEST_CASE("anti-windup clamps the actuator") {
  LockPlant plant;
  plant.discriminator = [](double) { return 1.0; };  // error railed high
  PiServo servo;
  servo.kp = 0.5;
  servo.ki = 1e6;
  servo.output_min = -2.0;
  servo.output_max = 2.0;
  const ServoTrace t = servo_run(plant, servo, 1e-4, 1e-8, 0);
  for (double u : t.actuator) CHECK(u <= 2.0);
  // Once the input returns in range the output must leave the rail within
  // a few integrator time constants, which clamping the accumulator
  // guarantees; here we just confirm the rail was reached and held finite.
  CHECK(t.actuator.back() == 2.0);
}

TEST_CASE("narrowed linewidth formula") {
  EcdlFeedbackGeometry g;
  g.delta_nu_ecdl = 1e6;
  g.beta = 1.0;
  g.l_path = 0.05;
  g.l_ecdl = 0.05;
  g.finesse_cavity = 100.0;
  g.finesse_ecdl = 100.0;
  CHECK(narrowed_linewidth(g) == 1e6);  // unit ratios

  EcdlFeedbackGeometry g2 = g;
  g2.finesse_cavity *= 2.0;
  CHECK(narrowed_linewidth(g2) == doctest::Approx(narrowed_linewidth(g) / 4.0).epsilon(1e-15));

  // Homogeneous in the lengths.
  EcdlFeedbackGeometry g3 = g;
  g3.l_path *= 7.5;
  g3.l_ecdl *= 7.5;
  CHECK(narrowed_linewidth(g3) == doctest::Approx(narrowed_linewidth(g)).epsilon(1e-15));

  // A 1 MHz input narrows below 10 kHz once the ratio product reaches 10.
  EcdlFeedbackGeometry g4 = g;
  g4.l_path = 0.15;
  g4.l_ecdl = 0.03;
  g4.finesse_cavity = 200.0;
  g4.finesse_ecdl = 100.0;
  CHECK(narrowed_linewidth(g4) <= 10e3);

  EcdlFeedbackGeometry bad = g;
  bad.l_path = 0.0;
  CHECK_THROWS_AS(narrowed_linewidth(bad), std::invalid_argument);
}

TEST_CASE("cavity reflectivity reproduces the finesse") {
  for (double f : {60.0, 200.0, 2e5}) {
    const OpticalCavity c{f, 1e9, 0.03};
    const double r = c.roundtrip_reflectivity();
    CHECK(pi * std::sqrt(r) / (1.0 - r) == doctest::Approx(f).epsilon(1e-9));
  }
}
