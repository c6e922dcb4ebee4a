#include "iontrap/lockmodel.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace iontrap {

double airy_transmission(const OpticalCavity& cavity, double detuning) {
  cavity.validate();
  // Coefficient chosen so T = 1/2 exactly at detuning fsr/(2 finesse),
  // i.e. finesse = fsr / FWHM holds without the large-finesse approximation.
  const double half_width_phase = std::sin(pi / (2.0 * cavity.finesse));
  const double s = std::sin(pi * detuning / cavity.fsr) / half_width_phase;
  return 1.0 / (1.0 + s * s);
}

double hc_error(const OpticalCavity& cavity, double detuning, double polarization_split) {
  cavity.validate();
  const double r = cavity.roundtrip_reflectivity();
  const double phi = 2.0 * pi * detuning / cavity.fsr;
  const double A = (1.0 - r) * (1.0 - r);
  const double B = 2.0 * r;
  const double raw = polarization_split * cavity.input_transmission * std::sin(phi) /
                     (A + B * (1.0 - std::cos(phi)));
  // Analytic extremum at cos(phi*) = B/(A+B).
  const double c_star = B / (A + B);
  const double peak = polarization_split * cavity.input_transmission *
                      std::sqrt(1.0 - c_star * c_star) / (A + B * (1.0 - c_star));
  return raw / peak;
}

namespace {

// Amplitude reflection coefficient of a symmetric lossless cavity.
std::complex<double> reflection_coefficient(double r, double fsr, double detuning) {
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, 2.0 * pi * detuning / fsr));
  return std::sqrt(r) * (phase - 1.0) / (1.0 - r * phase);
}

double pdh_raw(const OpticalCavity& cavity, double detuning, double mod_frequency) {
  const double r = cavity.roundtrip_reflectivity();
  const auto F0 = reflection_coefficient(r, cavity.fsr, detuning);
  const auto Fp = reflection_coefficient(r, cavity.fsr, detuning + mod_frequency);
  const auto Fm = reflection_coefficient(r, cavity.fsr, detuning - mod_frequency);
  return std::imag(F0 * std::conj(Fp) - std::conj(F0) * Fm);
}

double scan_peak_magnitude(const std::function<double(double)>& f, double lo, double hi, int n) {
  double peak = 0.0;
  double at = lo;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double m = std::abs(f(x));
    if (m > peak) {
      peak = m;
      at = x;
    }
  }
  // Golden-section refinement around the coarse maximum.
  const double h = (hi - lo) / n;
  double a = at - h, b = at + h;
  for (int i = 0; i < 60; ++i) {
    const double m1 = a + 0.381966011250105 * (b - a);
    const double m2 = b - 0.381966011250105 * (b - a);
    if (std::abs(f(m1)) < std::abs(f(m2)))
      a = m1;
    else
      b = m2;
  }
  return std::abs(f(0.5 * (a + b)));
}

}  // namespace

double pdh_error(const OpticalCavity& cavity, double detuning, double mod_frequency,
                 double mod_depth) {
  cavity.validate();
  if (mod_frequency <= 0.0) throw std::invalid_argument("pdh_error: mod_frequency must be > 0");
  if (mod_depth <= 0.0 || mod_depth > 1.2)
    throw std::invalid_argument("pdh_error: mod_depth must be in (0, 1.2] rad");
  // First-order sideband model; J0 J1 only scales the raw signal and drops
  // out of the peak normalization, kept for the record.
  const double raw = pdh_raw(cavity, detuning, mod_frequency);
  const double half = 0.5 * cavity.linewidth();
  const double peak = scan_peak_magnitude(
      [&](double d) { return pdh_raw(cavity, d, mod_frequency); }, 0.0,
      mod_frequency + 4.0 * half, 2000);
  // Sign convention: positive slope through resonance.
  double value = raw / peak;
  const double probe = 0.1 * half;
  if (pdh_raw(cavity, probe, mod_frequency) < 0.0) value = -value;
  return value;
}

namespace {

double absorption(const ReferenceProfile& ref, double nu) {
  double a = 0.0;
  const double four_ln2 = 4.0 * std::log(2.0);
  for (const auto& l : ref.lines) {
    const double d = nu - l.center;
    a += l.depth * std::exp(-four_ln2 * d * d / (l.fwhm * l.fwhm));
  }
  return a;
}

}  // namespace

double rb_error(const ReferenceProfile& ref, double laser_offset) {
  ref.validate();
  if (ref.lines.empty()) return 0.0;
  // Diode order chosen so the slope is positive at the lock point.
  const double raw = absorption(ref, laser_offset - ref.aom_shift) - absorption(ref, laser_offset);
  double lo = ref.lines.front().center, hi = ref.lines.front().center, w = 0.0;
  for (const auto& l : ref.lines) {
    lo = std::min(lo, l.center);
    hi = std::max(hi, l.center);
    w = std::max(w, l.fwhm);
  }
  const double peak = scan_peak_magnitude(
      [&](double nu) { return absorption(ref, nu - ref.aom_shift) - absorption(ref, nu); },
      lo - std::abs(ref.aom_shift) - 3.0 * w, hi + std::abs(ref.aom_shift) + 3.0 * w, 4000);
  if (peak <= 0.0) return 0.0;
  return raw / peak;
}

double dither_error(const OpticalCavity& cavity, double detuning) {
  cavity.validate();
  const double h = 1e-3 * cavity.linewidth();
  auto deriv = [&](double d) {
    return (airy_transmission(cavity, d + h) - airy_transmission(cavity, d - h)) / (2.0 * h);
  };
  const double peak =
      scan_peak_magnitude(deriv, 0.0, cavity.linewidth(), 2000);
  // Negative sign gives a positive slope through resonance.
  return -deriv(detuning) / peak;
}

ServoTrace servo_run(const LockPlant& plant, const PiServo& servo, double duration, double dt,
                     std::uint64_t rng_seed, double initial_detuning) {
  servo.validate();
  if (!plant.discriminator) throw std::invalid_argument("servo_run: discriminator required");
  if (duration <= 0.0 || dt <= 0.0) throw std::invalid_argument("servo_run: bad time parameters");
  if (dt * servo.ki >= 0.5)
    throw std::invalid_argument("servo_run: dt*ki must be < 0.5 for discrete stability");

  const long n_steps = static_cast<long>(std::llround(duration / dt));
  ServoTrace trace;
  trace.times.reserve(n_steps);
  trace.error.reserve(n_steps);
  trace.actuator.reserve(n_steps);
  trace.detuning.reserve(n_steps);

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double delta_free = initial_detuning;
  double integrator = 0.0;
  double u = 0.0;

  // Lock-loss watchdog: max |detuning| over successive decades of samples.
  double window_max = 0.0;
  double prev_window_max = -1.0;
  long window_end = 100;

  for (long k = 0; k < n_steps; ++k) {
    const double t = k * dt;
    if (plant.noise_rms > 0.0) delta_free += plant.noise_rms * gauss(rng);
    delta_free += plant.drift * dt;

    const double detuning = delta_free - plant.actuator_gain * u;
    const double e = plant.discriminator(detuning);

    integrator += e * dt;
    double u_new = servo.kp * e + servo.ki * integrator;
    if (u_new > servo.output_max) {
      integrator -= e * dt;  // anti-windup: freeze the integrator at the rail
      u_new = servo.output_max;
    } else if (u_new < servo.output_min) {
      integrator -= e * dt;
      u_new = servo.output_min;
    }
    u = u_new;

    trace.times.push_back(t);
    trace.error.push_back(e);
    trace.actuator.push_back(u);
    trace.detuning.push_back(detuning);

    window_max = std::max(window_max, std::abs(detuning));
    if (k + 1 == window_end) {
      if (prev_window_max > 0.0 && window_max > 10.0 * prev_window_max) {
        trace.lock_lost_time = t;
        return trace;
      }
      prev_window_max = window_max;
      window_max = 0.0;
      window_end *= 10;
    }
  }
  return trace;
}

double narrowed_linewidth(const EcdlFeedbackGeometry& g) {
  g.validate();
  const double ratio = (g.l_path / g.l_ecdl) * (g.finesse_cavity / g.finesse_ecdl);
  return g.delta_nu_ecdl / (g.beta * ratio * ratio);
}

double discriminator_slope(const Discriminator& d, double scale_hz) {
  if (scale_hz <= 0.0) throw std::invalid_argument("discriminator_slope: scale must be > 0");
  const double h = 1e-3 * scale_hz;
  return (d(h) - d(-h)) / (2.0 * h);
}

}  // namespace iontrap
