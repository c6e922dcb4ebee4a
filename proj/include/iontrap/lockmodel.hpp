#ifndef IONTRAP_LOCKMODEL_HPP
#define IONTRAP_LOCKMODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "iontrap/physcore.hpp"

namespace iontrap {

struct OpticalCavity {
  double finesse = 0.0;             // FSR / FWHM
  double fsr = 0.0;                 // Hz
  double input_transmission = 0.0;  // power fraction of the input coupler

  void validate() const {
    if (finesse <= 1.0) throw std::invalid_argument("OpticalCavity: finesse must be > 1");
    if (fsr <= 0.0) throw std::invalid_argument("OpticalCavity: fsr must be > 0");
    if (input_transmission <= 0.0 || input_transmission >= 1.0)
      throw std::invalid_argument("OpticalCavity: input_transmission must be in (0,1)");
  }
  double linewidth() const { return fsr / finesse; }  // FWHM, Hz
  // Effective round-trip amplitude reflectivity reproducing the finesse:
  // F = pi sqrt(r) / (1 - r).
  double roundtrip_reflectivity() const {
    const double s = (-pi + std::sqrt(pi * pi + 4.0 * finesse * finesse)) / (2.0 * finesse);
    return s * s;
  }
};

struct PiServo {
  double kp = 0.0;  // dimensionless
  double ki = 0.0;  // 1/s
  double output_min = -1e18;
  double output_max = 1e18;

  void validate() const {
    if (ki < 0.0) throw std::invalid_argument("PiServo: ki must be >= 0");
    if (output_min >= output_max) throw std::invalid_argument("PiServo: bad output limits");
  }
};

struct GaussianLine {
  double center = 0.0;  // Hz offset from the target transition
  double depth = 0.0;   // peak absorption, (0,1]
  double fwhm = 0.0;    // Hz
};

struct ReferenceProfile {
  std::vector<GaussianLine> lines;
  double aom_shift = 0.0;  // Hz between the two probe beams

  void validate() const {
    for (const auto& l : lines) {
      if (l.depth <= 0.0 || l.depth > 1.0)
        throw std::invalid_argument("ReferenceProfile: depth must be in (0,1]");
      if (l.fwhm <= 0.0) throw std::invalid_argument("ReferenceProfile: fwhm must be > 0");
    }
  }
};

struct ErrorTrace {
  std::vector<double> detunings;  // Hz, strictly increasing
  std::vector<double> signal;     // normalized
};

struct EcdlFeedbackGeometry {
  double delta_nu_ecdl = 0.0;   // Hz, free-running linewidth
  double beta = 1.0;            // feedback strength
  double l_path = 0.0;          // m, feedback path length
  double l_ecdl = 0.0;          // m, diode cavity length
  double finesse_cavity = 0.0;  // narrowing cavity
  double finesse_ecdl = 0.0;    // diode cavity

  void validate() const {
    if (delta_nu_ecdl <= 0.0 || beta <= 0.0 || l_path <= 0.0 || l_ecdl <= 0.0 ||
        finesse_cavity <= 0.0 || finesse_ecdl <= 0.0)
      throw std::invalid_argument("EcdlFeedbackGeometry: all fields must be > 0");
  }
};

// Airy transmission, T(0) = 1, normalized so the half maximum sits exactly
// at detuning fsr / (2 finesse).
double airy_transmission(const OpticalCavity& cavity, double detuning);

// Haensch-Couillaud polarization analyzer difference signal, peak-normalized,
// positive slope at resonance.
double hc_error(const OpticalCavity& cavity, double detuning, double polarization_split = 1.0);

// Pound-Drever-Hall reflection error with first-order sidebands only,
// peak-normalized, positive slope at resonance.
double pdh_error(const OpticalCavity& cavity, double detuning, double mod_frequency,
                 double mod_depth = 1.0);

// Two-beam absorption difference against a Gaussian reference profile.
double rb_error(const ReferenceProfile& ref, double laser_offset);

// Symmetry-derivative discriminator for the dither lock: numerically
// differentiated airy_transmission, peak-normalized.
double dither_error(const OpticalCavity& cavity, double detuning);

using Discriminator = std::function<double(double)>;

struct LockPlant {
  Discriminator discriminator;  // normalized error vs detuning (Hz)
  double drift = 0.0;           // Hz/s
  double noise_rms = 0.0;       // Hz per step, white Gaussian
  // Frequency correction applied per unit of servo output.
  double actuator_gain = 1.0;   // Hz per actuator unit
};

struct ServoTrace {
  std::vector<double> times;     // s
  std::vector<double> error;     // normalized discriminator output
  std::vector<double> actuator;  // servo output, actuator units
  std::vector<double> detuning;  // Hz, true detuning
  std::optional<double> lock_lost_time;
};

// Closed loop: free-running detuning accumulates drift + noise; the servo
// output (through actuator_gain) subtracts from it. Deterministic per seed.
ServoTrace servo_run(const LockPlant& plant, const PiServo& servo, double duration, double dt,
                     std::uint64_t rng_seed, double initial_detuning = 0.0);

// Linewidth after optical feedback narrowing:
// dnu = dnu_ecdl / (beta * (L_p/L_ecdl * F_cav/F_ecdl)^2).
double narrowed_linewidth(const EcdlFeedbackGeometry& g);

// Central slope of a discriminator (normalized units per Hz), central
// difference over a small fraction of the cavity linewidth.
double discriminator_slope(const Discriminator& d, double scale_hz);

}  // namespace iontrap

#endif
