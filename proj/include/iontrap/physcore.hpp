#ifndef IONTRAP_PHYSCORE_HPP
#define IONTRAP_PHYSCORE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace iontrap {

// CODATA-2018 values, fixed at compile time.
namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double boltzmann = 1.380649e-23;              // J/K
inline constexpr double planck = 6.62607015e-34;               // J s
inline constexpr double planck_reduced = 1.054571817e-34;      // J s
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double coulomb_constant =
    1.0 / (4.0 * 3.14159265358979323846 * vacuum_permittivity);
}  // namespace constants

inline constexpr double pi = 3.14159265358979323846;

// Unit conversions. Everything inside the library is SI; these are used
// only at the CLI/config boundary and in tests.
namespace units {
inline constexpr double torr_to_pa = 133.322368421052632;  // 101325/760
inline constexpr double pa_to_torr = 1.0 / torr_to_pa;
inline constexpr double nm_to_m = 1e-9;
inline constexpr double um_to_m = 1e-6;
inline constexpr double mm_to_m = 1e-3;
// Lab convention: peak-to-peak voltage to zero-to-peak amplitude.
inline constexpr double vpp_to_amplitude(double vpp) { return 0.5 * vpp; }
inline constexpr double cm4_per_w_to_m4_per_w = 1e-8;
}  // namespace units

struct Transition {
  std::string label;
  double wavelength = 0.0;     // m
  double lifetime = 0.0;       // s (upper-state)
  double branching_loss = 0.0; // fraction of decays leaving the cycling manifold

  void validate() const {
    if (wavelength <= 0.0) throw std::invalid_argument("Transition: wavelength must be > 0");
    if (lifetime <= 0.0) throw std::invalid_argument("Transition: lifetime must be > 0");
    if (branching_loss < 0.0 || branching_loss >= 1.0)
      throw std::invalid_argument("Transition: branching_loss must be in [0,1)");
  }
  double linewidth() const { return 1.0 / lifetime; }  // Gamma, rad/s
  double wavenumber() const { return 2.0 * pi / wavelength; }
};

struct IonSpecies {
  std::string name;
  double mass = 0.0;    // kg
  double charge = 0.0;  // C, positive integer multiple of e

  void validate() const {
    if (mass <= 0.0) throw std::invalid_argument("IonSpecies: mass must be > 0");
    double n = charge / constants::elementary_charge;
    if (n < 0.5 || std::abs(n - static_cast<long long>(n + 0.5)) > 1e-6)
      throw std::invalid_argument("IonSpecies: charge must be a positive multiple of e");
  }

  std::vector<Transition> transitions;
};

// 88Sr+ with the transitions used by the cooling and shelving chain.
// The 422 nm lifetime is stored as 7.87 ns; the source text's literal
// "7.87 sec" is incompatible with a dipole-allowed cooling line.
IonSpecies sr88_ion();

struct PulsedLaser {
  double wavelength = 0.0;      // m
  double average_power = 0.0;   // W
  double rep_rate = 0.0;        // Hz
  double pulse_duration = 0.0;  // s

  void validate() const {
    if (wavelength <= 0.0) throw std::invalid_argument("PulsedLaser: wavelength must be > 0");
    if (average_power < 0.0) throw std::invalid_argument("PulsedLaser: average_power must be >= 0");
    if (rep_rate <= 0.0) throw std::invalid_argument("PulsedLaser: rep_rate must be > 0");
    if (pulse_duration <= 0.0) throw std::invalid_argument("PulsedLaser: pulse_duration must be > 0");
    if (pulse_duration >= 1.0 / rep_rate)
      throw std::invalid_argument("PulsedLaser: pulse_duration must be < 1/rep_rate");
  }
  double rep_period() const { return 1.0 / rep_rate; }
  double pulse_energy() const { return average_power / rep_rate; }
};

struct GaussianFocus {
  double waist_radius = 0.0;  // m (w0)
  double wavelength = 0.0;    // m

  void validate() const {
    if (waist_radius <= 0.0) throw std::invalid_argument("GaussianFocus: waist_radius must be > 0");
    if (wavelength <= 0.0) throw std::invalid_argument("GaussianFocus: wavelength must be > 0");
  }
  double rayleigh_length() const { return pi * waist_radius * waist_radius / wavelength; }
};

struct AtomicVapor {
  double pressure = 0.0;     // Pa
  double temperature = 0.0;  // K

  void validate() const {
    if (pressure < 0.0) throw std::invalid_argument("AtomicVapor: pressure must be >= 0");
    if (temperature <= 0.0) throw std::invalid_argument("AtomicVapor: temperature must be > 0");
  }
};

// Ideal-gas number density, p/(kB T).
double vapor_density(const AtomicVapor& vapor);

enum class IntensityConvention { Peak, TimeAveraged };

// On-axis intensity at the waist of a Gaussian beam carrying either the
// per-pulse peak power (Peak) or the average power (TimeAveraged).
// Both include the on-axis factor 2P/(pi w0^2).
double peak_intensity(const PulsedLaser& laser, const GaussianFocus& focus,
                      IntensityConvention convention);

// h c / lambda
double photon_energy(double wavelength);

}  // namespace iontrap

#endif
