#ifndef IONTRAP_PHOTOION_HPP
#define IONTRAP_PHOTOION_HPP

#include <complex>
#include <vector>

#include "iontrap/physcore.hpp"

namespace iontrap {

// Two-photon transition amplitude to a final state of total angular
// momentum J, in atomic units. Linearly polarized light reaches J = 0
// and J = 2 only.
struct TwoPhotonAmplitude {
  int total_angular_momentum = 0;
  std::complex<double> amplitude;  // atomic units
};

struct TwoPhotonAmplitudeSet {
  std::vector<TwoPhotonAmplitude> amplitudes;

  void validate() const {
    for (const auto& a : amplitudes)
      if (a.total_angular_momentum != 0 && a.total_angular_momentum != 2)
        throw std::invalid_argument(
            "TwoPhotonAmplitudeSet: J must be 0 or 2 for linear polarization");
  }
};

struct CrossSection {
  double sigma_prime = 0.0;  // m^4/W, generalized two-photon cross-section

  void validate() const {
    if (sigma_prime < 0.0) throw std::invalid_argument("CrossSection: sigma_prime must be >= 0");
  }
};

// Conversion constant from summed |T|^2 in atomic units to cm^4/W.
inline constexpr double two_photon_sigma_coefficient_cm4 = 5.7466e-35;

struct InteractionGeometry {
  double trap_length = 0.0;  // m, length of the trapping volume along the beam
  GaussianFocus focus;

  void validate() const {
    if (trap_length <= 0.0) throw std::invalid_argument("InteractionGeometry: trap_length must be > 0");
    focus.validate();
  }
  // The volume-averaged rate formula assumes the focus stays collimated
  // over the trap; callers should warn when this is violated.
  bool exceeds_rayleigh_length() const { return trap_length > focus.rayleigh_length(); }
};

// sigma' = 5.7466e-35 * sum_j |T_j|^2 (cm^4/W), returned in m^4/W.
CrossSection total_cross_section(const TwoPhotonAmplitudeSet& amps);

// P_ion = (I^2 sigma' / E_photon) * tau. Quadratic in intensity. The
// result is not clamped; perturbative_validity_threshold marks where the
// lowest-order treatment stops being trustworthy.
inline constexpr double perturbative_validity_threshold = 0.1;
double ionization_probability_per_pulse(double intensity, const CrossSection& sigma,
                                        double photon_e, double pulse_duration);

// R_ion = P_ion * (n0 w0 / 8T) * (2 pi w0 L), the thermal-trajectory
// volume average over the focal column.
double loading_rate(double p_ion, double density, const InteractionGeometry& geom,
                    double rep_period);

struct RateReport {
  IntensityConvention convention = IntensityConvention::Peak;
  double intensity = 0.0;        // W/m^2
  double photon_energy = 0.0;    // J
  double sigma_prime = 0.0;      // m^4/W
  double p_ion = 0.0;            // per pulse
  double density = 0.0;          // m^-3
  double trap_length = 0.0;      // m
  double waist_radius = 0.0;     // m
  double rep_period = 0.0;       // s
  double rate = 0.0;             // s^-1
  bool perturbative_warning = false;
  bool rayleigh_warning = false;
};

// Full rate chain with every intermediate exposed.
RateReport rate_report(const PulsedLaser& laser, const GaussianFocus& focus,
                       const AtomicVapor& vapor, const CrossSection& sigma,
                       const InteractionGeometry& geom, IntensityConvention convention);

}  // namespace iontrap

#endif
