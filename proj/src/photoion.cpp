#include "iontrap/photoion.hpp"

namespace iontrap {

CrossSection total_cross_section(const TwoPhotonAmplitudeSet& amps) {
  amps.validate();
  double sum = 0.0;
  for (const auto& a : amps.amplitudes) sum += std::norm(a.amplitude);
  return {two_photon_sigma_coefficient_cm4 * sum * units::cm4_per_w_to_m4_per_w};
}

double ionization_probability_per_pulse(double intensity, const CrossSection& sigma,
                                        double photon_e, double pulse_duration) {
  sigma.validate();
  if (intensity < 0.0) throw std::invalid_argument("ionization_probability_per_pulse: intensity must be >= 0");
  if (pulse_duration < 0.0) throw std::invalid_argument("ionization_probability_per_pulse: tau must be >= 0");
  if (photon_e <= 0.0) throw std::domain_error("ionization_probability_per_pulse: photon energy must be > 0");
  return intensity * intensity * sigma.sigma_prime / photon_e * pulse_duration;
}

double loading_rate(double p_ion, double density, const InteractionGeometry& geom,
                    double rep_period) {
  geom.validate();
  if (p_ion < 0.0 || density < 0.0)
    throw std::invalid_argument("loading_rate: probability and density must be >= 0");
  if (rep_period <= 0.0) throw std::invalid_argument("loading_rate: rep_period must be > 0");
  const double w0 = geom.focus.waist_radius;
  return p_ion * (density * w0 / (8.0 * rep_period)) * (2.0 * pi * w0 * geom.trap_length);
}

RateReport rate_report(const PulsedLaser& laser, const GaussianFocus& focus,
                       const AtomicVapor& vapor, const CrossSection& sigma,
                       const InteractionGeometry& geom, IntensityConvention convention) {
  RateReport r;
  r.convention = convention;
  r.intensity = peak_intensity(laser, focus, convention);
  r.photon_energy = photon_energy(laser.wavelength);
  r.sigma_prime = sigma.sigma_prime;
  r.p_ion = ionization_probability_per_pulse(r.intensity, sigma, r.photon_energy,
                                             laser.pulse_duration);
  r.density = vapor_density(vapor);
  r.trap_length = geom.trap_length;
  r.waist_radius = geom.focus.waist_radius;
  r.rep_period = laser.rep_period();
  r.rate = loading_rate(r.p_ion, r.density, geom, r.rep_period);
  r.perturbative_warning = r.p_ion > perturbative_validity_threshold;
  r.rayleigh_warning = geom.exceeds_rayleigh_length();
  return r;
}

}  // namespace iontrap
