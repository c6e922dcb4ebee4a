#include "iontrap/physcore.hpp"

namespace iontrap {

IonSpecies sr88_ion() {
  IonSpecies sr;
  sr.name = "88Sr+";
  sr.mass = 87.9056 * constants::atomic_mass_unit;
  sr.charge = constants::elementary_charge;
  sr.transitions = {
      // S1/2 <-> P1/2 cooling line; 1 in 13 decays leaks to D3/2.
      {"S1/2-P1/2 422nm", 422e-9, 7.87e-9, 1.0 / 13.0},
      // S1/2 <-> D5/2 quadrupole shelving line.
      {"S1/2-D5/2 674nm", 674e-9, 1.0 / 3.0, 0.0},
      // D3/2 <-> P1/2 repump.
      {"D3/2-P1/2 1092nm", 1092e-9, 7.87e-9, 0.0},
      // D5/2 <-> P3/2 deshelving line.
      {"D5/2-P3/2 1033nm", 1033e-9, 7e-9, 0.0},
  };
  return sr;
}

double vapor_density(const AtomicVapor& vapor) {
  vapor.validate();
  return vapor.pressure / (constants::boltzmann * vapor.temperature);
}

double peak_intensity(const PulsedLaser& laser, const GaussianFocus& focus,
                      IntensityConvention convention) {
  laser.validate();
  focus.validate();
  double power = laser.average_power;
  if (convention == IntensityConvention::Peak)
    power = laser.pulse_energy() / laser.pulse_duration;
  return 2.0 * power / (pi * focus.waist_radius * focus.waist_radius);
}

double photon_energy(double wavelength) {
  if (wavelength <= 0.0) throw std::domain_error("photon_energy: wavelength must be > 0");
  return constants::planck * constants::speed_of_light / wavelength;
}

}  // namespace iontrap
