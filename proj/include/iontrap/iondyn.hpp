#ifndef IONTRAP_IONDYN_HPP
#define IONTRAP_IONDYN_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "iontrap/trapmodel.hpp"

namespace iontrap {

using Vec3 = std::array<double, 3>;

struct CoolingModel {
  Transition transition;
  double saturation = 0.0;   // s0
  double detuning = 0.0;     // rad/s, negative = red
  Vec3 direction{0.0, 0.0, 1.0};
  // Fraction of time spent on the cycling transition; default 12/13
  // accounts for the D3/2 leak before repumping.
  double duty_factor = 12.0 / 13.0;

  void validate() const {
    transition.validate();
    if (saturation < 0.0) throw std::invalid_argument("CoolingModel: saturation must be >= 0");
    if (duty_factor <= 0.0 || duty_factor > 1.0)
      throw std::invalid_argument("CoolingModel: duty_factor must be in (0,1]");
    const double n2 = direction[0] * direction[0] + direction[1] * direction[1] +
                      direction[2] * direction[2];
    if (std::abs(n2 - 1.0) > 1e-9)
      throw std::invalid_argument("CoolingModel: direction must be a unit vector");
  }
};

struct SimConfig {
  double duration = 0.0;      // s
  double time_step = 0.0;     // s; must resolve the RF cycle by >= 20 steps
  std::uint64_t rng_seed = 0;
  bool recoil_heating = false;
  int sample_stride = 1;      // record every k-th step

  void validate(double rf_frequency) const {
    if (duration <= 0.0) throw std::invalid_argument("SimConfig: duration must be > 0");
    if (time_step <= 0.0) throw std::invalid_argument("SimConfig: time_step must be > 0");
    if (time_step >= 2.0 * pi / (20.0 * rf_frequency))
      throw std::invalid_argument("SimConfig: time_step must resolve the RF cycle by >= 20 steps");
    if (sample_stride < 1) throw std::invalid_argument("SimConfig: sample_stride must be >= 1");
  }
};

struct IonLost {
  double time = 0.0;
  int ion_index = 0;
};

struct Trajectory {
  std::vector<double> times;                    // uniform grid
  std::vector<std::vector<Vec3>> positions;     // [sample][ion]
  std::vector<std::vector<Vec3>> velocities;    // [sample][ion]
  // Secular (RF-cycle-averaged) total energy, one entry per full RF cycle.
  std::vector<double> energy_times;
  std::vector<double> total_energy_series;      // J
  std::optional<IonLost> lost;
};

// Radiation-pressure force of a single red-detuned beam.
// F = hbar k (Gamma/2) duty s0 / (1 + s0 + (2(delta - k.v)/Gamma)^2) along
// the beam direction.
Vec3 doppler_force(const CoolingModel& cooling, const Vec3& velocity);

// Scattering rate entering the recoil model, same saturation denominator.
double scattering_rate(const CoolingModel& cooling, const Vec3& velocity);

// Time-domain integration of n ions in the full time-dependent quadrupole
// field with Coulomb interaction and optional Doppler cooling / recoil.
// Velocity-Verlet with the RF field at the stated times; deterministic per
// rng_seed. A diverging ion ends the run with Trajectory::lost set.
Trajectory simulate(const IonSpecies& species, const TrapGeometry& geom,
                    const TrapDrive& drive, int n_ions,
                    const std::optional<CoolingModel>& cooling, const SimConfig& config,
                    const std::vector<Vec3>& initial_positions = {},
                    const std::vector<Vec3>& initial_velocities = {});

// Frequency of the strongest spectral component below the RF frequency / 2,
// parabolic interpolation on the peak bin. Empty on an all-zero signal.
std::optional<double> spectral_peak(const std::vector<double>& samples, double sample_rate,
                                    double max_frequency);

// Convenience overload for one axis of a trajectory.
std::optional<double> spectral_peak(const Trajectory& traj, int ion, int axis,
                                    double max_frequency);

}  // namespace iontrap

#endif
