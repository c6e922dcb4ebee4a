#include "iontrap/iondyn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace iontrap {

namespace {

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double lorentzian_denominator(const CoolingModel& c, const Vec3& v) {
  const double gamma = c.transition.linewidth();
  const double k = c.transition.wavenumber();
  const double doppler = k * dot(c.direction, v);
  const double x = 2.0 * (c.detuning - doppler) / gamma;
  return 1.0 + c.saturation + x * x;
}

}  // namespace

Vec3 doppler_force(const CoolingModel& cooling, const Vec3& velocity) {
  cooling.validate();
  const double gamma = cooling.transition.linewidth();
  const double k = cooling.transition.wavenumber();
  const double magnitude = constants::planck_reduced * k * (gamma / 2.0) *
                           cooling.duty_factor * cooling.saturation /
                           lorentzian_denominator(cooling, velocity);
  return {magnitude * cooling.direction[0], magnitude * cooling.direction[1],
          magnitude * cooling.direction[2]};
}

double scattering_rate(const CoolingModel& cooling, const Vec3& velocity) {
  cooling.validate();
  const double gamma = cooling.transition.linewidth();
  return (gamma / 2.0) * cooling.duty_factor * cooling.saturation /
         lorentzian_denominator(cooling, velocity);
}

namespace {

struct Forces {
  const IonSpecies& species;
  const MathieuParams& mathieu;
  double rf_frequency;
  const std::optional<CoolingModel>& cooling;

  // Trap + Coulomb acceleration; drag is added separately because it
  // depends on velocity.
  void conservative(const std::vector<Vec3>& pos, double t, std::vector<Vec3>& acc) const {
    const int n = static_cast<int>(pos.size());
    const double omega2_4 = rf_frequency * rf_frequency / 4.0;
    const double cos_rf = std::cos(rf_frequency * t);
    for (int i = 0; i < n; ++i)
      for (int ax = 0; ax < 3; ++ax)
        acc[i][ax] = -omega2_4 * (mathieu.a[ax] - 2.0 * mathieu.q[ax] * cos_rf) * pos[i][ax];
    const double coulomb =
        constants::coulomb_constant * species.charge * species.charge / species.mass;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Vec3 d{pos[i][0] - pos[j][0], pos[i][1] - pos[j][1], pos[i][2] - pos[j][2]};
        const double r2 = dot(d, d);
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        for (int ax = 0; ax < 3; ++ax) {
          const double f = coulomb * d[ax] * inv_r3;
          acc[i][ax] += f;
          acc[j][ax] -= f;
        }
      }
    }
  }

  void add_drag(const std::vector<Vec3>& vel, std::vector<Vec3>& acc) const {
    if (!cooling) return;
    for (std::size_t i = 0; i < vel.size(); ++i) {
      const Vec3 f = doppler_force(*cooling, vel[i]);
      for (int ax = 0; ax < 3; ++ax) acc[i][ax] += f[ax] / species.mass;
    }
  }
};

}  // namespace

Trajectory simulate(const IonSpecies& species, const TrapGeometry& geom,
                    const TrapDrive& drive, int n_ions,
                    const std::optional<CoolingModel>& cooling, const SimConfig& config,
                    const std::vector<Vec3>& initial_positions,
                    const std::vector<Vec3>& initial_velocities) {
  species.validate();
  geom.validate();
  drive.validate();
  if (n_ions < 1) throw std::invalid_argument("simulate: n_ions must be >= 1");
  config.validate(drive.rf_frequency);
  if (cooling) cooling->validate();
  if (!initial_positions.empty() && static_cast<int>(initial_positions.size()) != n_ions)
    throw std::invalid_argument("simulate: initial_positions size mismatch");
  if (!initial_velocities.empty() && static_cast<int>(initial_velocities.size()) != n_ions)
    throw std::invalid_argument("simulate: initial_velocities size mismatch");

  const MathieuParams mathieu = mathieu_params(species, geom, drive);
  const auto secular = secular_frequencies(mathieu, drive.rf_frequency);
  Forces forces{species, mathieu, drive.rf_frequency, cooling};

  const double dt = config.time_step;
  const long n_steps = static_cast<long>(std::llround(config.duration / dt));
  const double escape_radius = 10.0 * geom.radial_scale;

  std::vector<Vec3> pos(n_ions, Vec3{0, 0, 0});
  std::vector<Vec3> vel(n_ions, Vec3{0, 0, 0});
  if (!initial_positions.empty()) pos = initial_positions;
  if (!initial_velocities.empty()) vel = initial_velocities;

  std::vector<Vec3> acc(n_ions), acc_new(n_ions), vel_star(n_ions);

  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const double recoil_speed =
      cooling ? constants::planck_reduced * cooling->transition.wavenumber() / species.mass : 0.0;

  Trajectory traj;
  const long n_samples = n_steps / config.sample_stride + 1;
  traj.times.reserve(n_samples);
  traj.positions.reserve(n_samples);
  traj.velocities.reserve(n_samples);

  // RF-cycle accumulators for the secular energy series.
  const long steps_per_cycle =
      std::max<long>(1, std::llround(2.0 * pi / (drive.rf_frequency * dt)));
  std::vector<Vec3> pos_accum(n_ions, Vec3{0, 0, 0});
  std::vector<Vec3> vel_accum(n_ions, Vec3{0, 0, 0});
  long cycle_count = 0;

  auto record_sample = [&](long step) {
    traj.times.push_back(step * dt);
    traj.positions.push_back(pos);
    traj.velocities.push_back(vel);
  };

  auto flush_cycle = [&](long step) {
    const double inv = 1.0 / steps_per_cycle;
    double energy = 0.0;
    for (int i = 0; i < n_ions; ++i) {
      Vec3 x{pos_accum[i][0] * inv, pos_accum[i][1] * inv, pos_accum[i][2] * inv};
      Vec3 v{vel_accum[i][0] * inv, vel_accum[i][1] * inv, vel_accum[i][2] * inv};
      energy += 0.5 * species.mass * dot(v, v);
      for (int ax = 0; ax < 3; ++ax) {
        const double w = secular[ax].omega;
        energy += 0.5 * species.mass * w * w * x[ax] * x[ax];
      }
      for (int j = 0; j < i; ++j) {
        Vec3 xj{pos_accum[j][0] * inv, pos_accum[j][1] * inv, pos_accum[j][2] * inv};
        Vec3 d{x[0] - xj[0], x[1] - xj[1], x[2] - xj[2]};
        energy += constants::coulomb_constant * species.charge * species.charge /
                  std::sqrt(dot(d, d));
      }
      pos_accum[i] = {0, 0, 0};
      vel_accum[i] = {0, 0, 0};
    }
    traj.energy_times.push_back(step * dt);
    traj.total_energy_series.push_back(energy);
  };

  forces.conservative(pos, 0.0, acc);
  forces.add_drag(vel, acc);
  record_sample(0);

  for (long step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    for (int i = 0; i < n_ions; ++i)
      for (int ax = 0; ax < 3; ++ax) {
        pos[i][ax] += vel[i][ax] * dt + 0.5 * acc[i][ax] * dt * dt;
        vel_star[i][ax] = vel[i][ax] + acc[i][ax] * dt;
      }
    forces.conservative(pos, t + dt, acc_new);
    forces.add_drag(vel_star, acc_new);
    for (int i = 0; i < n_ions; ++i)
      for (int ax = 0; ax < 3; ++ax)
        vel[i][ax] += 0.5 * (acc[i][ax] + acc_new[i][ax]) * dt;

    if (cooling && config.recoil_heating) {
      for (int i = 0; i < n_ions; ++i) {
        const double rate = scattering_rate(*cooling, vel[i]);
        std::poisson_distribution<int> n_scatter(rate * dt);
        const int kicks = n_scatter(rng);
        for (int k = 0; k < kicks; ++k) {
          Vec3 dir{unit_normal(rng), unit_normal(rng), unit_normal(rng)};
          const double norm = std::sqrt(dot(dir, dir));
          if (norm > 0.0)
            for (int ax = 0; ax < 3; ++ax) vel[i][ax] += recoil_speed * dir[ax] / norm;
        }
      }
    }
    acc.swap(acc_new);

    for (int i = 0; i < n_ions; ++i) {
      const double r2 = dot(pos[i], pos[i]);
      if (!std::isfinite(r2)) throw std::runtime_error("simulate: trajectory diverged (non-finite)");
      if (r2 > escape_radius * escape_radius) {
        traj.lost = IonLost{(step + 1) * dt, i};
        record_sample(step + 1);
        return traj;
      }
      for (int ax = 0; ax < 3; ++ax) {
        pos_accum[i][ax] += pos[i][ax];
        vel_accum[i][ax] += vel[i][ax];
      }
    }
    ++cycle_count;
    if (cycle_count == steps_per_cycle) {
      flush_cycle(step + 1);
      cycle_count = 0;
    }
    if ((step + 1) % config.sample_stride == 0) record_sample(step + 1);
  }
  return traj;
}

namespace {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

std::optional<double> spectral_peak(const std::vector<double>& samples, double sample_rate,
                                    double max_frequency) {
  if (samples.size() < 1024)
    throw std::invalid_argument("spectral_peak: need at least 1024 samples");
  if (sample_rate <= 0.0) throw std::invalid_argument("spectral_peak: sample_rate must be > 0");

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());

  std::size_t n = 1;
  while (n < samples.size()) n <<= 1;
  std::vector<std::complex<double>> x(n, 0.0);
  const std::size_t m = samples.size();
  for (std::size_t i = 0; i < m; ++i) {
    // Hann window sharpens the interpolated peak.
    const double w = 0.5 * (1.0 - std::cos(2.0 * pi * i / (m - 1)));
    x[i] = (samples[i] - mean) * w;
  }
  fft(x);

  const double bin_hz = sample_rate / static_cast<double>(n);
  const double max_hz = max_frequency / (2.0 * pi);
  std::size_t k_max = std::min<std::size_t>(n / 2, static_cast<std::size_t>(max_hz / bin_hz));
  std::size_t best = 0;
  double best_mag = 0.0;
  for (std::size_t k = 1; k < k_max; ++k) {
    const double mag = std::abs(x[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  if (best == 0 || best_mag <= 0.0) return std::nullopt;

  double k_interp = static_cast<double>(best);
  if (best + 1 < n / 2 && best >= 1) {
    const double ym = std::abs(x[best - 1]);
    const double y0 = best_mag;
    const double yp = std::abs(x[best + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom != 0.0) k_interp += 0.5 * (ym - yp) / denom;
  }
  return 2.0 * pi * k_interp * bin_hz;
}

std::optional<double> spectral_peak(const Trajectory& traj, int ion, int axis,
                                    double max_frequency) {
  if (traj.times.size() < 2) throw std::invalid_argument("spectral_peak: trajectory too short");
  std::vector<double> samples;
  samples.reserve(traj.positions.size());
  for (const auto& frame : traj.positions) samples.push_back(frame.at(ion)[axis]);
  const double sample_rate = 1.0 / (traj.times[1] - traj.times[0]);
  return spectral_peak(samples, sample_rate, max_frequency);
}

}  // namespace iontrap
