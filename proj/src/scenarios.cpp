#include "iontrap/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "iontrap/iondyn.hpp"
#include "iontrap/lockmodel.hpp"
#include "iontrap/photoion.hpp"
#include "iontrap/trapmodel.hpp"

namespace iontrap {

namespace {

IonSpecies read_species(ParamReader& p) {
  const std::string name = p.text("species", "sr88");
  if (name != "sr88") p.add_error("key 'species': only 'sr88' is available");
  return sr88_ion();
}

struct TrapSetup {
  TrapGeometry geom;
  TrapDrive drive;
};

TrapSetup read_trap(ParamReader& p) {
  TrapSetup t;
  const std::string kind = p.text("trap", "linear");
  if (kind == "linear") {
    t.geom.kind = TrapKind::Linear;
  } else if (kind == "ring") {
    t.geom.kind = TrapKind::QuadrupoleRing;
  } else {
    p.add_error("key 'trap': expected 'linear' or 'ring'");
  }
  const bool linear = t.geom.kind == TrapKind::Linear;
  t.geom.radial_scale = p.number("radial_mm", 0.75) * units::mm_to_m;
  t.geom.axial_half_length = p.number("z0_mm", linear ? 3.0 : 1.0) * units::mm_to_m;
  t.geom.axial_efficiency = p.number("kappa", linear ? 0.3 : 1.0);
  t.drive.rf_amplitude = units::vpp_to_amplitude(p.number("rf_vpp", 300.0));
  t.drive.rf_frequency = 2.0 * pi * p.number("rf_freq_mhz", 7.0) * 1e6;
  t.drive.dc_endcap = p.number("dc_endcap_v", 50.0);
  return t;
}

OpticalCavity read_cavity(ParamReader& p) {
  OpticalCavity c;
  c.finesse = p.number("finesse", 200.0);
  c.fsr = p.number("fsr_mhz", 1000.0) * 1e6;
  c.input_transmission = p.number("input_transmission", 0.03);
  return c;
}

ReferenceProfile read_reference(ParamReader& p) {
  ReferenceProfile ref;
  ref.aom_shift = p.number("aom_shift_mhz", 400.0) * 1e6;
  for (int i = 1; i <= 3; ++i) {
    const std::string tag = std::to_string(i);
    const double depth = p.number("rb_depth" + tag, i == 1 ? 0.5 : 0.0);
    const double center = p.number("rb_center" + tag + "_mhz", -500.0) * 1e6;
    const double fwhm = p.number("rb_fwhm" + tag + "_mhz", 1300.0) * 1e6;
    if (depth > 0.0) ref.lines.push_back({center, depth, fwhm});
  }
  return ref;
}

Discriminator read_discriminator(ParamReader& p, const OpticalCavity& cavity,
                                 std::string& name_out) {
  const std::string name = p.text("discriminator", "pdh");
  name_out = name;
  if (name == "pdh") {
    const double fm = p.number("mod_freq_mhz", 20.0) * 1e6;
    const double depth = p.number("mod_depth_rad", 1.0);
    return [cavity, fm, depth](double d) { return pdh_error(cavity, d, fm, depth); };
  }
  if (name == "hc") {
    const double split = p.number("polarization_split", 1.0);
    return [cavity, split](double d) { return hc_error(cavity, d, split); };
  }
  if (name == "dither") {
    return [cavity](double d) { return dither_error(cavity, d); };
  }
  if (name == "rb") {
    ReferenceProfile ref = read_reference(p);
    return [ref](double d) { return rb_error(ref, d); };
  }
  p.add_error("key 'discriminator': expected pdh, hc, rb or dither");
  return {};
}

void common_header(CsvTable& table, const RunConfig& config, const ParamReader& p) {
  table.comments.push_back(artifact_version);
  table.comments.push_back("scenario = " + config.scenario);
  table.comments.push_back("seed = " + std::to_string(config.seed) +
                           (config.seed_overridden ? "" : "  (default)"));
  for (const auto& line : p.provenance()) table.comments.push_back(line);
}

ScenarioResult finish(ParamReader& p, const RunConfig& config, CsvTable table) {
  p.finish();
  ScenarioResult result;
  result.errors = p.errors();
  if (result.errors.ok()) {
    std::vector<std::string> notes = std::move(table.comments);
    table.comments.clear();
    common_header(table, config, p);
    table.comments.insert(table.comments.end(), notes.begin(), notes.end());
    result.table = std::move(table);
  }
  return result;
}

ScenarioResult run_rate(const RunConfig& config) {
  ParamReader p(config);
  PulsedLaser laser;
  laser.wavelength = p.number("wavelength_nm", 431.0) * units::nm_to_m;
  laser.average_power = p.number("average_power_mw", 50.0) * 1e-3;
  laser.rep_rate = p.number("rep_rate_mhz", 82.0) * 1e6;
  laser.pulse_duration = p.number("pulse_fs", 100.0) * 1e-15;

  GaussianFocus focus;
  focus.waist_radius = p.number("waist_um", 10.0) * units::um_to_m;
  focus.wavelength = laser.wavelength;

  AtomicVapor vapor;
  vapor.pressure = p.number("pressure_torr", 1e-9) * units::torr_to_pa;
  vapor.temperature = p.number("temperature_k", 300.0);

  CrossSection sigma{p.number("sigma_prime_cm4_per_w", 1e-26) * units::cm4_per_w_to_m4_per_w};
  InteractionGeometry geom{p.number("trap_length_mm", 1.0) * units::mm_to_m, focus};

  const std::string convention = p.text("convention", "both");
  std::vector<IntensityConvention> conventions;
  if (convention == "both")
    conventions = {IntensityConvention::Peak, IntensityConvention::TimeAveraged};
  else if (convention == "peak")
    conventions = {IntensityConvention::Peak};
  else if (convention == "averaged")
    conventions = {IntensityConvention::TimeAveraged};
  else
    p.add_error("key 'convention': expected peak, averaged or both");

  CsvTable table;
  table.header = {"convention_is_peak", "intensity_w_per_m2", "photon_energy_j",
                  "sigma_prime_m4_per_w", "p_ion_per_pulse", "density_per_m3",
                  "rep_period_s", "waist_m", "trap_length_m", "loading_rate_per_s"};
  if (p.ok()) {
    for (auto conv : conventions) {
      const RateReport r = rate_report(laser, focus, vapor, sigma, geom, conv);
      table.add_row({conv == IntensityConvention::Peak ? 1.0 : 0.0, r.intensity,
                     r.photon_energy, r.sigma_prime, r.p_ion, r.density, r.rep_period,
                     r.waist_radius, r.trap_length, r.rate});
      if (r.perturbative_warning)
        table.comments.push_back(
            "warning: P_ion exceeds 0.1; lowest-order perturbation theory is unreliable here");
      if (r.rayleigh_warning)
        table.comments.push_back(
            "warning: trap_length exceeds the Rayleigh length of the focus");
    }
    table.comments.push_back(
        "note: the published loading-rate estimate of ~10 1/s is not reproduced by this "
        "formula chain with these parameters under either intensity convention; the "
        "intensity convention, trap-region density and interaction length behind that "
        "estimate were never stated, so all intermediates are reported and no side is taken");
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_stability(const RunConfig& config) {
  ParamReader p(config);
  const double a_min = p.number("a_min", -0.1);
  const double a_max = p.number("a_max", 0.1);
  const double q_min = p.number("q_min", 0.0);
  const double q_max = p.number("q_max", 1.2);
  const long a_points = p.integer("a_points", 100);
  const long q_points = p.integer("q_points", 100);
  if (a_points < 1 || q_points < 1) p.add_error("a_points and q_points must be >= 1");

  CsvTable table;
  table.header = {"a", "q", "stable"};
  if (p.ok()) {
    std::vector<std::vector<double>> rows(a_points * q_points, std::vector<double>(3));
    auto worker = [&](long row_begin, long row_end) {
      for (long i = row_begin; i < row_end; ++i) {
        const double a = a_points == 1 ? a_min : a_min + (a_max - a_min) * i / (a_points - 1);
        for (long j = 0; j < q_points; ++j) {
          const double q = q_points == 1 ? q_min : q_min + (q_max - q_min) * j / (q_points - 1);
          rows[i * q_points + j] = {a, q, mathieu_stable(a, q) ? 1.0 : 0.0};
        }
      }
    };
    const long n_threads =
        std::min<long>(a_points, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (long t = 0; t < n_threads; ++t) {
      const long begin = a_points * t / n_threads;
      const long end = a_points * (t + 1) / n_threads;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
    table.rows = std::move(rows);
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_secular(const RunConfig& config) {
  ParamReader p(config);
  const IonSpecies species = read_species(p);
  const TrapSetup trap = read_trap(p);

  CsvTable table;
  table.header = {"axis", "a", "q", "secular_freq_hz", "dc_unstable",
                  "floquet_stable", "depth_j", "depth_k"};
  if (p.ok()) {
    const MathieuParams mp = mathieu_params(species, trap.geom, trap.drive);
    const auto sec = secular_frequencies(mp, trap.drive.rf_frequency);
    const auto stab = floquet_stability(mp);
    const auto depth = trap_depth(mp, trap.drive, species, trap.geom);
    for (int ax = 0; ax < 3; ++ax)
      table.add_row({static_cast<double>(ax), mp.a[ax], mp.q[ax],
                     sec[ax].omega / (2.0 * pi), sec[ax].dc_unstable ? 1.0 : 0.0,
                     stab.stable[ax] ? 1.0 : 0.0, depth.joules[ax], depth.kelvin[ax]});
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_chain(const RunConfig& config) {
  ParamReader p(config);
  const IonSpecies species = read_species(p);
  const long n = p.integer("n_ions", 3);
  const double wz = 2.0 * pi * p.number("axial_freq_khz", 100.0) * 1e3;
  if (n < 1) p.add_error("key 'n_ions': must be >= 1");

  CsvTable table;
  table.header = {"index", "u_dimensionless", "z_m"};
  if (p.ok()) {
    const IonChain chain = chain_equilibrium(static_cast<int>(n), species, wz);
    table.comments.push_back("length_scale_m = " + format_number(chain.length_scale));
    table.comments.push_back("residual = " + format_number(chain.residual));
    for (int i = 0; i < chain.n_ions; ++i)
      table.add_row({static_cast<double>(i), chain.dimensionless[i], chain.positions[i]});
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_lock(const RunConfig& config) {
  ParamReader p(config);
  const OpticalCavity cavity = read_cavity(p);
  std::string name;
  Discriminator disc = read_discriminator(p, cavity, name);
  const double lo = p.number("scan_min_mhz", -25.0) * 1e6;
  const double hi = p.number("scan_max_mhz", 25.0) * 1e6;
  const long points = p.integer("points", 1001);
  const bool with_airy = p.text("include_transmission", "yes") == "yes";
  if (points < 2) p.add_error("key 'points': must be >= 2");
  if (hi <= lo) p.add_error("scan_max_mhz must exceed scan_min_mhz");

  CsvTable table;
  table.header = {"detuning_hz", "error_signal"};
  if (with_airy) table.header.push_back("transmission");
  if (p.ok() && disc) {
    for (long i = 0; i < points; ++i) {
      const double d = lo + (hi - lo) * i / (points - 1);
      std::vector<double> row{d, disc(d)};
      if (with_airy) row.push_back(airy_transmission(cavity, d));
      table.rows.push_back(std::move(row));
    }
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_servo(const RunConfig& config) {
  ParamReader p(config);
  const OpticalCavity cavity = read_cavity(p);
  std::string name;
  Discriminator disc = read_discriminator(p, cavity, name);

  PiServo servo;
  servo.kp = p.number("kp", 0.5);
  servo.ki = p.number("ki_per_s", 1e6);
  const double limit = p.number("output_limit", 1e9);
  servo.output_min = -limit;
  servo.output_max = limit;

  LockPlant plant;
  plant.discriminator = disc;
  plant.drift = p.number("drift_hz_per_s", 0.0);
  plant.noise_rms = p.number("noise_rms_hz", 0.0);
  plant.actuator_gain = p.number("actuator_gain_hz", 2e6);

  const double duration = p.number("duration_s", 1e-3);
  const double dt = p.number("dt_s", 1e-8);
  const double initial = p.number("initial_detuning_hz", 0.0);
  const long stride = p.integer("record_stride", 10);
  if (stride < 1) p.add_error("key 'record_stride': must be >= 1");

  CsvTable table;
  table.header = {"time_s", "error_signal", "actuator", "detuning_hz"};
  if (p.ok() && disc) {
    const ServoTrace trace = servo_run(plant, servo, duration, dt, config.seed, initial);
    if (trace.lock_lost_time)
      table.comments.push_back("lock lost at t = " + format_number(*trace.lock_lost_time) + " s");
    for (std::size_t i = 0; i < trace.times.size(); i += stride)
      table.add_row({trace.times[i], trace.error[i], trace.actuator[i], trace.detuning[i]});
  }
  return finish(p, config, std::move(table));
}

ScenarioResult run_dynamics(const RunConfig& config) {
  ParamReader p(config);
  const IonSpecies species = read_species(p);
  const TrapSetup trap = read_trap(p);
  const long n_ions = p.integer("n_ions", 1);
  const double duration = p.number("duration_us", 100.0) * 1e-6;
  const long steps_per_cycle = p.integer("steps_per_cycle", 100);
  const long sample_stride = p.integer("sample_stride", 4);
  const double offset = p.number("init_offset_um", 1.0) * units::um_to_m;
  const std::string cooling_on = p.text("cooling", "off");
  if (n_ions < 1) p.add_error("key 'n_ions': must be >= 1");
  if (steps_per_cycle < 20) p.add_error("key 'steps_per_cycle': must be >= 20");

  std::optional<CoolingModel> cooling;
  if (cooling_on == "on") {
    CoolingModel c;
    c.transition = species.transitions.at(0);  // 422 nm cooling line
    c.saturation = p.number("saturation", 1.0);
    c.detuning = p.number("detuning_linewidths", -0.5) * c.transition.linewidth();
    c.duty_factor = p.number("duty_factor", 12.0 / 13.0);
    const std::string dir = p.text("cooling_dir", "z");
    if (dir == "z")
      c.direction = {0.0, 0.0, 1.0};
    else if (dir == "diag") {
      const double s = 1.0 / std::sqrt(3.0);
      c.direction = {s, s, s};
    } else
      p.add_error("key 'cooling_dir': expected 'z' or 'diag'");
    cooling = c;
  } else if (cooling_on != "off") {
    p.add_error("key 'cooling': expected 'on' or 'off'");
  }

  SimConfig sim;
  sim.duration = duration;
  sim.time_step = 2.0 * pi / (trap.drive.rf_frequency * steps_per_cycle);
  sim.rng_seed = config.seed;
  sim.recoil_heating = p.text("recoil", "off") == "on";
  sim.sample_stride = static_cast<int>(sample_stride);

  CsvTable table;
  table.header = {"time_s"};
  for (long i = 0; i < n_ions; ++i) {
    const std::string tag = std::to_string(i);
    table.header.push_back("x" + tag + "_m");
    table.header.push_back("y" + tag + "_m");
    table.header.push_back("z" + tag + "_m");
  }
  if (p.ok()) {
    // Start on-axis, spread along z near the expected chain spacing, with
    // the configured radial offset on the first ion.
    std::vector<Vec3> init(n_ions, Vec3{0, 0, 0});
    if (n_ions > 1) {
      const MathieuParams mp = mathieu_params(species, trap.geom, trap.drive);
      const auto sec = secular_frequencies(mp, trap.drive.rf_frequency);
      if (sec[2].dc_unstable || sec[2].omega <= 0.0) {
        p.add_error("axial potential is not confining; cannot seed an ion chain");
        return finish(p, config, std::move(table));
      }
      const double ell =
          std::cbrt(species.charge * species.charge * constants::coulomb_constant /
                    (species.mass * sec[2].omega * sec[2].omega));
      const double spacing = 1.2 * ell * 2.018 / std::pow(n_ions, 0.559);
      for (long i = 0; i < n_ions; ++i) init[i][2] = spacing * (i - 0.5 * (n_ions - 1));
    }
    init[0][0] = offset;

    const Trajectory traj =
        simulate(species, trap.geom, trap.drive, static_cast<int>(n_ions), cooling, sim, init);
    if (traj.lost)
      table.comments.push_back("ion " + std::to_string(traj.lost->ion_index) +
                               " escaped at t = " + format_number(traj.lost->time) + " s");
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
      std::vector<double> row{traj.times[s]};
      for (long i = 0; i < n_ions; ++i)
        for (int ax = 0; ax < 3; ++ax) row.push_back(traj.positions[s][i][ax]);
      table.rows.push_back(std::move(row));
    }
  }
  return finish(p, config, std::move(table));
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& config) {
  if (config.scenario == "rate") return run_rate(config);
  if (config.scenario == "stability") return run_stability(config);
  if (config.scenario == "secular") return run_secular(config);
  if (config.scenario == "chain") return run_chain(config);
  if (config.scenario == "lock") return run_lock(config);
  if (config.scenario == "servo") return run_servo(config);
  if (config.scenario == "dynamics") return run_dynamics(config);
  ScenarioResult result;
  result.errors.messages.push_back(
      config.scenario.empty()
          ? "scenario missing"
          : "unknown scenario '" + config.scenario +
                "' (expected rate, stability, secular, chain, lock, servo or dynamics)");
  return result;
}

}  // namespace iontrap
