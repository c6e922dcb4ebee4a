#ifndef IONTRAP_TRAPMODEL_HPP
#define IONTRAP_TRAPMODEL_HPP

#include <array>
#include <optional>
#include <vector>

#include "iontrap/physcore.hpp"

namespace iontrap {

enum class TrapKind { QuadrupoleRing, Linear };

struct TrapGeometry {
  TrapKind kind = TrapKind::Linear;
  // r0 for the ring trap, axis-to-rod distance R for the linear trap.
  double radial_scale = 0.0;      // m
  double axial_half_length = 0.0; // m (z0)
  // Geometric efficiency of the DC endcap potential. No field solver
  // here, so this scalar absorbs the electrode shape.
  double axial_efficiency = 1.0;

  void validate() const {
    if (radial_scale <= 0.0) throw std::invalid_argument("TrapGeometry: radial_scale must be > 0");
    if (axial_half_length <= 0.0)
      throw std::invalid_argument("TrapGeometry: axial_half_length must be > 0");
    if (axial_efficiency <= 0.0 || axial_efficiency > 1.0)
      throw std::invalid_argument("TrapGeometry: axial_efficiency must be in (0,1]");
  }
};

struct TrapDrive {
  double rf_amplitude = 0.0;  // V, zero-to-peak
  double rf_frequency = 0.0;  // rad/s (Omega)
  double dc_endcap = 0.0;     // V
  std::vector<double> dc_offsets;  // per-electrode compensation, V

  void validate() const {
    if (rf_frequency <= 0.0) throw std::invalid_argument("TrapDrive: rf_frequency must be > 0");
    if (rf_amplitude < 0.0) throw std::invalid_argument("TrapDrive: rf_amplitude must be >= 0");
  }
};

struct MathieuParams {
  std::array<double, 3> a{};  // x, y, z
  std::array<double, 3> q{};  // x, y, z
};

// Standard lowest-order Mathieu parametrization of the configured trap.
// Linear: q_x = 2QV/(m Omega^2 R^2) = -q_y, q_z = 0,
//         a_z = 8 kappa Q U/(m Omega^2 z0^2), a_x = a_y = -a_z/2.
// Ring (d^2 = r0^2 + 2 z0^2): q_z = 8QV/(m Omega^2 d^2) = -2 q_r,
//         a_z = -16 kappa Q U/(m Omega^2 d^2) = -2 a_r.
// Both satisfy sum(a) = 0 (Laplace).
MathieuParams mathieu_params(const IonSpecies& species, const TrapGeometry& geom,
                             const TrapDrive& drive);

// Monodromy-matrix verdict for u'' + (a - 2 q cos 2tau) u = 0 over one
// period, fixed-step RK4 with step pi/2000. Stable iff |tr M| <= 2.
bool mathieu_stable(double a, double q, int steps = 2000);

struct AxisStability {
  std::array<bool, 3> stable{};
};
AxisStability floquet_stability(const MathieuParams& params, int steps = 2000);

struct SecularFrequency {
  double omega = 0.0;     // rad/s; 0 when dc_unstable
  bool dc_unstable = false;  // a + q^2/2 < 0 on this axis
};

// Pseudopotential secular frequencies (Omega/2) sqrt(a + q^2/2) per axis.
// Valid for |q| <~ 0.4.
std::array<SecularFrequency, 3> secular_frequencies(const MathieuParams& params,
                                                    double rf_frequency);

struct TrapDepth {
  std::array<double, 3> joules{};
  std::array<double, 3> kelvin{};
};

// Pseudopotential depth per axis; radial D = q V Q / 8 at a = 0, generalized
// to D = (m/2) omega_sec^2 * scale^2 with the axis extent of the geometry.
TrapDepth trap_depth(const MathieuParams& params, const TrapDrive& drive,
                     const IonSpecies& species, const TrapGeometry& geom);

struct IonChain {
  int n_ions = 0;
  double axial_frequency = 0.0;      // rad/s
  double length_scale = 0.0;         // m, l = (Q^2/(4 pi eps0 m wz^2))^(1/3)
  std::vector<double> positions;     // m, strictly increasing
  std::vector<double> dimensionless; // positions / l
  double residual = 0.0;             // final force-balance residual (dimensionless)
};

// Equilibrium positions of n ions in a harmonic axial well, damped Newton
// on the dimensionless force balance; residual < 1e-12 or throws.
IonChain chain_equilibrium(int n, const IonSpecies& species, double axial_frequency);

// Dimensionless equilibrium only (no species/length scale needed).
std::vector<double> chain_equilibrium_dimensionless(int n);

}  // namespace iontrap

#endif
