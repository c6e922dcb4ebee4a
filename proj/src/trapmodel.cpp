#include "iontrap/trapmodel.hpp"

#include <algorithm>
#include <cmath>

namespace iontrap {

MathieuParams mathieu_params(const IonSpecies& species, const TrapGeometry& geom,
                             const TrapDrive& drive) {
  species.validate();
  geom.validate();
  drive.validate();

  const double Q = species.charge;
  const double m = species.mass;
  const double omega2 = drive.rf_frequency * drive.rf_frequency;
  const double V = drive.rf_amplitude;
  const double U = drive.dc_endcap;
  const double kappa = geom.axial_efficiency;

  MathieuParams p;
  if (geom.kind == TrapKind::Linear) {
    const double R2 = geom.radial_scale * geom.radial_scale;
    const double z02 = geom.axial_half_length * geom.axial_half_length;
    const double qr = 2.0 * Q * V / (m * omega2 * R2);
    const double az = 8.0 * kappa * Q * U / (m * omega2 * z02);
    p.q = {qr, -qr, 0.0};
    p.a = {-az / 2.0, -az / 2.0, az};
  } else {
    const double d2 = geom.radial_scale * geom.radial_scale +
                      2.0 * geom.axial_half_length * geom.axial_half_length;
    const double qz = 8.0 * Q * V / (m * omega2 * d2);
    const double az = -16.0 * kappa * Q * U / (m * omega2 * d2);
    p.q = {-qz / 2.0, -qz / 2.0, qz};
    p.a = {-az / 2.0, -az / 2.0, az};
  }
  return p;
}

namespace {

// One RK4 step of u'' = -(a - 2 q cos 2 tau) u.
inline void mathieu_rk4_step(double a, double q, double tau, double h, double& u,
                             double& v) {
  auto acc = [a, q](double t, double uu) { return -(a - 2.0 * q * std::cos(2.0 * t)) * uu; };
  const double k1u = v, k1v = acc(tau, u);
  const double k2u = v + 0.5 * h * k1v, k2v = acc(tau + 0.5 * h, u + 0.5 * h * k1u);
  const double k3u = v + 0.5 * h * k2v, k3v = acc(tau + 0.5 * h, u + 0.5 * h * k2u);
  const double k4u = v + h * k3v, k4v = acc(tau + h, u + h * k3u);
  u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

bool mathieu_stable(double a, double q, int steps) {
  if (steps < 10) throw std::invalid_argument("mathieu_stable: too few steps");
  const double h = pi / steps;
  // Two independent solutions spanning the monodromy matrix.
  double u1 = 1.0, v1 = 0.0;
  double u2 = 0.0, v2 = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double tau = i * h;
    mathieu_rk4_step(a, q, tau, h, u1, v1);
    mathieu_rk4_step(a, q, tau, h, u2, v2);
  }
  const double trace = u1 + v2;
  if (!std::isfinite(trace)) throw std::runtime_error("mathieu_stable: integration diverged");
  return std::abs(trace) <= 2.0;
}

AxisStability floquet_stability(const MathieuParams& params, int steps) {
  AxisStability s;
  for (int ax = 0; ax < 3; ++ax) s.stable[ax] = mathieu_stable(params.a[ax], params.q[ax], steps);
  return s;
}

std::array<SecularFrequency, 3> secular_frequencies(const MathieuParams& params,
                                                    double rf_frequency) {
  if (rf_frequency <= 0.0) throw std::invalid_argument("secular_frequencies: rf_frequency must be > 0");
  std::array<SecularFrequency, 3> out;
  for (int ax = 0; ax < 3; ++ax) {
    const double radicand = params.a[ax] + 0.5 * params.q[ax] * params.q[ax];
    if (radicand < 0.0) {
      out[ax] = {0.0, true};
    } else {
      out[ax] = {0.5 * rf_frequency * std::sqrt(radicand), false};
    }
  }
  return out;
}

TrapDepth trap_depth(const MathieuParams& params, const TrapDrive& drive,
                     const IonSpecies& species, const TrapGeometry& geom) {
  species.validate();
  geom.validate();
  drive.validate();
  const auto sec = secular_frequencies(params, drive.rf_frequency);
  TrapDepth d;
  for (int ax = 0; ax < 3; ++ax) {
    double depth;
    if (params.q[ax] != 0.0) {
      // RF pseudopotential depth at the electrode surface.
      depth = std::abs(params.q[ax]) * drive.rf_amplitude * species.charge / 8.0;
    } else {
      // DC axis: harmonic well depth at the endcap.
      const double w = sec[ax].omega;
      depth = 0.5 * species.mass * w * w * geom.axial_half_length * geom.axial_half_length;
    }
    d.joules[ax] = depth;
    d.kelvin[ax] = depth / constants::boltzmann;
  }
  return d;
}

namespace {

// f_m(u) = u_m - sum_{n != m} sgn(u_m - u_n) / (u_m - u_n)^2
void chain_residual(const std::vector<double>& u, std::vector<double>& f) {
  const int n = static_cast<int>(u.size());
  for (int m = 0; m < n; ++m) {
    double s = u[m];
    for (int k = 0; k < n; ++k) {
      if (k == m) continue;
      const double d = u[m] - u[k];
      s -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
    }
    f[m] = s;
  }
}

// Dense Gaussian elimination with partial pivoting; n is tiny.
bool solve_linear(std::vector<double>& A, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
    if (std::abs(A[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = A[r * n + col] / A[col * n + col];
      for (int c = col; c < n; ++c) A[r * n + c] -= factor * A[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
    b[r] = s / A[r * n + r];
  }
  return true;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool newton_solve(std::vector<double>& u, double tol, int max_iter, double& residual) {
  const int n = static_cast<int>(u.size());
  std::vector<double> f(n), J(n * n), step(n), trial(n), ftrial(n);
  chain_residual(u, f);
  residual = max_abs(f);
  for (int it = 0; it < max_iter && residual > tol; ++it) {
    std::fill(J.begin(), J.end(), 0.0);
    for (int m = 0; m < n; ++m) {
      double diag = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k == m) continue;
        const double d = std::abs(u[m] - u[k]);
        const double w = 2.0 / (d * d * d);
        diag += w;
        J[m * n + k] = -w;
      }
      J[m * n + m] = diag;
    }
    step = f;
    std::vector<double> Jcopy = J;
    if (!solve_linear(Jcopy, step, n)) return false;
    // Damped line search; reject steps that break the ordering.
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      for (int m = 0; m < n; ++m) trial[m] = u[m] - lambda * step[m];
      bool ordered = true;
      for (int m = 1; m < n; ++m)
        if (trial[m] <= trial[m - 1]) { ordered = false; break; }
      if (!ordered) continue;
      chain_residual(trial, ftrial);
      if (max_abs(ftrial) < residual) {
        u = trial;
        f = ftrial;
        residual = max_abs(f);
        accepted = true;
        break;
      }
    }
    if (!accepted) return residual <= tol;
  }
  return residual <= tol;
}

}  // namespace

std::vector<double> chain_equilibrium_dimensionless(int n) {
  if (n < 1) throw std::invalid_argument("chain_equilibrium: n must be >= 1");
  if (n == 1) return {0.0};

  const double tol = 1e-13;
  // Empirical mean-spacing start.
  const double spacing = 2.018 / std::pow(n, 0.559);
  std::vector<double> u(n);
  for (int m = 0; m < n; ++m) u[m] = spacing * (m - 0.5 * (n - 1));

  double residual = 0.0;
  if (!newton_solve(u, tol, 200, residual)) {
    // Continuation from the n-1 chain with one ion appended outside.
    std::vector<double> prev = chain_equilibrium_dimensionless(n - 1);
    u.assign(prev.begin(), prev.end());
    u.push_back(prev.back() + spacing);
    std::sort(u.begin(), u.end());
    if (!newton_solve(u, tol, 400, residual))
      throw std::runtime_error("chain_equilibrium: Newton failed, residual " +
                               std::to_string(residual));
  }
  // Force-balance is symmetric; recentre to remove solver drift.
  double mean = 0.0;
  for (double x : u) mean += x;
  mean /= n;
  for (double& x : u) x -= mean;
  return u;
}

IonChain chain_equilibrium(int n, const IonSpecies& species, double axial_frequency) {
  species.validate();
  if (axial_frequency <= 0.0)
    throw std::invalid_argument("chain_equilibrium: axial_frequency must be > 0");
  IonChain chain;
  chain.n_ions = n;
  chain.axial_frequency = axial_frequency;
  chain.length_scale =
      std::cbrt(species.charge * species.charge * constants::coulomb_constant /
                (species.mass * axial_frequency * axial_frequency));
  chain.dimensionless = chain_equilibrium_dimensionless(n);
  chain.positions.resize(n);
  for (int m = 0; m < n; ++m) chain.positions[m] = chain.dimensionless[m] * chain.length_scale;

  std::vector<double> f(n);
  chain_residual(chain.dimensionless, f);
  for (double x : f) chain.residual = std::max(chain.residual, std::abs(x));
  return chain;
}

}  // namespace iontrap
