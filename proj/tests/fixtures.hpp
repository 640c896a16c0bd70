#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "memcav/constants.hpp"
#include "memcav/gaussian_steady_state.hpp"
#include "memcav/operating_point.hpp"

namespace fixtures {

using namespace memcav;

inline CavityGeometry short_cavity(double finesse = 23000.0) {
  return CavityGeometry{0.74e-3, 50e-3, finesse, 1064e-9, false};
}

inline MembraneSlab thin_membrane(double n_imag = 1e-5, double thickness = 50e-9) {
  MembraneSlab m;
  m.n_real = 2.0;
  m.n_imag = n_imag;
  m.thickness = thickness;
  m.side = 0.5e-3;
  m.surface_density = 4.0 * 8.5e-12 / (m.side * m.side);
  return m;
}

inline VibrationalMode drum(double quality = 6e6) {
  return VibrationalMode{1, 1, 2.0 * kPi * 10e6, 8.5e-12, quality};
}

/// Cavity, slab and resonator of the low-temperature cooling example, with
/// the membrane at the position of largest linear coupling.
inline SystemModel cooling_system(double temperature = 1.0, double thickness = 50e-9) {
  SystemModel sys = make_system(short_cavity(), thin_membrane(1e-5, thickness), drum(), temperature);
  sys.membrane.position = max_coupling_position(sys.k0);
  return sys;
}

inline OperatingPoint cooling_point(double temperature = 1.0, double power = 28.5e-3,
                                    double detuning_over_omega = 1.0) {
  const SystemModel sys = cooling_system(temperature);
  return operating_point(sys, DriveParams::target(power, detuning_over_omega * sys.mechanics.frequency));
}

/// Richardson-extrapolated central difference (two levels).
inline double richardson(const std::function<double(double)>& f, double x, double h) {
  auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

inline double richardson2(const std::function<double(double)>& f, double x, double h) {
  auto second = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
  return (4.0 * second(h / 2.0) - second(h)) / 3.0;
}

inline double rel(double a, double b) {
  const double d = std::max(std::abs(a), std::abs(b));
  return d == 0.0 ? 0.0 : std::abs(a - b) / d;
}

/// Composite Simpson rule on a square, n even.
inline double simpson2d(const std::function<double(double, double)>& f, double lo, double hi,
                        int n) {
  const double h = (hi - lo) / n;
  auto w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double s = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) s += w(i) * w(j) * f(lo + i * h, lo + j * h);
  return s * h * h / 9.0;
}

/// Random linearized operating point with physically sensible magnitudes,
/// in units where Omega_m = 1.
inline OperatingPoint random_point(std::mt19937_64& rng, bool with_absorption = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OperatingPoint op;
  op.kappa0 = 0.05 + 2.0 * u(rng);
  op.kappa1 = with_absorption ? 0.2 * op.kappa0 * u(rng) : 0.0;
  op.kappaT = op.kappa0 + op.kappa1;
  op.Delta = -2.0 + 5.0 * u(rng);
  op.G = (u(rng) - 0.5) * 1.6;
  op.Gamma = with_absorption ? (u(rng) - 0.5) * 0.02 : 0.0;
  op.h = (u(rng) - 0.5) * 0.4;
  op.n0 = 10.0 * u(rng);
  op.alpha_s = 1e3;
  return op;
}

inline VibrationalMode unit_drum(double quality) {
  return VibrationalMode{1, 1, 1.0, 1.0, quality};
}

}  // namespace fixtures
