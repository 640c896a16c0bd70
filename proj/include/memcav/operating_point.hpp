#pragma once

// Classical steady state of the driven cavity-membrane system and the
// coefficients of the linearized fluctuation dynamics around it.
//
// Positions are the dimensionless q = z_shift / x0. The laser frequency is
// carried as an offset from the bare mode frequency c k0, since an absolute
// optical angular frequency cannot resolve sub-Hz detunings in double.

#include <vector>

#include "memcav/cavity_optics.hpp"
#include "memcav/mode_coupling.hpp"

namespace memcav {

struct SystemModel {
  CavityGeometry cavity;
  MembraneSlab membrane;
  ModeIndices mode;
  VibrationalMode mechanics;
  double k0 = 0.0;           // bare wavenumber of the driven cavity mode
  double temperature = 0.0;  // reservoir temperature T0 [K]

  double bare_frequency() const;
  void validate() const;
};

/// Drives transverse mode (m, n) with the longitudinal index closest to the
/// laser. k0 is the laser wavenumber 2 pi / lambda, or the exact bare
/// resonance of that mode when exact_resonance is set.
SystemModel make_system(const CavityGeometry& cavity, const MembraneSlab& membrane,
                        const VibrationalMode& mechanics, double temperature, int m = 0,
                        int n = 0, bool exact_resonance = false);

enum class DetuningMode { fixed_laser_frequency, target_detuning };

struct DriveParams {
  double input_power = 0.0;   // P [W]
  double laser_offset = 0.0;  // omega_L - c k0 [rad/s], fixed-laser mode
  DetuningMode mode = DetuningMode::fixed_laser_frequency;
  double target_detuning = 0.0;  // Delta_target [rad/s], target mode

  static DriveParams fixed(double power, double offset);
  static DriveParams target(double power, double detuning);
};

struct OperatingPoint {
  double q_s = 0.0;
  double alpha_s = 0.0;
  double Delta = 0.0;
  double G = 0.0;
  double Gamma = 0.0;
  double h = 0.0;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double kappaT = 0.0;
  double n0 = 0.0;
  bool stable = false;

  double laser_offset = 0.0;  // omega_L - c k0 that produced this branch
  double laser_frequency = 0.0;
  double drive_E = 0.0;       // E = sqrt(2 P kappa0 / (hbar omega_L))
  double dq_omega = 0.0;
  double d2q_omega = 0.0;
  double dq_kappa1 = 0.0;
  double shift = 0.0;         // Re dw(q_s)
  double input_power = 0.0;
  double temperature = 0.0;
};

/// omega(q) - omega0 and its q-derivatives, with kappa1(q) and d kappa1/dq.
struct FrequencyDerivatives {
  double shift = 0.0;
  double dq = 0.0;
  double d2q = 0.0;
  double kappa1 = 0.0;
  double dq_kappa1 = 0.0;
};

FrequencyDerivatives position_dependent_frequency(double q, const SystemModel& sys,
                                                  Warnings* warnings = nullptr);

/// Mean thermal phonon number 1/(exp(hbar Omega / kB T) - 1); zero at T = 0.
double thermal_occupancy(double omega, double temperature);

/// All real roots of the classical force balance, sorted by |q_s|. In
/// target-detuning mode each root comes with the laser offset that places it
/// at the requested detuning. Every point is fully linearized.
std::vector<OperatingPoint> solve_steady_state(const SystemModel& sys, const DriveParams& drive,
                                               Warnings* warnings = nullptr);

/// Fills G, Gamma, h, kappas, n0 and the stability flag for a solved branch.
OperatingPoint linearization_coefficients(OperatingPoint op, const SystemModel& sys);

/// G evaluated from the input power instead of alpha_s.
double coupling_from_power(const OperatingPoint& op);

/// Lowest-|q_s| stable branch, or the lowest-|q_s| branch when none is stable.
const OperatingPoint& select_branch(const std::vector<OperatingPoint>& branches);

/// Convenience: solve and select in one call.
OperatingPoint operating_point(const SystemModel& sys, const DriveParams& drive,
                               Warnings* warnings = nullptr);

}  // namespace memcav
