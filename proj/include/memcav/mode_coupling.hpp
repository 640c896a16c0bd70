#pragma once

// Drum modes of a square membrane and the geometric factors that turn the
// radiation pressure on the slab into an optomechanical coupling rate.

#include "memcav/cavity_optics.hpp"

namespace memcav {

struct VibrationalMode {
  int index_j = 1;
  int index_k = 1;
  double frequency = 0.0;       // Omega_m [rad/s]
  double effective_mass = 0.0;  // m [kg]
  double quality = 0.0;         // Q_m

  double damping() const { return frequency / quality; }
  /// Zero-point length x0 = sqrt(hbar / (m Omega_m)).
  double zero_point_length() const;
  void validate() const;
};

struct CouplingEntry {
  double theta = 0.0;     // transverse overlap
  double lambda = 0.0;    // longitudinal factor
  double g_vacuum = 0.0;  // rad/s
};

/// Omega_jk = (c_s pi / D) sqrt(j^2 + k^2).
double vibrational_frequency(int j, int k, const MembraneSlab& mem, double sound_speed);

/// Inverse of vibrational_frequency for a pinned mode frequency.
double sound_speed_for(double frequency, int j, int k, const MembraneSlab& mem);

/// Normalized drum mode shape phi_jk(x, y) [1/m], origin at the membrane center.
double mode_shape_phi(int j, int k, double x, double y, const MembraneSlab& mem);

/// Physicists' Hermite polynomial H_n(x), three-term recurrence.
double hermite(int order, double x);

/// Normalized transverse optical pattern at the waist [1/m]; its square
/// integrates to 1 over the plane. Hermite order n runs along x, m along y.
double transverse_pattern(int m, int n, double x, double y, double waist);

struct OverlapResult {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate
};

/// Theta = (D/2) \int\int phi_jk T_1 T_2 over the membrane square. Throws
/// ConvergenceFailure when the requested tolerance is not reached.
OverlapResult transverse_overlap(int vib_j, int vib_k, int opt1_m, int opt1_n, int opt2_m,
                                 int opt2_n, double waist, const MembraneSlab& mem,
                                 double tolerance = 1e-9);

/// Lambda_ll = sin(2 k z0) sqrt(R / (1 - R cos^2(2 k z0))), lossless R.
double longitudinal_factor_diagonal(double k, double z0, const MembraneSlab& mem);

/// Full two-mode longitudinal factor Lambda_jl. Both wavenumbers should be
/// resonances of the loaded cavity (see perturbed_wavenumber); elsewhere the
/// s(k) factor can leave [-1, 1]. Throws SingularConfiguration when any
/// denominator vanishes to within 1e-12 or s(k) is out of range.
double longitudinal_factor_general(double k_first, double k_second, double z0,
                                   const MembraneSlab& mem, const CavityGeometry& cav,
                                   const ModeIndices& idx);

/// g = (2 omega0 / L) x0 Theta Lambda_0 [rad/s] for the driven mode with bare
/// wavenumber k0. Warns when the membrane sits on a node or antinode.
double vacuum_coupling_g(const VibrationalMode& vib, double k0, double z0, double theta,
                         const MembraneSlab& mem, const CavityGeometry& cav,
                         Warnings* warnings = nullptr);

/// Membrane position closest to the origin that maximizes |Lambda_0| at k0.
double max_coupling_position(double k0);

}  // namespace memcav
