#pragma once

// Optical skeleton of a two-mirror Fabry-Perot cavity with a thin dielectric
// slab near its waist: bare Hermite-Gauss frequencies, slab reflectivity, the
// complex slab-induced frequency shift and the resulting absorption-limited
// finesse.
//
// Lengths are in meters, rates in rad/s. The z axis is the cavity axis with
// its origin at the cavity center.

#include <complex>

#include "memcav/errors.hpp"

namespace memcav {

struct CavityGeometry {
  double length = 0.0;          // mirror separation L
  double curvature = 0.0;       // mirror radius of curvature R
  double finesse = 0.0;         // empty-cavity finesse F
  double wavelength = 0.0;      // drive wavelength
  bool planar = false;          // g = 1 limit; no transverse structure

  /// g = 1 - L/R (exactly 1 in the planar limit).
  double stability_parameter() const;
  /// Gouy phase accumulated over one pass per unit (m+n+1): arccos(g).
  double gouy_phase() const;
  /// Rayleigh range, independent of wavenumber for a symmetric cavity.
  /// Infinite in the planar limit.
  double rayleigh_range() const;
  /// Waist radius w0 at wavenumber k.
  double waist(double k) const;
  /// Empty-cavity amplitude decay rate kappa0 = pi c / (2 L F).
  double kappa0() const;
  double laser_wavenumber() const;

  /// Throws InvalidGeometry on any violated invariant.
  void validate() const;
};

struct MembraneSlab {
  double n_real = 1.0;
  double n_imag = 0.0;
  double thickness = 0.0;        // L_d
  double side = 0.0;             // D, square membrane
  double surface_density = 0.0;  // sigma [kg/m^2]
  double position = 0.0;         // z0, center of mass along the axis

  std::complex<double> index() const { return {n_real, n_imag}; }
  /// m = sigma D^2 / 4, shared by every drum mode.
  double effective_mass() const { return surface_density * side * side / 4.0; }

  void validate() const;
};

struct ComplexShift {
  double real_part = 0.0;
  double imag_part = 0.0;
};

struct ModeIndices {
  int m = 0;  // transverse (y Hermite order)
  int n = 0;  // transverse (x Hermite order)
  int p = 1;  // longitudinal, >= 1

  int transverse_order() const { return m + n + 1; }
};

/// Bare Hermite-Gauss resonance omega0_{mnp}. Throws InvalidGeometry when the
/// cavity is outside -1 < g < 1 and not flagged planar.
double empty_mode_frequency(const ModeIndices& idx, const CavityGeometry& cav);

/// Longitudinal index whose bare resonance lies closest to wavenumber k.
int nearest_longitudinal_index(double k, int transverse_order, const CavityGeometry& cav);

/// Complex intensity reflection coefficient R(k) of the slab. Evaluated in the
/// pole-free form (n^2-1)^2 sin^2 / (4 n^2 cos^2 + (n^2+1)^2 sin^2), so the
/// cot(n k L_d) poles simply give R = 0.
std::complex<double> membrane_reflectivity(double k, const MembraneSlab& mem);

/// Reflectivity with the real part of the index only (lossless slab).
double membrane_reflectivity_real(double k, const MembraneSlab& mem);

/// Slab phase beta(k) = arccos[2n cot(nkL_d) / sqrt(4n^2 cot^2 + (n^2+1)^2)] - k L_d.
std::complex<double> slab_phase(double k, const MembraneSlab& mem);

/// Dimensionless shift phase  L * dw / c  and its first two derivatives with
/// respect to the membrane position z0 [1/m, 1/m^2]. Complex: the imaginary
/// part carries absorption.
struct ShiftPhase {
  std::complex<double> value;
  std::complex<double> d_dz;
  std::complex<double> d2_dz2;
};

ShiftPhase shift_phase(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                       Warnings* warnings = nullptr);

/// Complex frequency shift of mode idx (bare wavenumber k0) for a membrane
/// centered at z0. Warns when the slab leaves the Rayleigh range.
ComplexShift frequency_shift(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                             const CavityGeometry& cav, Warnings* warnings = nullptr);

/// kappa1 = |Im dw|.
double absorption_rate_kappa1(double z0, double k0, const ModeIndices& idx,
                              const MembraneSlab& mem, const CavityGeometry& cav,
                              Warnings* warnings = nullptr);

/// 1/F_T = 1/F + (2/pi) |Im(L dw / c)|.
double total_finesse(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                     const CavityGeometry& cav, Warnings* warnings = nullptr);

/// Residual of the exact resonance condition
///   sin[k L - (m+n+1) arccos g + beta(k)] - sqrt(R(k)) cos(2 k z0)
/// for a lossless slab. Zero at a true resonance of the loaded cavity.
double resonance_condition(double k, double z0, const ModeIndices& idx, const MembraneSlab& mem,
                           const CavityGeometry& cav);

/// Bare wavenumber plus the first-order shift, k0 + Re(dw)/c.
double perturbed_wavenumber(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                            const CavityGeometry& cav);

}  // namespace memcav
