#pragma once

// Frequency-domain view of the mechanical fluctuations: effective
// susceptibility, noise spectra, sideband scattering rates and the
// weak-coupling occupancy estimate.

#include <complex>

#include "memcav/mode_coupling.hpp"
#include "memcav/operating_point.hpp"

namespace memcav {

enum class ThermalModel { markovian, coth_exact };

struct SpectrumSample {
  double omega = 0.0;
  double s_th = 0.0;
  double s_rp = 0.0;
  double s_abs = 0.0;
  double s_q = 0.0;
  std::complex<double> chi_eff;
};

struct EffectiveOscillator {
  double frequency = 0.0;
  double damping = 0.0;
};

struct CoolingRates {
  double a_plus = 0.0;           // Stokes (heating)
  double a_minus = 0.0;          // anti-Stokes (cooling)
  double gamma_eff_at_Om = 0.0;
  double omega_eff_at_Om = 0.0;  // NaN in the antistable regime
};

struct VarianceEstimate {
  double q_variance = 0.0;
  double p_variance = 0.0;
  double q_error = 0.0;  // quadrature plus truncation estimate
  double p_error = 0.0;
};

std::complex<double> effective_susceptibility(double omega, const OperatingPoint& op,
                                              const VibrationalMode& vib);

/// Frequency-dependent effective resonance and damping. Throws UnstableSystem
/// when the squared effective frequency is negative.
EffectiveOscillator effective_frequency_damping(double omega, const OperatingPoint& op,
                                                const VibrationalMode& vib);

SpectrumSample noise_spectra(double omega, const OperatingPoint& op, const VibrationalMode& vib,
                             ThermalModel model = ThermalModel::markovian);

/// Sideband rates, normalized so that gamma_eff(Omega_m) = gamma_m + A- - A+.
CoolingRates scattering_rates(const OperatingPoint& op, const VibrationalMode& vib);

/// (gamma_m n0 + Gamma^2 / (8 kappa1) + A+) / (gamma_m + A- - A+). Throws
/// UnstableSystem when the net damping is not positive.
double approximate_occupancy(const OperatingPoint& op, const VibrationalMode& vib,
                             Warnings* warnings = nullptr);

/// <dq^2> and <dp^2> by integrating the position spectrum over frequency.
VarianceEstimate spectral_variances(const OperatingPoint& op, const VibrationalMode& vib,
                                    ThermalModel model = ThermalModel::markovian);

}  // namespace memcav
