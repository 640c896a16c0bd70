#pragma once

// Stationary Gaussian state of the linearized fluctuations (dq, dp, dX, dY).

#include <Eigen/Dense>

#include "memcav/errors.hpp"
#include "memcav/mode_coupling.hpp"

namespace memcav {

struct OperatingPoint;

using Matrix4 = Eigen::Matrix4d;

struct StabilityReport {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  bool stable = false;
};

struct CovarianceState {
  Matrix4 v = Matrix4::Zero();
  double occupancy_n = 0.0;
  double log_negativity = 0.0;
  double residual = 0.0;   // |A V + V A^T + D| / |D|
  double condition = 0.0;  // of the vectorized linear system
};

Matrix4 build_drift(const OperatingPoint& op, const VibrationalMode& vib);
Matrix4 build_diffusion(const OperatingPoint& op, const VibrationalMode& vib);

/// Routh-Hurwitz polynomials; stable iff all three are positive.
StabilityReport stability_conditions(const OperatingPoint& op, const VibrationalMode& vib);

/// Largest real part among the eigenvalues of a.
double max_real_eigenvalue(const Matrix4& a);

/// Solves A V + V A^T = -D for symmetric V. Throws UnstableSystem unless A is
/// strictly stable; warns when the linear system is ill-conditioned.
CovarianceState solve_lyapunov(const Matrix4& a, const Matrix4& d, Warnings* warnings = nullptr);

double occupancy(const Matrix4& v);

/// E_N of the mechanical (first two) versus optical (last two) quadratures.
double logarithmic_negativity(const Matrix4& v);

/// Drift, diffusion, Lyapunov solve, occupancy and E_N for one operating point.
CovarianceState stationary_state(const OperatingPoint& op, const VibrationalMode& vib,
                                 Warnings* warnings = nullptr);

}  // namespace memcav
