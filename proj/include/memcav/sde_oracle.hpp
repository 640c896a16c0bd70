#pragma once

// Brute-force check of the stationary covariance: Euler-Maruyama integration
// of du = A u dt + dN with classical white noise whose symmetrized intensity
// equals the diffusion matrix. Only second moments are compared, and those
// are the same for classical and quantum Gaussian noise of equal intensity.

#include <cstdint>

#include "memcav/errors.hpp"
#include "memcav/gaussian_steady_state.hpp"

namespace memcav {

struct SimulationConfig {
  double dt = 0.0;
  double total_time = 0.0;  // summed over all batches, burn-in excluded
  double burn_in = 0.0;     // discarded at the start of every batch
  std::uint64_t seed = 0;
  int batch_count = 16;
  // Wiener cells per step. Runs that differ only in dt * cells_per_step see
  // the same Brownian path, which makes dt-refinement comparisons pathwise.
  int cells_per_step = 1;
  int threads = 1;
};

struct EmpiricalCovariance {
  Matrix4 v_hat = Matrix4::Zero();
  Matrix4 standard_errors = Matrix4::Zero();
  long long samples = 0;
};

/// Lower-triangular C with C C^T = 2 D; zero rows of D give zero rows of C.
Matrix4 noise_factor(const Matrix4& d);

/// Step size and run lengths scaled to the fastest rate and slowest decay of a.
SimulationConfig default_simulation_config(const Matrix4& a, std::uint64_t seed,
                                           double decay_times = 10000.0);

EmpiricalCovariance simulate(const Matrix4& a, const Matrix4& d, const SimulationConfig& cfg,
                             Warnings* warnings = nullptr);

}  // namespace memcav
