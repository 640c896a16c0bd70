#include "memcav/sde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <vector>

#include "memcav/constants.hpp"

namespace memcav {

namespace {

constexpr double kOverflowGuard = 1e150;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Four independent standard normals attached to one Wiener cell.
struct CellNoise {
  std::uint64_t stream;

  void draw(std::uint64_t cell, double out[4]) const {
    const std::uint64_t key = stream ^ splitmix64(cell);
    for (int pair = 0; pair < 2; ++pair) {
      const double u1 = to_unit_open(splitmix64(key + 2 * pair));
      const double u2 = to_unit_open(splitmix64(key + 2 * pair + 1 + 0x5851F42D4C957F2DULL));
      const double r = std::sqrt(-2.0 * std::log(u1));
      out[2 * pair] = r * std::cos(2.0 * kPi * u2);
      out[2 * pair + 1] = r * std::sin(2.0 * kPi * u2);
    }
  }
};

double fastest_rate(const Matrix4& a) {
  return std::max({std::abs(a(0, 1)), std::abs(a(1, 1)), std::abs(a(2, 2)), std::abs(a(2, 3))});
}

struct BatchResult {
  Matrix4 second_moment = Matrix4::Zero();
  long long samples = 0;
};

BatchResult run_batch(const Matrix4& a, const Matrix4& c, const SimulationConfig& cfg, int batch,
                      long long burn_steps, long long keep_steps) {
  const CellNoise noise{splitmix64(splitmix64(cfg.seed) ^ splitmix64(0xB5AD4ECEDA1CE2A9ULL + batch))};
  const double cell_dt = cfg.dt / cfg.cells_per_step;
  // Intensity-1/2 channels: increment variance per cell is cell_dt / 2.
  const double cell_scale = std::sqrt(0.5 * cell_dt);
  const Matrix4 step_drift = Matrix4::Identity() + cfg.dt * a;

  Eigen::Vector4d u = Eigen::Vector4d::Zero();
  Eigen::Vector4d dw;
  double xi[4];
  std::uint64_t cell = 0;
  Matrix4 acc = Matrix4::Zero();
  const long long total = burn_steps + keep_steps;
  for (long long n = 0; n < total; ++n) {
    dw.setZero();
    for (int s = 0; s < cfg.cells_per_step; ++s) {
      noise.draw(cell++, xi);
      for (int k = 0; k < 4; ++k) dw(k) += cell_scale * xi[k];
    }
    u = step_drift * u + c * dw;
    if (n >= burn_steps) acc.noalias() += u * u.transpose();
    if ((n & 0xFFFF) == 0 && !(u.norm() < kOverflowGuard)) {
      throw UnstableSystem("stochastic trajectory diverged; drift matrix or time step unstable");
    }
  }
  if (!(u.norm() < kOverflowGuard)) {
    throw UnstableSystem("stochastic trajectory diverged; drift matrix or time step unstable");
  }
  BatchResult r;
  r.samples = keep_steps;
  r.second_moment = keep_steps > 0 ? Matrix4(acc / static_cast<double>(keep_steps)) : acc;
  return r;
}

}  // namespace

Matrix4 noise_factor(const Matrix4& d) {
  const Matrix4 m = 2.0 * d;
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.transpose()).norm() > 1e-12 * scale) {
    throw InvalidParameter("diffusion matrix must be symmetric");
  }
  Matrix4 l = Matrix4::Zero();
  for (int j = 0; j < 4; ++j) {
    double pivot = m(j, j);
    for (int k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -1e-10 * scale) {
      std::ostringstream os;
      os << "diffusion matrix is not positive semidefinite (pivot " << pivot << ")";
      throw InvalidParameter(os.str());
    }
    if (pivot <= 1e-14 * scale) continue;
    l(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < 4; ++i) {
      double v = m(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

SimulationConfig default_simulation_config(const Matrix4& a, std::uint64_t seed,
                                           double decay_times) {
  Eigen::EigenSolver<Matrix4> es(a, false);
  const double decay = -es.eigenvalues().real().maxCoeff();
  if (!(decay > 0.0)) throw UnstableSystem("drift matrix is not stable");
  const double rate = fastest_rate(a);
  SimulationConfig cfg;
  cfg.seed = seed;
  cfg.dt = std::min(1e-3 / rate, 2e-3 * decay / (rate * rate));
  cfg.total_time = decay_times / decay;
  cfg.burn_in = 20.0 / decay;
  return cfg;
}

EmpiricalCovariance simulate(const Matrix4& a, const Matrix4& d, const SimulationConfig& cfg,
                             Warnings* warnings) {
  if (!(cfg.dt > 0.0)) throw InvalidParameter("time step must be positive");
  if (!(cfg.total_time > 0.0)) throw InvalidParameter("total simulation time must be positive");
  if (!(cfg.burn_in >= 0.0)) throw InvalidParameter("burn-in must be non-negative");
  if (cfg.batch_count < 2) throw InvalidParameter("at least two batches are needed for errors");
  if (cfg.cells_per_step < 1) throw InvalidParameter("cells_per_step must be >= 1");
  const double rate = fastest_rate(a);
  if (!(cfg.dt < 0.1 / rate)) {
    std::ostringstream os;
    os << "time step " << cfg.dt << " s does not resolve the fastest rate " << rate
       << " rad/s (need dt < " << 0.1 / rate << ")";
    throw InvalidParameter(os.str());
  }
  const double lead = max_real_eigenvalue(a);
  if (!(lead < 0.0)) throw UnstableSystem("drift matrix is not stable");
  if (cfg.burn_in < 10.0 / -lead) {
    std::ostringstream os;
    os << "burn-in " << cfg.burn_in << " s is shorter than ten relaxation times ("
       << 10.0 / -lead << " s)";
    warn(warnings, os.str());
  }

  const Matrix4 c = noise_factor(d);
  const long long burn_steps = static_cast<long long>(std::ceil(cfg.burn_in / cfg.dt));
  const long long keep_steps =
      std::max(1LL, static_cast<long long>(std::llround(cfg.total_time / cfg.dt / cfg.batch_count)));

  std::vector<BatchResult> results(cfg.batch_count);
  const int workers = std::clamp(cfg.threads, 1, cfg.batch_count);
  if (workers == 1) {
    for (int b = 0; b < cfg.batch_count; ++b) results[b] = run_batch(a, c, cfg, b, burn_steps, keep_steps);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int b = w; b < cfg.batch_count; b += workers) {
            results[b] = run_batch(a, c, cfg, b, burn_steps, keep_steps);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EmpiricalCovariance out;
  for (const auto& r : results) {
    out.v_hat += r.second_moment;
    out.samples += r.samples;
  }
  out.v_hat /= cfg.batch_count;
  Matrix4 var = Matrix4::Zero();
  for (const auto& r : results) {
    const Matrix4 dev = r.second_moment - out.v_hat;
    var += dev.cwiseProduct(dev);
  }
  var /= (cfg.batch_count - 1);
  out.standard_errors = (var / cfg.batch_count).cwiseSqrt();
  out.v_hat = 0.5 * (out.v_hat + out.v_hat.transpose()).eval();
  return out;
}

}  // namespace memcav
