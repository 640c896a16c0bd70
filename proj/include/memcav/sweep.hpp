#pragma once

// Parameter sweeps over a scenario, tabular output and the stochastic
// cross-check of the covariance matrix.

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "memcav/gaussian_steady_state.hpp"
#include "memcav/scenario.hpp"

namespace memcav {

struct SweepRow {
  double axis_value = 0.0;
  double z0 = 0.0;
  double q_s = 0.0;
  double alpha_s_sq = 0.0;
  double Delta = 0.0;
  double G = 0.0;
  double Gamma = 0.0;
  double h = 0.0;
  double kappa1 = 0.0;
  double kappaT = 0.0;
  double finesse_total = 0.0;
  bool stable = false;
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double n_lyapunov = 0.0;
  double n_approx = 0.0;
  double log_negativity = 0.0;
  std::string note;
};

/// Evaluates one point; physics failures land in row.note and NaN fields.
SweepRow evaluate_point(const ScenarioConfig& cfg, double axis_value);

/// Honours MEMCAV_THREADS, else the hardware concurrency.
int default_thread_count();

/// One row per axis value, in axis order, evaluated by a worker pool.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, int threads = 0);
std::vector<SweepRow> run_points(const ScenarioConfig& cfg, const std::vector<double>& values,
                                 int threads = 0);

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

Table sweep_table(const std::vector<SweepRow>& rows, SweepAxis axis);
std::vector<SweepRow> rows_from_table(const std::vector<std::vector<std::string>>& records);

/// %.17g, or "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);
double parse_number(const std::string& s);

std::string to_csv(const Table& t);
std::string to_json(const Table& t);
/// RFC-4180 records, header included.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

void emit(const Table& t, OutputFormat format, const std::string& path);

struct VerifyOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  double decay_times = 10000.0;
  double sigma_threshold = 3.0;
  // Test hook applied to the drift used by the simulation only.
  std::function<void(Matrix4&)> drift_tamper;
};

struct VerifyReport {
  Matrix4 lyapunov = Matrix4::Zero();
  Matrix4 empirical = Matrix4::Zero();
  Matrix4 standard_errors = Matrix4::Zero();
  Matrix4 z_scores = Matrix4::Zero();
  long long samples = 0;
  bool passed = false;
  std::vector<std::string> warnings;
};

VerifyReport verify(const ScenarioConfig& cfg, const VerifyOptions& options = {});

}  // namespace memcav
