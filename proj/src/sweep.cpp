#include "memcav/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "memcav/sde_oracle.hpp"
#include "memcav/spectra.hpp"

namespace memcav {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& row_columns() {
  static const std::vector<std::string> cols = {
      "z0 [m]",          "q_s",               "alpha_s^2",       "Delta [rad/s]",
      "G [rad/s]",       "Gamma [rad/s]",     "h [rad/s]",       "kappa1 [rad/s]",
      "kappaT [rad/s]",  "finesse_total",     "stable",          "s0 [rad^3/s^3]",
      "s1 [rad^6/s^6]",  "s2 [rad^3/s^3]",    "n_lyapunov",      "n_approx",
      "log_negativity",  "note"};
  return cols;
}

void append_note(std::string& note, const std::string& msg) {
  if (!note.empty()) note += "; ";
  note += msg;
}

std::string violated(const StabilityReport& r) {
  std::string out = "unstable:";
  if (!(r.s0 > 0.0)) out += " s0<=0";
  if (!(r.s1 > 0.0)) out += " s1<=0";
  if (!(r.s2 > 0.0)) out += " s2<=0";
  return out;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

}  // namespace

SweepRow evaluate_point(const ScenarioConfig& cfg, double axis_value) {
  SweepRow row;
  row.axis_value = axis_value;
  row.z0 = row.q_s = row.alpha_s_sq = row.Delta = row.G = row.Gamma = row.h = kNaN;
  row.kappa1 = row.kappaT = row.finesse_total = row.s0 = row.s1 = row.s2 = kNaN;
  row.n_lyapunov = row.n_approx = row.log_negativity = kNaN;
  try {
    const ScenarioConfig point = with_axis_value(cfg, cfg.sweep.axis, axis_value);
    const SystemModel sys = build_system(point);
    Warnings warnings;
    row.z0 = sys.membrane.position;
    row.finesse_total =
        total_finesse(sys.membrane.position, sys.k0, sys.mode, sys.membrane, sys.cavity, &warnings);
    const auto branches = solve_steady_state(sys, build_drive(point, sys), &warnings);
    const OperatingPoint& op = select_branch(branches);
    if (branches.size() > 1) {
      append_note(row.note, std::to_string(branches.size()) + " steady-state branches");
    }
    row.q_s = op.q_s;
    row.alpha_s_sq = op.alpha_s * op.alpha_s;
    row.Delta = op.Delta;
    row.G = op.G;
    row.Gamma = op.Gamma;
    row.h = op.h;
    row.kappa1 = op.kappa1;
    row.kappaT = op.kappaT;
    const StabilityReport st = stability_conditions(op, sys.mechanics);
    row.s0 = st.s0;
    row.s1 = st.s1;
    row.s2 = st.s2;
    row.stable = st.stable;
    if (st.stable) {
      try {
        const CovarianceState cs = stationary_state(op, sys.mechanics, &warnings);
        row.n_lyapunov = cs.occupancy_n;
        row.log_negativity = cs.log_negativity;
      } catch (const PhysicsError& e) {
        append_note(row.note, e.what());
      }
    } else {
      append_note(row.note, violated(st));
    }
    try {
      row.n_approx = approximate_occupancy(op, sys.mechanics, &warnings);
    } catch (const PhysicsError& e) {
      append_note(row.note, std::string("n_approx: ") + e.what());
    }
    for (const auto& w : warnings.messages) append_note(row.note, "warning: " + w);
  } catch (const std::exception& e) {
    append_note(row.note, e.what());
  }
  return row;
}

int default_thread_count() {
  if (const char* env = std::getenv("MEMCAV_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<SweepRow> run_points(const ScenarioConfig& cfg, const std::vector<double>& values,
                                 int threads) {
  std::vector<SweepRow> rows(values.size());
  const int workers = std::max(
      1, std::min<int>(threads > 0 ? threads : default_thread_count(), static_cast<int>(values.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      rows[i] = evaluate_point(cfg, values[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.sweep.axis == SweepAxis::none) return run_points(cfg, {0.0}, 1);
  return run_points(cfg, cfg.sweep.values(), threads);
}

Table sweep_table(const std::vector<SweepRow>& rows, SweepAxis axis) {
  Table t;
  t.columns.push_back(axis_label(axis));
  for (const auto& c : row_columns()) t.columns.push_back(c);
  for (const auto& r : rows) {
    t.rows.push_back({r.axis_value, r.z0, r.q_s, r.alpha_s_sq, r.Delta, r.G, r.Gamma, r.h,
                      r.kappa1, r.kappaT, r.finesse_total, std::string(r.stable ? "1" : "0"),
                      r.s0, r.s1, r.s2, r.n_lyapunov, r.n_approx, r.log_negativity, r.note});
  }
  return t;
}

std::vector<SweepRow> rows_from_table(const std::vector<std::vector<std::string>>& records) {
  std::vector<SweepRow> rows;
  const std::size_t width = row_columns().size() + 1;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != width) {
      throw std::runtime_error("sweep table row " + std::to_string(i) + " has " +
                               std::to_string(f.size()) + " fields, expected " +
                               std::to_string(width));
    }
    SweepRow r;
    double* numeric[] = {&r.axis_value, &r.z0, &r.q_s, &r.alpha_s_sq, &r.Delta, &r.G,
                         &r.Gamma,      &r.h,  &r.kappa1, &r.kappaT, &r.finesse_total};
    for (int k = 0; k < 11; ++k) *numeric[k] = parse_number(f[k]);
    r.stable = f[11] == "1";
    r.s0 = parse_number(f[12]);
    r.s1 = parse_number(f[13]);
    r.s2 = parse_number(f[14]);
    r.n_lyapunov = parse_number(f[15]);
    r.n_approx = parse_number(f[16]);
    r.log_negativity = parse_number(f[17]);
    r.note = f[18];
    rows.push_back(r);
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error("not a number: '" + s + "'");
  }
  return v;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      if (const double* d = std::get_if<double>(&row[i])) {
        if (std::isfinite(*d)) obj[t.columns[i]] = *d;
        else obj[t.columns[i]] = format_number(*d);
      } else {
        obj[t.columns[i]] = std::get<std::string>(row[i]);
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      record.push_back(field);
      field.clear();
      field_started = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(field);
      records.push_back(record);
      record.clear();
      field.clear();
      field_started = false;
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(field);
    records.push_back(record);
  }
  return records;
}

void emit(const Table& t, OutputFormat format, const std::string& path) {
  const std::string text = format == OutputFormat::csv ? to_csv(t) : to_json(t);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

VerifyReport verify(const ScenarioConfig& cfg, const VerifyOptions& options) {
  if (cfg.sweep.axis != SweepAxis::none) {
    throw InvalidParameter("verify needs a single-point scenario (no [sweep] section)");
  }
  cfg.validate();
  const SystemModel sys = build_system(cfg);
  Warnings warnings;
  const OperatingPoint op = operating_point(sys, build_drive(cfg, sys), &warnings);
  const Matrix4 a = build_drift(op, sys.mechanics);
  const Matrix4 d = build_diffusion(op, sys.mechanics);

  VerifyReport rep;
  rep.lyapunov = solve_lyapunov(a, d, &warnings).v;

  Matrix4 a_sim = a;
  if (options.drift_tamper) options.drift_tamper(a_sim);
  SimulationConfig sim = default_simulation_config(a, options.seed, options.decay_times);
  sim.threads = options.threads;
  const EmpiricalCovariance emp = simulate(a_sim, d, sim, &warnings);
  rep.empirical = emp.v_hat;
  rep.standard_errors = emp.standard_errors;
  rep.samples = emp.samples;

  rep.passed = true;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double diff = emp.v_hat(i, j) - rep.lyapunov(i, j);
      const double se = emp.standard_errors(i, j);
      double z = 0.0;
      if (se > 0.0) z = diff / se;
      else if (std::abs(diff) > 1e-12) z = std::numeric_limits<double>::infinity();
      rep.z_scores(i, j) = z;
      if (!(std::abs(z) <= options.sigma_threshold)) rep.passed = false;
    }
  }
  rep.warnings = warnings.messages;
  return rep;
}

}  // namespace memcav
