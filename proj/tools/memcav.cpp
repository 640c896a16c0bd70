#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "memcav/constants.hpp"
#include "memcav/gaussian_steady_state.hpp"
#include "memcav/mode_coupling.hpp"
#include "memcav/operating_point.hpp"
#include "memcav/scenario.hpp"
#include "memcav/spectra.hpp"
#include "memcav/sweep.hpp"

using namespace memcav;

namespace {

struct Common {
  std::string scenario;
  std::string format;
  std::string out = "-";
  int threads = 0;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Output path, - for stdout");
  sub->add_option("--threads", c.threads, "Worker threads (default: MEMCAV_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "Random seed for stochastic runs");
}

OutputFormat chosen_format(const Common& c, const ScenarioConfig& cfg) {
  if (c.format.empty()) return cfg.format;
  return c.format == "json" ? OutputFormat::json : OutputFormat::csv;
}

void print_warnings(const Warnings& w) {
  for (const auto& m : w.messages) std::cerr << "warning: " << m << "\n";
}

Table modes_table(const ScenarioConfig& cfg, int max_index) {
  const SystemModel sys = build_system(cfg);
  const double sound = sound_speed_for(sys.mechanics.frequency, cfg.mode_j, cfg.mode_k, cfg.membrane);
  const double waist = sys.cavity.waist(sys.k0);
  Warnings w;
  const double lambda0 = longitudinal_factor_diagonal(sys.k0, sys.membrane.position, sys.membrane);
  Table t;
  t.columns = {"j", "k", "Omega [rad/s]", "theta", "lambda0", "x0 [m]", "g [rad/s]"};
  for (int j = 1; j <= max_index; ++j) {
    for (int k = 1; k <= max_index; ++k) {
      VibrationalMode vib = sys.mechanics;
      vib.index_j = j;
      vib.index_k = k;
      vib.frequency = vibrational_frequency(j, k, sys.membrane, sound);
      const double theta = transverse_overlap(j, k, sys.mode.m, sys.mode.n, sys.mode.m, sys.mode.n,
                                              waist, sys.membrane)
                               .value;
      const double g = vacuum_coupling_g(vib, sys.k0, sys.membrane.position, theta, sys.membrane,
                                         sys.cavity, &w);
      t.rows.push_back({static_cast<double>(j), static_cast<double>(k), vib.frequency, theta,
                        lambda0, vib.zero_point_length(), g});
    }
  }
  print_warnings(w);
  return t;
}

Table finesse_table(const ScenarioConfig& cfg, int points) {
  const SystemModel sys = build_system(cfg);
  const double period = kPi / sys.k0;
  Table t;
  t.columns = {"z0 [m]", "shift [rad/s]", "kappa1 [rad/s]", "finesse_total", "finesse_ratio"};
  for (int i = 0; i < points; ++i) {
    const double z = -0.5 * period + period * i / std::max(1, points - 1);
    const ComplexShift s = frequency_shift(z, sys.k0, sys.mode, sys.membrane, sys.cavity);
    const double ft = total_finesse(z, sys.k0, sys.mode, sys.membrane, sys.cavity);
    t.rows.push_back({z, s.real_part, std::abs(s.imag_part), ft, ft / sys.cavity.finesse});
  }
  return t;
}

Table steady_state_table(const ScenarioConfig& cfg) {
  const SystemModel sys = build_system(cfg);
  Warnings w;
  const auto branches = solve_steady_state(sys, build_drive(cfg, sys), &w);
  print_warnings(w);
  Table t;
  t.columns = {"q_s", "alpha_s", "laser_offset [rad/s]", "Delta [rad/s]", "G [rad/s]",
               "Gamma [rad/s]", "h [rad/s]", "kappa1 [rad/s]", "kappaT [rad/s]", "n0",
               "stable"};
  for (const auto& op : branches) {
    t.rows.push_back({op.q_s, op.alpha_s, op.laser_offset, op.Delta, op.G, op.Gamma, op.h,
                      op.kappa1, op.kappaT, op.n0, std::string(op.stable ? "1" : "0")});
  }
  return t;
}

Table covariance_table(const ScenarioConfig& cfg) {
  const SystemModel sys = build_system(cfg);
  Warnings w;
  const OperatingPoint op = operating_point(sys, build_drive(cfg, sys), &w);
  const StabilityReport st = stability_conditions(op, sys.mechanics);
  Table t;
  t.columns = {"quantity", "value"};
  t.rows.push_back({std::string("s0"), st.s0});
  t.rows.push_back({std::string("s1"), st.s1});
  t.rows.push_back({std::string("s2"), st.s2});
  const CovarianceState cs = stationary_state(op, sys.mechanics, &w);
  print_warnings(w);
  const char* names = "qpXY";
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      t.rows.push_back({std::string("V_") + names[i] + names[j], cs.v(i, j)});
    }
  }
  t.rows.push_back({std::string("n"), cs.occupancy_n});
  t.rows.push_back({std::string("n_approx"), approximate_occupancy(op, sys.mechanics)});
  t.rows.push_back({std::string("log_negativity"), cs.log_negativity});
  t.rows.push_back({std::string("lyapunov_residual"), cs.residual});
  return t;
}

Table spectrum_table(const ScenarioConfig& cfg, int points, double span, bool coth) {
  const SystemModel sys = build_system(cfg);
  const OperatingPoint op = operating_point(sys, build_drive(cfg, sys));
  const double om = sys.mechanics.frequency;
  const ThermalModel model = coth ? ThermalModel::coth_exact : ThermalModel::markovian;
  Table t;
  t.columns = {"omega [rad/s]", "S_th [rad/s]", "S_rp [rad/s]", "S_abs [rad/s]", "S_q [s]",
               "|chi_eff|"};
  for (int i = 0; i < points; ++i) {
    const double w = span * om * i / std::max(1, points - 1);
    const SpectrumSample s = noise_spectra(w, op, sys.mechanics, model);
    t.rows.push_back({w, s.s_th, s.s_rp, s.s_abs, s.s_q, std::abs(s.chi_eff)});
  }
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membrane-in-the-middle optomechanics: steady states, covariance and sweeps"};
  app.require_subcommand(1);

  Common common;
  int max_index = 3;
  int finesse_points = 201;
  int spectrum_points = 401;
  double spectrum_span = 3.0;
  std::string thermal = "markovian";
  double decay_times = 10000.0;

  auto* modes = app.add_subcommand("modes", "Drum modes with overlap and vacuum coupling");
  add_common(modes, common);
  modes->add_option("--max-index", max_index, "Largest drum index j, k")->check(CLI::PositiveNumber);

  auto* finesse = app.add_subcommand("finesse", "Frequency shift and finesse over one period in z0");
  add_common(finesse, common);
  finesse->add_option("--points", finesse_points, "Number of positions")->check(CLI::PositiveNumber);

  auto* steady = app.add_subcommand("steady-state", "All classical steady-state branches");
  add_common(steady, common);

  auto* cov = app.add_subcommand("covariance", "Stationary covariance matrix, n and E_N");
  add_common(cov, common);

  auto* spectrum = app.add_subcommand("spectrum", "Noise spectra and displacement spectrum");
  add_common(spectrum, common);
  spectrum->add_option("--points", spectrum_points, "Frequency samples")->check(CLI::PositiveNumber);
  spectrum->add_option("--span", spectrum_span, "Largest frequency in units of Omega_m")
      ->check(CLI::PositiveNumber);
  spectrum->add_option("--thermal", thermal, "Thermal noise model")
      ->check(CLI::IsMember({"markovian", "coth"}));

  auto* sweep = app.add_subcommand("sweep", "Run the scenario's parameter sweep");
  add_common(sweep, common);

  auto* ver = app.add_subcommand("verify", "Check the covariance against a stochastic simulation");
  add_common(ver, common);
  ver->add_option("--decay-times", decay_times, "Simulated time in slowest-decay units")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ScenarioConfig cfg = load_scenario(common.scenario);
    const OutputFormat fmt = chosen_format(common, cfg);
    if (*modes) {
      emit(modes_table(cfg, max_index), fmt, common.out);
    } else if (*finesse) {
      emit(finesse_table(cfg, finesse_points), fmt, common.out);
    } else if (*steady) {
      emit(steady_state_table(cfg), fmt, common.out);
    } else if (*cov) {
      emit(covariance_table(cfg), fmt, common.out);
    } else if (*spectrum) {
      emit(spectrum_table(cfg, spectrum_points, spectrum_span, thermal == "coth"), fmt, common.out);
    } else if (*sweep) {
      emit(sweep_table(run_sweep(cfg, common.threads), cfg.sweep.axis), fmt, common.out);
    } else if (*ver) {
      VerifyOptions opt;
      opt.seed = common.seed;
      opt.threads = common.threads > 0 ? common.threads : default_thread_count();
      opt.decay_times = decay_times;
      const VerifyReport rep = verify(cfg, opt);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      Table t;
      t.columns = {"i", "j", "lyapunov", "empirical", "standard_error", "z", "pass"};
      for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
          const bool ok = std::abs(rep.z_scores(i, j)) <= opt.sigma_threshold;
          t.rows.push_back({static_cast<double>(i), static_cast<double>(j), rep.lyapunov(i, j),
                            rep.empirical(i, j), rep.standard_errors(i, j), rep.z_scores(i, j),
                            std::string(ok ? "1" : "0")});
        }
      }
      emit(t, fmt, common.out);
      std::cerr << (rep.passed ? "verify: PASS" : "verify: FAIL") << " (" << rep.samples
                << " samples)\n";
      return rep.passed ? 0 : 1;
    }
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const PhysicsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
