#include "memcav/operating_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "memcav/constants.hpp"
#include "memcav/gaussian_steady_state.hpp"

namespace memcav {

namespace {

constexpr int kScanPoints = 10000;

double laser_frequency_for(const SystemModel& sys, double offset) {
  return sys.bare_frequency() + offset;
}

double drive_squared(double power, double kappa0, double omega_l) {
  return 2.0 * power * kappa0 / (kHbar * omega_l);
}

template <class F>
std::vector<double> bracket_roots(F&& f, double qmax) {
  std::vector<double> roots;
  const double step = 2.0 * qmax / kScanPoints;
  double a = -qmax;
  double fa = f(a);
  auto tol = [](double x, double y) {
    return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  std::max({std::abs(x), std::abs(y), 1e-300});
  };
  for (int i = 1; i <= kScanPoints; ++i) {
    const double b = (i == kScanPoints) ? qmax : -qmax + i * step;
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      auto r = boost::math::tools::bisect(f, a, b, tol);
      roots.push_back(0.5 * (r.first + r.second));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  return roots;
}

}  // namespace

double SystemModel::bare_frequency() const { return kSpeedOfLight * k0; }

void SystemModel::validate() const {
  cavity.validate();
  membrane.validate();
  mechanics.validate();
  if (!(k0 > 0.0)) throw InvalidParameter("driven mode wavenumber must be positive");
  if (!(temperature >= 0.0)) throw InvalidParameter("temperature must be non-negative");
}

SystemModel make_system(const CavityGeometry& cavity, const MembraneSlab& membrane,
                        const VibrationalMode& mechanics, double temperature, int m, int n, bool exact_resonance) {
  SystemModel sys;
  sys.cavity = cavity;
  sys.membrane = membrane;
  sys.mechanics = mechanics;
  sys.temperature = temperature;
  sys.mode.m = m;
  sys.mode.n = n;
  sys.mode.p = nearest_longitudinal_index(cavity.laser_wavenumber(), sys.mode.transverse_order(),
                                          cavity);
  sys.k0 = exact_resonance ? empty_mode_frequency(sys.mode, cavity) / kSpeedOfLight
                          : cavity.laser_wavenumber();
  sys.validate();
  return sys;
}

DriveParams DriveParams::fixed(double power, double offset) {
  DriveParams d;
  d.input_power = power;
  d.laser_offset = offset;
  d.mode = DetuningMode::fixed_laser_frequency;
  return d;
}

DriveParams DriveParams::target(double power, double detuning) {
  DriveParams d;
  d.input_power = power;
  d.target_detuning = detuning;
  d.mode = DetuningMode::target_detuning;
  return d;
}

FrequencyDerivatives position_dependent_frequency(double q, const SystemModel& sys,
                                                  Warnings* warnings) {
  const double x0 = sys.mechanics.zero_point_length();
  const double z = sys.membrane.position + x0 * q;
  const ShiftPhase ph = shift_phase(z, sys.k0, sys.mode, sys.membrane, warnings);
  const double scale = kSpeedOfLight / sys.cavity.length;

  FrequencyDerivatives out;
  out.shift = scale * ph.value.real();
  out.dq = x0 * scale * ph.d_dz.real();
  out.d2q = x0 * x0 * scale * ph.d2_dz2.real();
  if (sys.membrane.n_imag != 0.0) {
    const double im = ph.value.imag();
    out.kappa1 = scale * std::abs(im);
    out.dq_kappa1 = x0 * scale * (im < 0.0 ? -1.0 : 1.0) * ph.d_dz.imag();
  }
  return out;
}

double thermal_occupancy(double omega, double temperature) {
  if (temperature < 0.0) throw InvalidParameter("temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

OperatingPoint linearization_coefficients(OperatingPoint op, const SystemModel& sys) {
  const FrequencyDerivatives fd = position_dependent_frequency(op.q_s, sys);
  op.kappa0 = sys.cavity.kappa0();
  op.kappa1 = fd.kappa1;
  op.kappaT = op.kappa0 + op.kappa1;
  op.dq_omega = fd.dq;
  op.d2q_omega = fd.d2q;
  op.dq_kappa1 = fd.dq_kappa1;
  op.shift = fd.shift;
  op.Delta = fd.shift - op.laser_offset;
  op.G = -fd.dq * op.alpha_s * std::sqrt(2.0);
  op.Gamma = std::sqrt(2.0) * fd.dq_kappa1 * op.alpha_s;
  op.h = fd.d2q * op.alpha_s * op.alpha_s;
  op.temperature = sys.temperature;
  op.n0 = thermal_occupancy(sys.mechanics.frequency, sys.temperature);
  op.stable = stability_conditions(op, sys.mechanics).stable;
  return op;
}

double coupling_from_power(const OperatingPoint& op) {
  const double kt = op.kappa0 + op.kappa1;
  return -2.0 * op.dq_omega *
         std::sqrt(op.input_power * op.kappa0 /
                   (kHbar * op.laser_frequency * (kt * kt + op.Delta * op.Delta)));
}

std::vector<OperatingPoint> solve_steady_state(const SystemModel& sys, const DriveParams& drive,
                                               Warnings* warnings) {
  sys.validate();
  if (!(drive.input_power >= 0.0)) throw InvalidParameter("input power must be non-negative");
  const double omega_m = sys.mechanics.frequency;
  const double kappa0 = sys.cavity.kappa0();
  const bool target = drive.mode == DetuningMode::target_detuning;
  const double power = drive.input_power;

  // Frequency shift at the unloaded position fixes the scan scale and surfaces
  // optics warnings once.
  const FrequencyDerivatives at_rest = position_dependent_frequency(0.0, sys, warnings);

  auto offset_at = [&](const FrequencyDerivatives& fd) {
    return target ? fd.shift - drive.target_detuning : drive.laser_offset;
  };
  auto photons = [&](const FrequencyDerivatives& fd) {
    const double offset = offset_at(fd);
    const double omega_l = laser_frequency_for(sys, offset);
    const double det = fd.shift - offset;
    const double kt = kappa0 + fd.kappa1;
    return drive_squared(power, kappa0, omega_l) / (kt * kt + det * det);
  };

  std::vector<double> roots;
  if (power == 0.0) {
    roots.push_back(0.0);
  } else {
    auto force = [&](double q) {
      const FrequencyDerivatives fd = position_dependent_frequency(q, sys);
      return omega_m * q + fd.dq * photons(fd);
    };
    const double e2 = drive_squared(power, kappa0, laser_frequency_for(sys, offset_at(at_rest)));
    const double qmax = std::max(10.0, 4.0 * std::abs(at_rest.dq) * e2 / (omega_m * kappa0 * kappa0));
    roots = bracket_roots(force, qmax);
    if (roots.empty()) {
      std::ostringstream os;
      os << "no steady state found on |q| <= " << qmax;
      throw ConvergenceFailure(os.str());
    }
  }

  std::vector<OperatingPoint> out;
  for (double q : roots) {
    const FrequencyDerivatives fd = position_dependent_frequency(q, sys);
    OperatingPoint op;
    op.q_s = q;
    op.input_power = power;
    op.laser_offset = offset_at(fd);
    op.laser_frequency = laser_frequency_for(sys, op.laser_offset);
    op.drive_E = std::sqrt(drive_squared(power, kappa0, op.laser_frequency));
    op.alpha_s = std::sqrt(photons(fd));
    out.push_back(linearization_coefficients(op, sys));
  }
  std::sort(out.begin(), out.end(), [](const OperatingPoint& a, const OperatingPoint& b) {
    return std::abs(a.q_s) < std::abs(b.q_s);
  });

  if (power > 0.0) {
    for (const auto& op : out) {
      if (op.alpha_s < 100.0) {
        std::ostringstream os;
        os << "intracavity amplitude alpha_s = " << op.alpha_s
           << " is small; the linearized description may not hold";
        warn(warnings, os.str());
        break;
      }
    }
  }
  return out;
}

const OperatingPoint& select_branch(const std::vector<OperatingPoint>& branches) {
  if (branches.empty()) throw InvalidParameter("no steady-state branch to select from");
  for (const auto& op : branches) {
    if (op.stable) return op;
  }
  return branches.front();
}

OperatingPoint operating_point(const SystemModel& sys, const DriveParams& drive,
                               Warnings* warnings) {
  return select_branch(solve_steady_state(sys, drive, warnings));
}

}  // namespace memcav
