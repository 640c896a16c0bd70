#include "memcav/mode_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>


#include "memcav/constants.hpp"
#include "quadrature.hpp"

namespace memcav {

namespace {

constexpr double kSingularTolerance = 1e-12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double checked_denominator(double value, const char* what) {
  if (std::abs(value) < kSingularTolerance) {
    std::ostringstream os;
    os << "longitudinal factor: " << what << " vanishes (" << value << ")";
    throw SingularConfiguration(os.str());
  }
  return value;
}

}  // namespace

double VibrationalMode::zero_point_length() const {
  return std::sqrt(kHbar / (effective_mass * frequency));
}

void VibrationalMode::validate() const {
  if (index_j < 1 || index_k < 1) throw InvalidParameter("drum mode indices must be >= 1");
  if (!(frequency > 0.0)) throw InvalidParameter("mechanical frequency must be positive");
  if (!(effective_mass > 0.0)) throw InvalidParameter("effective mass must be positive");
  if (!(quality > 1.0)) throw InvalidParameter("mechanical quality factor must exceed 1");
}

double vibrational_frequency(int j, int k, const MembraneSlab& mem, double sound_speed) {
  if (j < 1 || k < 1) throw InvalidParameter("drum mode indices must be >= 1");
  if (!(sound_speed > 0.0)) throw InvalidParameter("sound speed must be positive");
  if (!(mem.side > 0.0)) throw InvalidParameter("membrane side must be positive");
  return (sound_speed * kPi / mem.side) * std::sqrt(static_cast<double>(j * j + k * k));
}

double sound_speed_for(double frequency, int j, int k, const MembraneSlab& mem) {
  if (j < 1 || k < 1) throw InvalidParameter("drum mode indices must be >= 1");
  return frequency * mem.side / (kPi * std::sqrt(static_cast<double>(j * j + k * k)));
}

double mode_shape_phi(int j, int k, double x, double y, const MembraneSlab& mem) {
  const double half = 0.5 * mem.side;
  if (std::abs(x) > half * (1.0 + 1e-14) || std::abs(y) > half * (1.0 + 1e-14)) {
    throw InvalidParameter("mode shape evaluated outside the membrane");
  }
  const double d = mem.side;
  return (2.0 / d) * std::sin(j * kPi * x / d + j * kPi / 2.0) *
         std::sin(k * kPi * y / d + k * kPi / 2.0);
}

double hermite(int order, double x) {
  if (order < 0) throw InvalidParameter("Hermite order must be non-negative");
  if (order == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int n = 1; n < order; ++n) {
    const double next = 2.0 * x * cur - 2.0 * n * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double transverse_pattern(int m, int n, double x, double y, double waist) {
  const double norm = waist * std::sqrt(kPi * std::pow(2.0, n + m - 1) * factorial(n) * factorial(m));
  const double sx = std::sqrt(2.0) * x / waist;
  const double sy = std::sqrt(2.0) * y / waist;
  return hermite(n, sx) * hermite(m, sy) * std::exp(-(x * x + y * y) / (waist * waist)) / norm;
}

OverlapResult transverse_overlap(int vib_j, int vib_k, int opt1_m, int opt1_n, int opt2_m,
                                 int opt2_n, double waist, const MembraneSlab& mem,
                                 double tolerance) {
  if (!(waist > 0.0)) throw InvalidParameter("waist must be positive");
  const double half = 0.5 * mem.side;

  // Break the interval where the Gaussian lives so the adaptive rule cannot
  // step over a narrow beam. Beyond 10 waists the optical product is below
  // exp(-200) and is dropped.
  const double reach = std::min(half, 10.0 * waist);
  std::vector<double> cuts{-reach, reach, 0.0};
  for (double f : {1.0, 3.0, 6.0}) {
    const double c = f * waist;
    if (c < reach) {
      cuts.push_back(c);
      cuts.push_back(-c);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  // Split the absolute budget so inner and outer errors together stay a small
  // fraction of the requested tolerance on Theta.
  const double outer_tol = 1e-2 * tolerance / half;
  const double inner_tol = outer_tol / (2.0 * reach);
  double inner_error = 0.0;
  auto integrate_pieces = [&](auto&& f, double abs_tol, double& err_out) {
    double sum = 0.0;
    const double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const auto r = detail::integrate_adaptive<21>(f, cuts[i], cuts[i + 1], piece_tol, 1e-13, 8);
      sum += r.value;
      err_out += r.error;
    }
    return sum;
  };

  auto inner = [&](double x) {
    auto fy = [&](double y) {
      // Product of the optical patterns first, so swapping them is exact.
      const double optical = transverse_pattern(opt1_m, opt1_n, x, y, waist) *
                             transverse_pattern(opt2_m, opt2_n, x, y, waist);
      return mode_shape_phi(vib_j, vib_k, x, y, mem) * optical;
    };
    double err = 0.0;
    const double v = integrate_pieces(fy, inner_tol, err);
    inner_error = std::max(inner_error, err);
    return v;
  };
  double outer_err = 0.0;
  const double integral = integrate_pieces(inner, outer_tol, outer_err);

  OverlapResult out;
  out.value = 0.5 * mem.side * integral;
  out.error = half * (outer_err + 2.0 * reach * inner_error);
  if (!(out.error <= tolerance)) {
    std::ostringstream os;
    os << "transverse overlap did not converge: achieved error " << out.error
       << " > tolerance " << tolerance;
    throw ConvergenceFailure(os.str());
  }
  return out;
}

double longitudinal_factor_diagonal(double k, double z0, const MembraneSlab& mem) {
  if (!(k > 0.0)) throw InvalidParameter("wavenumber must be positive");
  const double r = membrane_reflectivity_real(k, mem);
  const double s = std::sin(2.0 * k * z0);
  const double c = std::cos(2.0 * k * z0);
  return s * std::sqrt(r / (1.0 - r * c * c));
}

double longitudinal_factor_general(double k_first, double k_second, double z0,
                                   const MembraneSlab& mem, const CavityGeometry& cav,
                                   const ModeIndices& idx) {
  if (!(k_first > 0.0) || !(k_second > 0.0)) throw InvalidParameter("wavenumbers must be positive");
  if (mem.thickness == 0.0) return 0.0;
  cav.validate();

  const double n = mem.n_real;
  const double ld = mem.thickness;
  const double gouy = idx.transverse_order() * cav.gouy_phase();
  auto phi0 = [&](double k) { return k * cav.length - gouy; };
  auto s_of = [&](double k) {
    const double den = checked_denominator(std::sin(phi0(k) - k * ld), "sin[Phi0(k) - k L_d]");
    return std::sin(2.0 * k * z0) * std::sin(n * k * ld) / den;
  };
  auto root_term = [&](double s) {
    if (std::abs(s) > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "longitudinal factor: |s(k)| = " << std::abs(s)
         << " > 1, wavenumber is not a loaded-cavity resonance";
      throw SingularConfiguration(os.str());
    }
    return 1.0 + std::sqrt(std::max(0.0, 1.0 - s * s));
  };

  const double kl = k_first;
  const double km = k_second;
  const double sl = s_of(kl);
  const double sm = checked_denominator(s_of(km), "s(k)");
  const double rl = membrane_reflectivity_real(kl, mem);
  const double rm = membrane_reflectivity_real(km, mem);
  const double cl = std::cos(2.0 * kl * z0);
  const double cm = std::cos(2.0 * km * z0);

  const double lead = kl / (kl + km) * std::sin(0.5 * n * (kl + km) * ld) * std::sin(2.0 * km * z0) /
                      checked_denominator(std::sin(n * kl * ld), "sin(n k L_d)");
  const double phase_ratio = std::sin(phi0(kl) - kl * ld) / std::sin(phi0(km) - km * ld);
  const double amp = phase_ratio * root_term(sl) / root_term(sm);
  if (amp < 0.0) throw SingularConfiguration("longitudinal factor: negative amplitude ratio");
  const double refl = std::pow(rl * rm / ((1.0 - rm * cm * cm) * (1.0 - rl * cl * cl)), 0.25);
  const double tail = 1.0 + (sl / sm) * root_term(sm) / root_term(sl);
  return lead * std::sqrt(amp) * refl * tail;
}

double vacuum_coupling_g(const VibrationalMode& vib, double k0, double z0, double theta,
                         const MembraneSlab& mem, const CavityGeometry& cav, Warnings* warnings) {
  vib.validate();
  cav.validate();
  const double lambda0 = longitudinal_factor_diagonal(k0, z0, mem);
  if (std::abs(std::sin(2.0 * k0 * z0)) < 1e-9) {
    warn(warnings,
         "membrane at a field node or antinode: linear coupling vanishes and the interaction is "
         "dispersive");
  }
  const double omega0 = kSpeedOfLight * k0;
  return (2.0 * omega0 / cav.length) * vib.zero_point_length() * theta * lambda0;
}

double max_coupling_position(double k0) { return kPi / (4.0 * k0); }

}  // namespace memcav
