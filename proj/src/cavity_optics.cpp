#include "memcav/cavity_optics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "memcav/constants.hpp"

namespace memcav {

namespace {

using cplx = std::complex<double>;

constexpr double kBranchTolerance = 1e-9;

// Integer part of Re(n k L_d)/pi; selects the arcsin sheet of the shift.
int slab_branch(double k, const MembraneSlab& mem) {
  return static_cast<int>(std::floor(mem.n_real * k * mem.thickness / kPi));
}

double parity_sign(int j) { return (j % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

double CavityGeometry::stability_parameter() const {
  if (planar) return 1.0;
  return 1.0 - length / curvature;
}

double CavityGeometry::gouy_phase() const {
  if (planar) return 0.0;
  return std::acos(stability_parameter());
}

double CavityGeometry::rayleigh_range() const {
  if (planar) return std::numeric_limits<double>::infinity();
  const double g = stability_parameter();
  return 0.5 * length * std::sqrt((1.0 + g) / (1.0 - g));
}

double CavityGeometry::waist(double k) const {
  return std::sqrt(2.0 * rayleigh_range() / k);
}

double CavityGeometry::kappa0() const { return kPi * kSpeedOfLight / (2.0 * length * finesse); }

double CavityGeometry::laser_wavenumber() const { return 2.0 * kPi / wavelength; }

void CavityGeometry::validate() const {
  if (!(length > 0.0)) throw InvalidGeometry("cavity length must be positive");
  if (!(finesse > 0.0)) throw InvalidGeometry("cavity finesse must be positive");
  if (!(wavelength > 0.0)) throw InvalidGeometry("laser wavelength must be positive");
  if (planar) return;
  if (!(curvature != 0.0) || !std::isfinite(curvature)) {
    throw InvalidGeometry("mirror curvature must be finite and nonzero unless planar");
  }
  const double g = stability_parameter();
  if (!(g > -1.0 && g < 1.0)) {
    std::ostringstream os;
    os << "unstable resonator: g = 1 - L/R = " << g << " outside (-1, 1)";
    throw InvalidGeometry(os.str());
  }
}

void MembraneSlab::validate() const {
  if (!(n_real > 1.0)) throw InvalidParameter("membrane n_real must exceed 1");
  if (!(n_imag >= 0.0)) throw InvalidParameter("membrane n_imag must be non-negative");
  if (!(n_imag < 0.1 * n_real)) throw InvalidParameter("membrane n_imag must be small compared to n_real");
  if (!(thickness >= 0.0)) throw InvalidParameter("membrane thickness must be non-negative");
  if (!(side > 0.0)) throw InvalidParameter("membrane side must be positive");
  if (!(surface_density > 0.0)) throw InvalidParameter("membrane surface_density must be positive");
}

double empty_mode_frequency(const ModeIndices& idx, const CavityGeometry& cav) {
  cav.validate();
  if (idx.p < 1) throw InvalidParameter("longitudinal index p must be >= 1");
  if (idx.m < 0 || idx.n < 0) throw InvalidParameter("transverse indices must be non-negative");
  return (kSpeedOfLight * kPi / cav.length) *
         (idx.p + idx.transverse_order() * cav.gouy_phase() / kPi);
}

int nearest_longitudinal_index(double k, int transverse_order, const CavityGeometry& cav) {
  cav.validate();
  const double p = (k * cav.length - transverse_order * cav.gouy_phase()) / kPi;
  return std::max(1, static_cast<int>(std::lround(p)));
}

std::complex<double> membrane_reflectivity(double k, const MembraneSlab& mem) {
  const cplx n = mem.index();
  const cplx n2 = n * n;
  const cplx x = n * k * mem.thickness;
  const cplx s = std::sin(x);
  const cplx c = std::cos(x);
  const cplx num = (n2 - 1.0) * (n2 - 1.0) * s * s;
  const cplx den = 4.0 * n2 * c * c + (n2 + 1.0) * (n2 + 1.0) * s * s;
  return num / den;
}

double membrane_reflectivity_real(double k, const MembraneSlab& mem) {
  MembraneSlab lossless = mem;
  lossless.n_imag = 0.0;
  return membrane_reflectivity(k, lossless).real();
}

std::complex<double> slab_phase(double k, const MembraneSlab& mem) {
  if (mem.thickness == 0.0) return {0.0, 0.0};
  const cplx n = mem.index();
  const cplx n2 = n * n;
  const cplx x = n * k * mem.thickness;
  const cplx s = std::sin(x);
  const cplx c = std::cos(x);
  // 2n cot x / sqrt(4 n^2 cot^2 x + (n^2+1)^2), multiplied through by sin x.
  // The arccos form stays on the correct sheet past n k L_d = pi/2, where the
  // equivalent arcsin expression folds back.
  cplx arg;
  if (std::abs(s) < 1e-300) {
    arg = (c.real() >= 0.0) ? 1.0 : -1.0;
  } else {
    const cplx cot = c / s;
    arg = 2.0 * n * cot / std::sqrt(4.0 * n2 * cot * cot + (n2 + 1.0) * (n2 + 1.0));
  }
  if (mem.n_imag == 0.0 && std::abs(arg.real()) > 1.0 + kBranchTolerance) {
    throw BranchAmbiguity("slab phase arccos argument outside [-1, 1]");
  }
  return std::acos(arg) - k * mem.thickness;
}

ShiftPhase shift_phase(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                       Warnings* /*warnings*/) {
  if (!(k0 > 0.0)) throw InvalidParameter("wavenumber must be positive");
  const cplx sqrt_r = std::sqrt(membrane_reflectivity(k0, mem));
  const cplx beta = slab_phase(k0, mem);
  const int j = slab_branch(k0, mem);
  const double sheet = parity_sign(j);
  const double parity = parity_sign(idx.p);

  const double arg2 = 2.0 * k0 * z0;
  const cplx u = parity * sqrt_r * std::cos(arg2);
  const cplx du = -2.0 * k0 * parity * sqrt_r * std::sin(arg2);
  const cplx d2u = -4.0 * k0 * k0 * u;
  if (mem.n_imag == 0.0 && std::abs(u.real()) > 1.0 + kBranchTolerance) {
    throw BranchAmbiguity("shift arcsin argument outside [-1, 1]");
  }
  const cplx w = std::sqrt(1.0 - u * u);

  ShiftPhase out;
  out.value = sheet * std::asin(u) - beta - static_cast<double>(j) * kPi;
  out.d_dz = sheet * du / w;
  out.d2_dz2 = sheet * (d2u / w + u * du * du / (w * w * w));
  return out;
}

namespace {

void check_rayleigh(double z0, const MembraneSlab& mem, const CavityGeometry& cav,
                    Warnings* warnings) {
  const double zr = cav.rayleigh_range();
  const double reach = std::abs(z0) + 0.5 * mem.thickness;
  if (reach > 0.1 * zr) {
    std::ostringstream os;
    os << "membrane extends to |z| = " << reach << " m, not well inside the Rayleigh range "
       << zr << " m";
    warn(warnings, os.str());
  }
}

}  // namespace

ComplexShift frequency_shift(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                             const CavityGeometry& cav, Warnings* warnings) {
  cav.validate();
  check_rayleigh(z0, mem, cav, warnings);
  const cplx phase = shift_phase(z0, k0, idx, mem, warnings).value;
  const double scale = kSpeedOfLight / cav.length;
  return {scale * phase.real(), scale * phase.imag()};
}

double absorption_rate_kappa1(double z0, double k0, const ModeIndices& idx,
                              const MembraneSlab& mem, const CavityGeometry& cav,
                              Warnings* warnings) {
  if (mem.n_imag == 0.0) {
    cav.validate();
    return 0.0;
  }
  return std::abs(frequency_shift(z0, k0, idx, mem, cav, warnings).imag_part);
}

double total_finesse(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                     const CavityGeometry& cav, Warnings* warnings) {
  cav.validate();
  check_rayleigh(z0, mem, cav, warnings);
  if (mem.n_imag == 0.0) return cav.finesse;
  // L dw / c is the bare phase; the cavity length cancels out.
  const double loss = std::abs(shift_phase(z0, k0, idx, mem).value.imag());
  return 1.0 / (1.0 / cav.finesse + (2.0 / kPi) * loss);
}

double resonance_condition(double k, double z0, const ModeIndices& idx, const MembraneSlab& mem,
                           const CavityGeometry& cav) {
  MembraneSlab lossless = mem;
  lossless.n_imag = 0.0;
  const double r = membrane_reflectivity(k, lossless).real();
  const double beta = slab_phase(k, lossless).real();
  const double phi0 = k * cav.length - idx.transverse_order() * cav.gouy_phase();
  return std::sin(phi0 + beta) - std::sqrt(r) * std::cos(2.0 * k * z0);
}

double perturbed_wavenumber(double z0, double k0, const ModeIndices& idx, const MembraneSlab& mem,
                            const CavityGeometry& cav) {
  return k0 + frequency_shift(z0, k0, idx, mem, cav).real_part / kSpeedOfLight;
}

}  // namespace memcav
