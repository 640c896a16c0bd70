#include "memcav/gaussian_steady_state.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "memcav/operating_point.hpp"

namespace memcav {

namespace {

constexpr int kUnknowns = 10;

// Upper-triangle enumeration of a symmetric 4x4 matrix.
const std::array<std::pair<int, int>, kUnknowns>& upper_pairs() {
  static const std::array<std::pair<int, int>, kUnknowns> pairs = [] {
    std::array<std::pair<int, int>, kUnknowns> p{};
    int c = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) p[c++] = {i, j};
    return p;
  }();
  return pairs;
}

}  // namespace

Matrix4 build_drift(const OperatingPoint& op, const VibrationalMode& vib) {
  const double om = vib.frequency;
  const double gm = vib.damping();
  Matrix4 a;
  a << 0.0, om, 0.0, 0.0,
      -om - op.h, -gm, op.G, 0.0,
      -op.Gamma, 0.0, -op.kappaT, op.Delta,
      op.G, 0.0, -op.Delta, -op.kappaT;
  return a;
}

Matrix4 build_diffusion(const OperatingPoint& op, const VibrationalMode& vib) {
  Matrix4 d = Matrix4::Zero();
  const double absorption_heating =
      (op.kappa1 > 0.0) ? op.Gamma * op.Gamma / (4.0 * op.kappa1) : 0.0;
  d(1, 1) = vib.damping() * (2.0 * op.n0 + 1.0) + absorption_heating;
  d(1, 3) = d(3, 1) = op.Gamma / 2.0;
  d(2, 2) = op.kappaT;
  d(3, 3) = op.kappaT;
  return d;
}

StabilityReport stability_conditions(const OperatingPoint& op, const VibrationalMode& vib) {
  const double om = vib.frequency;
  const double gm = vib.damping();
  const double kt = op.kappaT;
  const double dl = op.Delta;
  const double g = op.G;
  const double gg = op.Gamma;
  const double h = op.h;
  const double kd = kt * kt + dl * dl;
  const double base = om * om * gm + 2.0 * kt * (dl * dl + (gm + kt) * (gm + kt));

  StabilityReport r;
  r.s0 = base + h * gm * om - om * g * gg;
  r.s1 = 2.0 * gm * kt *
             ((kt * kt + (om - dl) * (om - dl)) * (kt * kt + (om + dl) * (om + dl)) +
              gm * ((gm + 2.0 * kt) * kd + 2.0 * kt * om * om)) +
         dl * om * g * g * (gm + 2.0 * kt) * (gm + 2.0 * kt) +
         base * (om * g * gg + 2.0 * h * om * kt) +
         om * (h * gm - g * gg) * (om * g * gg + 2.0 * kt * om * (h + om) + gm * kd) -
         om * (2.0 * kt + gm) * (2.0 * kt + gm) * (h * kd + kt * g * gg);
  r.s2 = (om + h) * kd - g * g * dl + kt * g * gg;
  r.stable = r.s0 > 0.0 && r.s1 > 0.0 && r.s2 > 0.0;
  return r;
}

double max_real_eigenvalue(const Matrix4& a) {
  Eigen::EigenSolver<Matrix4> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

CovarianceState solve_lyapunov(const Matrix4& a, const Matrix4& d, Warnings* warnings) {
  const double lead = max_real_eigenvalue(a);
  if (!(lead < 0.0)) {
    std::ostringstream os;
    os << "drift matrix is not stable: max Re(eigenvalue) = " << lead;
    throw UnstableSystem(os.str());
  }
  const double scale = a.norm();
  const Matrix4 as = a / scale;
  const Matrix4 ds = d / scale;

  const auto& pairs = upper_pairs();
  Eigen::Matrix<double, kUnknowns, kUnknowns> m;
  Eigen::Matrix<double, kUnknowns, 1> rhs;
  for (int c = 0; c < kUnknowns; ++c) {
    Matrix4 basis = Matrix4::Zero();
    basis(pairs[c].first, pairs[c].second) = 1.0;
    basis(pairs[c].second, pairs[c].first) = 1.0;
    const Matrix4 image = as * basis + basis * as.transpose();
    for (int r = 0; r < kUnknowns; ++r) m(r, c) = image(pairs[r].first, pairs[r].second);
  }
  for (int r = 0; r < kUnknowns; ++r) rhs(r) = -ds(pairs[r].first, pairs[r].second);

  Eigen::FullPivLU<Eigen::Matrix<double, kUnknowns, kUnknowns>> lu(m);
  Eigen::Matrix<double, kUnknowns, 1> x = lu.solve(rhs);
  x += lu.solve(rhs - m * x);

  Eigen::JacobiSVD<Eigen::Matrix<double, kUnknowns, kUnknowns>> svd(m);
  const auto& sv = svd.singularValues();
  CovarianceState out;
  out.condition = sv(0) / sv(kUnknowns - 1);
  if (!(out.condition < 1e12)) {
    std::ostringstream os;
    os << "Lyapunov system is ill-conditioned (condition number " << out.condition << ")";
    warn(warnings, os.str());
  }

  for (int c = 0; c < kUnknowns; ++c) {
    out.v(pairs[c].first, pairs[c].second) = x(c);
    out.v(pairs[c].second, pairs[c].first) = x(c);
  }
  const double dnorm = d.norm();
  const Matrix4 res = a * out.v + out.v * a.transpose() + d;
  out.residual = dnorm > 0.0 ? res.norm() / dnorm : res.norm();
  out.occupancy_n = occupancy(out.v);
  out.log_negativity = logarithmic_negativity(out.v);
  return out;
}

double occupancy(const Matrix4& v) { return 0.5 * (v(0, 0) + v(1, 1) - 1.0); }

double logarithmic_negativity(const Matrix4& v) {
  const double det1 = v.topLeftCorner<2, 2>().determinant();
  const double det2 = v.bottomRightCorner<2, 2>().determinant();
  const double detc = v.topRightCorner<2, 2>().determinant();
  const double sigma = det1 + det2 - 2.0 * detc;
  double disc = sigma * sigma - 4.0 * v.determinant();
  if (disc < 0.0) {
    if (disc < -1e-12 * sigma * sigma) {
      std::ostringstream os;
      os << "covariance matrix is unphysical: negative discriminant " << disc;
      throw UnphysicalState(os.str());
    }
    disc = 0.0;
  }
  const double inner = 0.5 * (sigma - std::sqrt(disc));
  if (!(inner > 0.0)) {
    throw UnphysicalState("covariance matrix is unphysical: vanishing symplectic eigenvalue");
  }
  const double eta_minus = std::sqrt(inner);
  return std::max(0.0, -std::log(2.0 * eta_minus));
}

CovarianceState stationary_state(const OperatingPoint& op, const VibrationalMode& vib,
                                 Warnings* warnings) {
  return solve_lyapunov(build_drift(op, vib), build_diffusion(op, vib), warnings);
}

}  // namespace memcav
