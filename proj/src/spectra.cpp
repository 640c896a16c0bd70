#include "memcav/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>


#include "memcav/constants.hpp"
#include "quadrature.hpp"
#include "memcav/gaussian_steady_state.hpp"

namespace memcav {

namespace {

using cplx = std::complex<double>;

// [kT^2 + (w - D)^2][kT^2 + (w + D)^2]
double cavity_filter(double omega, const OperatingPoint& op) {
  const double k2 = op.kappaT * op.kappaT;
  return (k2 + (omega - op.Delta) * (omega - op.Delta)) *
         (k2 + (omega + op.Delta) * (omega + op.Delta));
}

double thermal_spectrum(double omega, const OperatingPoint& op, const VibrationalMode& vib,
                        ThermalModel model) {
  const double gm = vib.damping();
  if (model == ThermalModel::markovian) return gm * (2.0 * op.n0 + 1.0);
  const double om = vib.frequency;
  if (op.temperature == 0.0) return gm * std::abs(omega) / om;
  const double x = kHbar * omega / (2.0 * kBoltzmann * op.temperature);
  if (std::abs(x) < 1e-8) return (gm / om) * 2.0 * kBoltzmann * op.temperature / kHbar;
  return (gm * omega / om) / std::tanh(x);
}

}  // namespace

std::complex<double> effective_susceptibility(double omega, const OperatingPoint& op,
                                              const VibrationalMode& vib) {
  const double om = vib.frequency;
  const double om_tilde2 = om * om + op.h * om;
  const cplx kw(op.kappaT, -omega);
  const cplx back = op.G * om * (op.G * op.Delta - op.Gamma * kw) / (kw * kw + op.Delta * op.Delta);
  return om / (om_tilde2 - omega * omega - cplx(0.0, omega * vib.damping()) - back);
}

EffectiveOscillator effective_frequency_damping(double omega, const OperatingPoint& op,
                                                const VibrationalMode& vib) {
  const double om = vib.frequency;
  const double kt2 = op.kappaT * op.kappaT;
  const double d2 = op.Delta * op.Delta;
  const double w2 = omega * omega;
  const double filter = cavity_filter(omega, op);
  const double radicand =
      om * om + op.h * om -
      op.G * om * (op.G * op.Delta * (kt2 - w2 + d2) - op.Gamma * op.kappaT * (kt2 + w2 + d2)) /
          filter;
  if (radicand < 0.0) {
    std::ostringstream os;
    os << "effective mechanical frequency is imaginary (Omega_eff^2 = " << radicand << ")";
    throw UnstableSystem(os.str());
  }
  EffectiveOscillator out;
  out.frequency = std::sqrt(radicand);
  out.damping = vib.damping() +
                op.G * om * (2.0 * op.G * op.Delta * op.kappaT - op.Gamma * (kt2 + w2 - d2)) / filter;
  return out;
}

SpectrumSample noise_spectra(double omega, const OperatingPoint& op, const VibrationalMode& vib,
                             ThermalModel model) {
  SpectrumSample s;
  s.omega = omega;
  const double kt2 = op.kappaT * op.kappaT;
  const double d2 = op.Delta * op.Delta;
  const double filter = cavity_filter(omega, op);
  s.s_th = thermal_spectrum(omega, op, vib, model);
  s.s_rp = op.G * op.G * op.kappaT * (d2 + kt2 + omega * omega) / filter;
  const double heating = (op.kappa1 > 0.0) ? op.Gamma * op.Gamma / (4.0 * op.kappa1) : 0.0;
  s.s_abs = heating + op.Gamma * op.G * op.Delta * (d2 + kt2 - omega * omega) / filter;
  s.chi_eff = effective_susceptibility(omega, op, vib);
  s.s_q = std::norm(s.chi_eff) * (s.s_th + s.s_rp + s.s_abs);
  return s;
}

CoolingRates scattering_rates(const OperatingPoint& op, const VibrationalMode& vib) {
  const double om = vib.frequency;
  const double kt = op.kappaT;
  auto rate = [&](double shifted) {
    return (op.G * op.G * kt + op.G * op.Gamma * shifted) / (2.0 * (kt * kt + shifted * shifted));
  };
  CoolingRates r;
  r.a_plus = rate(op.Delta + om);
  r.a_minus = rate(op.Delta - om);
  try {
    const EffectiveOscillator eff = effective_frequency_damping(om, op, vib);
    r.gamma_eff_at_Om = eff.damping;
    r.omega_eff_at_Om = eff.frequency;
  } catch (const UnstableSystem&) {
    r.gamma_eff_at_Om = vib.damping() + r.a_minus - r.a_plus;
    r.omega_eff_at_Om = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double approximate_occupancy(const OperatingPoint& op, const VibrationalMode& vib,
                             Warnings* warnings) {
  if (std::abs(op.G) >= vib.frequency) {
    std::ostringstream os;
    os << "coupling G = " << op.G << " rad/s is not small compared to Omega_m = " << vib.frequency
       << "; the weak-coupling occupancy estimate is unreliable";
    warn(warnings, os.str());
  }
  const CoolingRates r = scattering_rates(op, vib);
  const double gm = vib.damping();
  const double heating = (op.kappa1 > 0.0) ? op.Gamma * op.Gamma / (8.0 * op.kappa1) : 0.0;
  const double den = gm + r.a_minus - r.a_plus;
  if (!(den > 0.0)) {
    std::ostringstream os;
    os << "net mechanical damping gamma_m + A- - A+ = " << den << " is not positive";
    throw UnstableSystem(os.str());
  }
  return (gm * op.n0 + heating + r.a_plus) / den;
}

VarianceEstimate spectral_variances(const OperatingPoint& op, const VibrationalMode& vib,
                                    ThermalModel model) {
  const double om = vib.frequency;
  const double cut = 20.0 * std::max({om, op.kappaT, std::abs(op.Delta)});

  // Resonances of the linear system place the spectral peaks; refine around
  // each at multiples of its linewidth.
  Eigen::EigenSolver<Matrix4> es(build_drift(op, vib), false);
  std::vector<double> marks{0.0};
  for (int i = 0; i < 4; ++i) {
    const double centre = std::abs(es.eigenvalues()(i).imag());
    const double width = std::max(std::abs(es.eigenvalues()(i).real()), 1e-12 * om);
    for (double f : {0.0, 1.0, 3.0, 10.0, 30.0, 100.0}) {
      marks.push_back(centre + f * width);
      if (centre - f * width > 0.0) marks.push_back(centre - f * width);
    }
  }

  auto integrate = [&](double limit, bool momentum, double& err_total) {
    std::vector<double> cuts;
    for (double m : marks) {
      if (m < limit) {
        cuts.push_back(m);
        if (m > 0.0) cuts.push_back(-m);
      }
    }
    cuts.push_back(limit);
    cuts.push_back(-limit);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto f = [&](double w) {
      const double sq = noise_spectra(w, op, vib, model).s_q;
      return momentum ? sq * w * w / (om * om) : sq;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const auto r = detail::integrate_adaptive<31>(f, cuts[i], cuts[i + 1], 0.0, 1e-12, 15);
      sum += r.value;
      err_total += r.error;
    }
    return sum / (2.0 * kPi);
  };

  VarianceEstimate out;
  double eq = 0.0, ep = 0.0, eq2 = 0.0, ep2 = 0.0;
  out.q_variance = integrate(cut, false, eq);
  out.p_variance = integrate(cut, true, ep);
  const double q_wide = integrate(2.0 * cut, false, eq2);
  const double p_wide = integrate(2.0 * cut, true, ep2);
  out.q_error = eq / (2.0 * kPi) + std::abs(q_wide - out.q_variance);
  out.p_error = ep / (2.0 * kPi) + std::abs(p_wide - out.p_variance);
  out.q_variance = q_wide;
  out.p_variance = p_wide;
  return out;
}

}  // namespace memcav
