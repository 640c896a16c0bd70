#include <doctest.h>

#include "fixtures.hpp"
#include "memcav/gaussian_steady_state.hpp"
#include "memcav/spectra.hpp"

using namespace memcav;
using fixtures::rel;

namespace {

using cplx = std::complex<double>;

OperatingPoint weak_point(double g_over_omega) {
  OperatingPoint op = fixtures::cooling_point();
  op.G = g_over_omega * fixtures::drum().frequency;
  return op;
}

bool effectively_stable(const OperatingPoint& op, const VibrationalMode& vib) {
  return max_real_eigenvalue(build_drift(op, vib)) < 0.0;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("uncoupled susceptibility is the bare Lorentzian") {
  OperatingPoint op = fixtures::cooling_point();
  op.G = op.Gamma = op.h = 0.0;
  const VibrationalMode vib = fixtures::drum();
  const double om = vib.frequency;
  for (double w : {0.0, 0.5 * om, om, 1.7 * om}) {
    const cplx expect = om / (om * om - w * w - cplx(0.0, w * vib.damping()));
    CHECK(std::abs(effective_susceptibility(w, op, vib) - expect) <= 1e-15 * std::abs(expect));
  }
  const EffectiveOscillator eff = effective_frequency_damping(om, op, vib);
  CHECK(eff.frequency == doctest::Approx(om).epsilon(1e-15));
  CHECK(eff.damping == vib.damping());
}

TEST_CASE("lossless susceptibility is the standard optomechanical one") {
  OperatingPoint op = fixtures::cooling_point();
  op.Gamma = 0.0;
  const VibrationalMode vib = fixtures::drum();
  const double om = vib.frequency;
  const double omt2 = om * om + op.h * om;
  for (double w : {0.3 * om, om, 2.0 * om}) {
    const cplx kw(op.kappaT, -w);
    const cplx expect = om / (omt2 - w * w - cplx(0.0, w * vib.damping()) -
                              op.G * op.G * op.Delta * om / (kw * kw + op.Delta * op.Delta));
    CHECK(std::abs(effective_susceptibility(w, op, vib) - expect) <= 1e-14 * std::abs(expect));
  }
}

TEST_CASE("susceptibility peaks at the self-consistent effective frequency") {
  const OperatingPoint op = weak_point(0.05);
  const VibrationalMode vib = fixtures::drum();
  const double om = vib.frequency;
  const double step = 1e-5 * om;
  double best = 0.0, best_w = 0.0;
  for (double w = 0.9 * om; w <= 1.1 * om; w += step) {
    const double a = std::abs(effective_susceptibility(w, op, vib));
    if (a > best) {
      best = a;
      best_w = w;
    }
  }
  CHECK(std::abs(best_w - effective_frequency_damping(best_w, op, vib).frequency) <= 2.0 * step);
}

TEST_CASE("red detuning increases the damping") {
  OperatingPoint op = fixtures::cooling_point();
  op.Gamma = 0.0;
  const VibrationalMode vib = fixtures::drum();
  REQUIRE(op.Delta > 0.0);
  CHECK(effective_frequency_damping(vib.frequency, op, vib).damping > vib.damping());
}

TEST_CASE("imaginary effective frequency is reported") {
  OperatingPoint op = fixtures::cooling_point();
  op.h = -2.0 * fixtures::drum().frequency;
  CHECK_THROWS_AS(effective_frequency_damping(0.1 * fixtures::drum().frequency, op, fixtures::drum()),
                  UnstableSystem);
}

TEST_CASE("effective damping equals the sideband rate balance") {
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int i = 0; i < 1000 && checked < 100; ++i) {
    const OperatingPoint op = fixtures::random_point(rng, true);
    const VibrationalMode vib = fixtures::unit_drum(1e4);
    if (!effectively_stable(op, vib)) continue;
    EffectiveOscillator eff;
    try {
      eff = effective_frequency_damping(vib.frequency, op, vib);
    } catch (const UnstableSystem&) {
      continue;
    }
    const CoolingRates r = scattering_rates(op, vib);
    CHECK(rel(eff.damping - vib.damping(), r.a_minus - r.a_plus) < 1e-9);
    CHECK(rel(r.gamma_eff_at_Om, vib.damping() + r.a_minus - r.a_plus) < 1e-9);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("absorption noise vanishes without absorption") {
  OperatingPoint op = fixtures::cooling_point();
  op.Gamma = 0.0;
  op.kappa1 = 0.0;
  for (double w : {0.0, 1e7, 6e7, 2e8}) CHECK(noise_spectra(w, op, fixtures::drum()).s_abs == 0.0);
}

TEST_CASE("noise spectra are even and assemble the position spectrum") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const OperatingPoint op = fixtures::random_point(rng, true);
    const VibrationalMode vib = fixtures::unit_drum(1e3);
    const double w = 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const SpectrumSample a = noise_spectra(w, op, vib);
    const SpectrumSample b = noise_spectra(-w, op, vib);
    CHECK(a.s_rp == b.s_rp);
    CHECK(a.s_abs == b.s_abs);
    CHECK(a.s_th == b.s_th);
    CHECK(a.s_q == std::norm(a.chi_eff) * (a.s_th + a.s_rp + a.s_abs));
    const SpectrumSample c = noise_spectra(w, op, vib, ThermalModel::coth_exact);
    CHECK(c.s_q == std::norm(c.chi_eff) * (c.s_th + c.s_rp + c.s_abs));
  }
}

TEST_CASE("exact thermal spectrum limits") {
  const VibrationalMode vib = fixtures::drum();
  const double om = vib.frequency;
  for (double t : {1.0, 300.0}) {
    const OperatingPoint op = fixtures::cooling_point(t);
    const double markov = noise_spectra(om, op, vib).s_th;
    const double exact = noise_spectra(om, op, vib, ThermalModel::coth_exact).s_th;
    CHECK(rel(exact, markov) < 1e-9);
    const double at_zero = noise_spectra(0.0, op, vib, ThermalModel::coth_exact).s_th;
    const double near_zero = noise_spectra(1e5, op, vib, ThermalModel::coth_exact).s_th;
    CHECK(std::isfinite(at_zero));
    CHECK(rel(at_zero, near_zero) < 1e-9);
  }
  OperatingPoint cold = fixtures::cooling_point();
  cold.temperature = 0.0;
  CHECK(noise_spectra(-2.0 * om, cold, vib, ThermalModel::coth_exact).s_th ==
        doctest::Approx(2.0 * vib.damping()).epsilon(1e-15));
}

TEST_CASE("sideband rates without absorption") {
  OperatingPoint op = fixtures::cooling_point();
  op.Gamma = 0.0;
  const VibrationalMode vib = fixtures::drum();
  const double om = vib.frequency;
  const double kt = op.kappaT;
  const CoolingRates r = scattering_rates(op, vib);
  auto standard = [&](double d) { return op.G * op.G * kt / (2.0 * (kt * kt + d * d)); };
  CHECK(rel(r.a_plus, standard(op.Delta + om)) < 1e-15);
  CHECK(rel(r.a_minus, standard(op.Delta - om)) < 1e-15);

  op.Delta = om;
  op.kappaT = 0.05 * om;
  const CoolingRates rs = scattering_rates(op, vib);
  CHECK(rel(rs.a_minus / rs.a_plus, (op.kappaT * op.kappaT + 4.0 * om * om) /
                                        (op.kappaT * op.kappaT)) < 1e-12);
}

TEST_CASE("cooling configuration has net laser cooling") {
  const OperatingPoint op = fixtures::cooling_point();
  const CoolingRates r = scattering_rates(op, fixtures::drum());
  CHECK(r.a_minus > r.a_plus);
  CHECK(r.gamma_eff_at_Om > 0.0);
  CHECK(std::isfinite(r.omega_eff_at_Om));
}

TEST_CASE("approximate occupancy limits") {
  const VibrationalMode vib = fixtures::drum();
  OperatingPoint op = fixtures::cooling_point(4.0);
  OperatingPoint free = op;
  free.G = 0.0;
  free.Gamma = 0.0;
  CHECK(rel(approximate_occupancy(free, vib), op.n0) < 1e-15);

  op.Gamma = 0.0;
  const CoolingRates r = scattering_rates(op, vib);
  const double standard =
      (vib.damping() * op.n0 + r.a_plus) / (vib.damping() + r.a_minus - r.a_plus);
  CHECK(rel(approximate_occupancy(op, vib), standard) < 1e-15);

  OperatingPoint blue = fixtures::cooling_point();
  blue.Delta = -blue.Delta;
  CHECK_THROWS_AS(approximate_occupancy(blue, vib), UnstableSystem);

  Warnings w;
  OperatingPoint strong = fixtures::cooling_point();
  strong.G = 1.2 * vib.frequency;
  try {
    approximate_occupancy(strong, vib, &w);
  } catch (const UnstableSystem&) {
  }
  CHECK(!w.empty());
}

TEST_CASE("integrated position spectrum matches the Lyapunov variances") {
  const VibrationalMode vib = fixtures::drum();
  for (double power : {2.85e-3, 28.5e-3}) {
    for (double t : {1.0, 300.0}) {
      const OperatingPoint op = fixtures::cooling_point(t, power);
      const CovarianceState cs = stationary_state(op, vib);
      const VarianceEstimate est = spectral_variances(op, vib);
      CHECK(rel(est.q_variance, cs.v(0, 0)) < 1e-2);
      CHECK(rel(est.p_variance, cs.v(1, 1)) < 1e-2);
      CHECK(est.q_error < 1e-2 * est.q_variance);
    }
  }
}

TEST_CASE("approximate occupancy converges to the Lyapunov value at weak drive") {
  const VibrationalMode vib = fixtures::drum();
  const OperatingPoint medium = fixtures::cooling_point(1.0, 2.85e-3);
  const OperatingPoint weak = fixtures::cooling_point(1.0, 0.285e-3);
  const double e_medium =
      rel(approximate_occupancy(medium, vib), stationary_state(medium, vib).occupancy_n);
  const double e_weak = rel(approximate_occupancy(weak, vib), stationary_state(weak, vib).occupancy_n);
  CHECK(e_medium < 0.20);
  CHECK(e_weak < 0.05);
  CHECK(e_weak < e_medium);
}

}  // TEST_SUITE
