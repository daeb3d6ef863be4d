#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cnls/diagnostics.hpp"
#include "cnls/evolution.hpp"
#include "cnls/ground_states.hpp"
#include "cnls/spectral.hpp"
#include "support/trial_fields.hpp"

using namespace cnls;

namespace {

double inner_r2(const Field& a, const Field& b) {
  const auto w = a.grid().moment_weights(2);
  std::complex<double> s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * std::conj(a[j]) * b[j];
  return std::abs(s);
}

}  // namespace

TEST_CASE("transform is linear and invertible for random data") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(8, 700);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const RadialGrid grid(5.0 + trial, static_cast<std::size_t>(size(rng)));
    std::vector<cplx> a(grid.size()), b(grid.size());
    for (auto& z : a) z = {g(rng), g(rng)};
    for (auto& z : b) z = {g(rng), g(rng)};
    const cplx alpha(g(rng), g(rng));
    std::vector<cplx> c(grid.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = a[j] + alpha * b[j];
    const auto sa = to_spectral(Field(grid, a)).coefficients, sb = to_spectral(Field(grid, b)).coefficients;
    const SpectralField spec = to_spectral(Field(grid, c));
    const auto& sc = spec.coefficients;
    for (std::size_t k = 0; k < c.size(); ++k) {
      CHECK(std::abs(sc[k] - (sa[k] + alpha * sb[k])) < 1e-12 * (1.0 + std::abs(sc[k])));
    }
    const Field back = from_spectral(spec);
    for (std::size_t j = 0; j < c.size(); ++j) CHECK(std::abs(back[j] - c[j]) < 1e-12);
  }
}

TEST_CASE("spectral laplacian is symmetric in the volume inner product") {
  std::mt19937_64 rng(7);
  const RadialGrid g(20.0, 511);
  for (int trial = 0; trial < 10; ++trial) {
    const Field a = trial::random_field(g, rng), b = trial::random_field(g, rng);
    const double lhs = inner_r2(a, apply_laplacian(b));
    const double rhs = inner_r2(apply_laplacian(a), b);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("functionals are phase invariant and scale homogeneously") {
  std::mt19937_64 rng(11);
  const RadialGrid g(30.0, 1024);
  std::uniform_real_distribution<double> pdist(7.0 / 3.0, 5.0), phase(0.0, 6.28);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = pdist(rng);
    const PhysParams params = make_params(-1.0, -1, p);
    const Field u = trial::random_field(g, rng);
    const EnergyReport e = energy_report(u, params);
    std::vector<cplx> v(u.values().begin(), u.values().end());
    const cplx rot = std::polar(1.0, phase(rng));
    for (auto& z : v) z *= rot;
    const EnergyReport er = energy_report(Field(g, v), params);
    CHECK(er.M == doctest::Approx(e.M).epsilon(1e-13));
    CHECK(er.E == doctest::Approx(e.E).epsilon(1e-12));
    CHECK(er.h1_sq == doctest::Approx(e.h1_sq).epsilon(1e-12));

    const double a = 1.7;
    const EnergyReport es = energy_report(trial::scaled(u, a), params);
    CHECK(es.M == doctest::Approx(a * a * e.M).epsilon(1e-12));
    CHECK(es.h1_sq == doctest::Approx(a * a * e.h1_sq).epsilon(1e-12));
    CHECK(es.X == doctest::Approx(a * a * e.X).epsilon(1e-12));
    CHECK(es.P == doctest::Approx(std::pow(a, p + 1.0) * e.P).epsilon(1e-12));
  }
}

TEST_CASE("strang flow conserves mass for random data and parameters") {
  std::mt19937_64 rng(23);
  const RadialGrid g(25.0, 512);
  std::uniform_real_distribution<double> kdist(-2.0, 2.0), pdist(1.5, 5.0);
  std::uniform_int_distribution<int> ldist(-1, 1);
  for (int trial = 0; trial < 12; ++trial) {
    const PhysParams params = make_params(kdist(rng), ldist(rng), pdist(rng));
    CAPTURE(params.K);
    CAPTURE(params.lambda);
    CAPTURE(params.p);
    const Field u0 = trial::scaled(trial::random_field(g, rng), 0.5);
    StrangStepper s(g, params);
    std::vector<cplx> u(u0.values().begin(), u0.values().end());
    for (int i = 0; i < 25; ++i) s.step(u, 4e-3);
    const double m0 = weighted_integral(u0, Weight::one());
    CHECK(weighted_integral(Field(g, u), Weight::one()) == doctest::Approx(m0).epsilon(1e-11));
  }
}

TEST_CASE("strong threshold condition implies the weak one when K < 0") {
  std::mt19937_64 rng(5);
  const RadialGrid g(30.0, 1024);
  const GroundState Q = shoot_ground_state(ProfileKind::Q, 3.0, 0.0, g);
  const ConstantsReport c = constants_report(Q, 3.0);
  const PhysParams params = make_params(-1.0, -1, 3.0);
  std::uniform_real_distribution<double> amp(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ThresholdConditions tc = threshold_conditions(trial::scaled(trial::random_field(g, rng), amp(rng)), params, c);
    CHECK(tc.strong_product >= tc.weak_product);
    if (tc.strong) CHECK(tc.weak);
  }
}

TEST_CASE("below the mass-energy threshold the two gradient conditions agree") {
  // p = 3, K = -1, focusing: fields rescaled so that M E <= 0.9 M(Q) E0(Q).
  std::mt19937_64 rng(2024);
  const RadialGrid g(30.0, 1024);
  const GroundState Q = shoot_ground_state(ProfileKind::Q, 3.0, 0.0, g);
  const ConstantsReport c = constants_report(Q, 3.0);
  const PhysParams params = make_params(-1.0, -1, 3.0);
  const double limit = 0.9 * c.M * c.E0;
  std::uniform_real_distribution<double> log_amp(std::log(0.05), std::log(20.0));
  int accepted = 0, both_hold = 0, both_fail = 0;
  while (accepted < 100) {
    const Field u = trial::scaled(trial::random_field(g, rng), std::exp(log_amp(rng)));
    if (trial::mass_energy(u, params) > limit) continue;
    ++accepted;
    const ThresholdConditions tc = threshold_conditions(u, params, c);
    CHECK(tc.weak == tc.strong);
    both_hold += tc.weak && tc.strong;
    both_fail += !tc.weak && !tc.strong;
  }
  // Both branches must actually be visited.
  CHECK(both_hold > 10);
  CHECK(both_fail > 10);
}
