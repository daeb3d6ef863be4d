#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cnls/diagnostics.hpp"
#include "cnls/error.hpp"
#include "cnls/spectral.hpp"
#include "oracles/oracle_values.hpp"

using namespace cnls;
using std::numbers::pi;

namespace {

Field gaussian(const RadialGrid& g, double A, double w = 1.0) {
  return Field::sample(g, [&](double r) { return A * std::exp(-(r / w) * (r / w)); });
}

// u = e^{-r^2} e^{i b r^2}: y' = 8 b y and A = pi b.
Field chirped(const RadialGrid& g, double b) {
  return Field::sample(g, [&](double r) { return std::exp(std::complex<double>(-r * r, b * r * r)); });
}

TimeSeries synthetic_series(std::initializer_list<DiagnosticsRecord> recs) {
  TimeSeries ts;
  ts.samples.assign(recs.begin(), recs.end());
  return ts;
}

}  // namespace

TEST_CASE("energy report of a gaussian") {
  const RadialGrid g(30.0, 4096);
  const PhysParams params = make_params(-1.0, 1, 3.0);
  const EnergyReport e = energy_report(gaussian(g, 1.0), params);
  CHECK(e.M == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_M).epsilon(1e-12));
  CHECK(e.h1_sq == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_h1_sq).epsilon(1e-12));
  CHECK(e.X == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_X).epsilon(5e-9));
  CHECK(e.P == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_P).epsilon(1e-12));
  CHECK(e.E == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_E).epsilon(1e-9));
  CHECK(e.E0 == doctest::Approx(0.5 * e.h1_sq + 0.25 * e.P).epsilon(1e-14));
}

TEST_CASE("energy of the focusing blow-up data") {
  const RadialGrid g(30.0, 4096);
  const PhysParams params = make_params(0.0, -1, 3.0);
  CHECK(energy_report(gaussian(g, 3.0), params).E == doctest::Approx(oracle::gauss_A3_w1_K0_foc_p3_E).epsilon(1e-10));
  CHECK(energy_report(gaussian(g, 5.0), params).E == doctest::Approx(oracle::gauss_A5_w1_K0_foc_p3_E).epsilon(1e-10));
}

TEST_CASE("virial and Morawetz functionals") {
  const RadialGrid g(30.0, 4096);
  const PhysParams params = make_params(-1.0, 1, 3.0);
  const Field u = gaussian(g, 1.0);
  const VirialReport v = virial_report(u, params);
  CHECK(v.y == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_y).epsilon(1e-12));
  CHECK(std::abs(v.yprime) < 1e-14);
  CHECK(v.ysecond_rhs == doctest::Approx(oracle::gauss_A1_w1_Km1_def_p3_ysecond).epsilon(1e-9));

  const MorawetzReport m = morawetz_report(u, params);
  CHECK(std::abs(m.A) < 1e-14);
  // -(K/2) int |u|^2/|x|^2 + 2 (p-1)/(p+1) int |u|^4/|x| with the closed forms
  // sqrt(2) pi^{3/2} and pi/2. The 1/r quadrature is good to ~h^4.
  CHECK(m.rate_lb == doctest::Approx(0.5 * std::sqrt(2.0) * std::pow(pi, 1.5) + 0.5 * pi).epsilon(5e-9));

  for (double b : {-0.3, 0.2}) {
    const Field c = chirped(g, b);
    CHECK(virial_report(c, params).yprime == doctest::Approx(8.0 * b * oracle::gauss_A1_w1_Km1_def_p3_y).epsilon(1e-10));
    CHECK(morawetz_report(c, params).A == doctest::Approx(pi * b).epsilon(1e-10));
  }
}

TEST_CASE("diagnose gathers every functional") {
  const RadialGrid g(30.0, 2048);
  const PhysParams params = make_params(2.0, -1, 3.0);
  const Field u = chirped(g, 0.1);
  const DiagnosticsRecord r = diagnose(u, params, 1.5, 0.01);
  const EnergyReport e = energy_report(u, params);
  const VirialReport v = virial_report(u, params);
  const MorawetzReport m = morawetz_report(u, params);
  CHECK(r.t == 1.5);
  CHECK(r.dt == 0.01);
  CHECK(r.M == doctest::Approx(e.M).epsilon(1e-14));
  CHECK(r.E == doctest::Approx(e.E).epsilon(1e-13));
  CHECK(r.E0 == doctest::Approx(e.E0).epsilon(1e-13));
  CHECK(r.h1 * r.h1 == doctest::Approx(e.h1_sq).epsilon(1e-13));
  CHECK(r.hhalf == doctest::Approx(hdot_norm(u, 0.5)).epsilon(1e-13));
  CHECK(r.y == doctest::Approx(v.y).epsilon(1e-14));
  CHECK(r.yprime == doctest::Approx(v.yprime).epsilon(1e-13));
  CHECK(r.ysecond_rhs == doctest::Approx(v.ysecond_rhs).epsilon(1e-13));
  CHECK(r.A == doctest::Approx(m.A).epsilon(1e-13));
  CHECK(r.rate_lb == doctest::Approx(m.rate_lb).epsilon(1e-13));
  CHECK(r.l4 == doctest::Approx(std::pow(lp_norm(u, 4.0), 4)).epsilon(1e-13));
  CHECK(r.sup == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("threshold C") {
  CHECK(threshold_C(-2.0, 5.0, make_params(0.0, -1, 3.0)) == -2.0);
  CHECK(threshold_C(1.5, 5.0, make_params(-3.0, -1, 3.0)) == 1.5);
  // K > 0: E + 3 K^2 M / (2 (3p-7)(p-1)); p = 3 gives E + 3 K^2 M / 8
  CHECK(threshold_C(-1.0, 2.0, make_params(2.0, -1, 3.0)) == doctest::Approx(-1.0 + 3.0));
  CHECK_THROWS_AS(threshold_C(0.0, 1.0, make_params(1.0, -1, 7.0 / 3.0)), DomainError);
  CHECK_THROWS_AS(threshold_C(0.0, 1.0, make_params(1.0, -1, 2.0)), DomainError);
}

TEST_CASE("classification decision table") {
  const RadialGrid g(30.0, 2048);
  const GroundState Q3 = shoot_ground_state(ProfileKind::Q, 3.0, 0.0, g);
  const GroundState Qmc = shoot_ground_state(ProfileKind::Q, 7.0 / 3.0, 0.0, g);
  const GroundState W = explicit_W(g);
  auto scaled = [](const GroundState& q, double s) {
    std::vector<cplx> v(q.profile.values().begin(), q.profile.values().end());
    for (auto& z : v) z *= s;
    return Field(q.profile.grid(), std::move(v));
  };
  const Field u = gaussian(g, 1.0);

  CHECK(classify_initial_data(u, make_params(-1.0, 1, 3.0), {}).regime == Regime::global_defocusing);
  CHECK(classify_initial_data(u, make_params(2.0, 0, 3.0), {}).regime == Regime::undetermined);
  CHECK(classify_initial_data(u, make_params(1.0, -1, 2.0), {}).regime == Regime::global_subthreshold);

  SUBCASE("mass-critical") {
    const PhysParams params = make_params(0.0, -1, 7.0 / 3.0);
    const Classification below = classify_initial_data(scaled(Qmc, 0.99), params, {&Qmc, nullptr});
    CHECK(below.regime == Regime::mass_critical_below_MQ);
    CHECK(below.witness("M") < below.witness("M(Q)"));
    CHECK(classify_initial_data(scaled(Qmc, 1.01), params, {&Qmc, nullptr}).regime != Regime::mass_critical_below_MQ);
    CHECK_THROWS_AS(classify_initial_data(u, params, {}), DomainError);
  }
  SUBCASE("intercritical with repulsive Coulomb") {
    const PhysParams params = make_params(-1.0, -1, 3.0);
    const Classification c = classify_initial_data(scaled(Q3, 0.5), params, {&Q3, nullptr});
    CHECK(c.regime == Regime::global_subthreshold);
    CHECK(c.witness("mass_energy") < c.witness("mass_energy_Q"));
    CHECK(c.witness("mass_norm") < c.witness("mass_norm_Q"));
    CHECK_THROWS_AS(classify_initial_data(u, params, {}), DomainError);
    // The repulsive term adds X/2 to the energy, so A = 6 is needed for E < 0.
    // The energy witness then holds and the gradient one fails.
    const Classification big = classify_initial_data(gaussian(g, 6.0), params, {&Q3, nullptr});
    CHECK(big.witness("mass_energy") < 0.0);
    CHECK(big.regime == Regime::blowup_negative_C);
  }
  SUBCASE("blow-up branches") {
    CHECK(classify_initial_data(gaussian(g, 5.0), make_params(0.0, -1, 3.0), {}).regime == Regime::blowup_negative_C);
    CHECK(classify_initial_data(gaussian(g, 4.0), make_params(2.0, -1, 3.0), {}).regime == Regime::blowup_negative_C);
    // E > 0 with an inward chirp: y'^2 >= 24 (p-1) C y.
    const Field inward = Field::sample(g, [](double r) { return 5.3 * std::exp(std::complex<double>(-r * r, -r * r)); });
    const Classification c3 = classify_initial_data(inward, make_params(0.0, -1, 3.0), {});
    CHECK(c3.witness("C") > 0.0);
    CHECK(c3.witness("yprime") < 0.0);
    CHECK(c3.regime == Regime::blowup_case3);
    const Classification none = classify_initial_data(gaussian(g, 3.0), make_params(0.0, -1, 3.0), {});
    CHECK(none.regime == Regime::undetermined);
    CHECK(none.witness("C") == doctest::Approx(oracle::gauss_A3_w1_K0_foc_p3_E).epsilon(1e-9));
  }
  SUBCASE("energy-critical") {
    const PhysParams params = make_params(-1.0, -1, 5.0);
    const Classification c = classify_initial_data(gaussian(g, 0.3), params, {nullptr, &W});
    CHECK(c.regime == Regime::energy_critical_subthreshold);
    CHECK_THROWS_AS(classify_initial_data(u, params, {}), DomainError);
  }
}

TEST_CASE("threshold conditions") {
  const RadialGrid g(30.0, 2048);
  const GroundState Q = shoot_ground_state(ProfileKind::Q, 3.0, 0.0, g);
  const ConstantsReport c = constants_report(Q, 3.0);
  const PhysParams params = make_params(-1.0, -1, 3.0);
  const ThresholdConditions small = threshold_conditions(gaussian(g, 0.3), params, c);
  CHECK(small.weak);
  CHECK(small.strong);
  CHECK(small.strong_product > small.weak_product);  // K < 0 adds to the gradient
  CHECK(small.threshold == c.norm_threshold);
  const ThresholdConditions large = threshold_conditions(gaussian(g, 4.0), params, c);
  CHECK_FALSE(large.weak);
  CHECK_FALSE(large.strong);
}

TEST_CASE("interaction L4 accumulator") {
  DiagnosticsRecord a, b, c;
  a.t = 0.0, a.l4 = 2.0, a.M = 4.0, a.hhalf = 1.0;
  b.t = 1.0, b.l4 = 4.0, b.hhalf = 3.0;
  c.t = 3.0, c.l4 = 0.0, c.hhalf = 2.0;
  const InteractionL4 il = interaction_l4(synthetic_series({a, b, c}));
  CHECK(il.total == doctest::Approx(3.0 + 4.0));
  CHECK(il.bound_witness == doctest::Approx(2.0 * 3.0));
  CHECK_THROWS_AS(interaction_l4(TimeSeries{}), DomainError);
}

TEST_CASE("local time average over snapshots") {
  const RadialGrid g(30.0, 2048);
  const PhysParams params = make_params(2.0, 0, 3.0);
  const Field u = Field::sample(g, [](double r) { return std::exp(-r); });
  TimeSeries ts;
  ts.snapshots = {u, u, u};
  ts.snapshot_times = {0.0, 1.0, 4.0};
  const LocalAverage m = local_time_average(ts, 10.0, LocalQuantity::mass, params);
  // int_{|x|<10} e^{-2r} dx = pi (1 - e^{-20} (1 + 20 + 200))
  CHECK(m.value == doctest::Approx(pi * (1.0 - std::exp(-20.0) * 221.0)).epsilon(1e-6));
  CHECK(m.bound == 8.0);
  const LocalAverage d = local_time_average(ts, 10.0, LocalQuantity::gradient, params);
  CHECK(d.value == doctest::Approx(m.value).epsilon(1e-3));  // |u'| = |u|
  CHECK(d.bound == 8.0);
  CHECK_THROWS_AS(local_time_average(ts, 31.0, LocalQuantity::mass, params), DomainError);
  CHECK_THROWS_AS(local_time_average(ts, 0.0, LocalQuantity::mass, params), DomainError);
  CHECK_THROWS_AS(local_time_average(TimeSeries{}, 5.0, LocalQuantity::mass, params), DomainError);
}

TEST_CASE("hardy quotient and the defocusing H1 bound") {
  const RadialGrid g(30.0, 4096);
  const Field u = gaussian(g, 1.0);
  const double expected = oracle::gauss_A1_w1_Km1_def_p3_X /
                          std::sqrt(oracle::gauss_A1_w1_Km1_def_p3_M * oracle::gauss_A1_w1_Km1_def_p3_h1_sq);
  CHECK(hardy_quotient(u) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(hardy_quotient(Field::zeros(g)) == 0.0);

  const PhysParams params = make_params(2.0, 1, 3.0);
  TimeSeries ts;
  ts.samples = {diagnose(u, params, 0.0), diagnose(gaussian(g, 0.9, 1.2), params, 1.0)};
  const H1Bound b = defocusing_h1_bound(ts, params);
  CHECK(b.hardy_max >= expected * (1.0 - 1e-6));
  CHECK(b.C1 == doctest::Approx(1.0 + 4.0 * b.hardy_max * b.hardy_max));
  CHECK(b.sup_norm_sq <= b.bound);
  CHECK(b.bound == doctest::Approx(b.C1 * ts.samples[0].M + 4.0 * ts.samples[0].E));
}
