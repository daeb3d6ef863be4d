#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cnls/error.hpp"
#include "cnls/evolution.hpp"
#include "cnls/runner.hpp"
#include "cnls/simd.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

std::string sci(const char* label, double value, double limit) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s = %.3e (limit %.1e)", label, value, limit);
  return buf;
}

double relative_drift(const TimeSeries& ts, double DiagnosticsRecord::*field) {
  const double ref = ts.samples.front().*field;
  double worst = 0.0;
  for (const auto& r : ts.samples) worst = std::max(worst, std::abs(r.*field - ref));
  return worst / std::max(std::abs(ref), 1e-300);
}

SelftestEntry transform_round_trip() {
  const RadialGrid g(20.0, 255);
  const Field u = Field::sample(g, [](double r) { return cplx(std::exp(-r * r), r * std::exp(-r)); });
  const Field back = from_spectral(to_spectral(u));
  double err = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) err = std::max(err, std::abs(back[j] - u[j]));
  return {"transform_round_trip", err < 1e-13, sci("max error", err, 1e-13)};
}

SelftestEntry laplacian_of_gaussian() {
  const RadialGrid g(20.0, 511);
  const Field u = Field::sample(g, [](double r) { return std::exp(-r * r); });
  const Field lap = apply_laplacian(u);
  double err = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = g.node(j);
    const double exact = (4.0 * r * r - 6.0) * std::exp(-r * r);
    err = std::max(err, std::abs(lap[j] - exact));
  }
  return {"laplacian_of_gaussian", err < 1e-9, sci("max error", err, 1e-9)};
}

SelftestEntry ground_state_residual() {
  const RadialGrid g(20.0, 1023);
  const GroundState q = shoot_ground_state(ProfileKind::Q, 3.0, 0.0, g);
  return {"ground_state_Q_p3", q.residual < 1e-6, sci("ODE residual", q.residual, 1e-6)};
}

EvolveConfig coulomb_run(const Field& u0, const PhysParams& params, bool flip) {
  EvolveConfig ec(u0, params);
  ec.dt0 = 1e-3;
  ec.t_max = 0.25;
  ec.flip_coulomb_sign = flip;
  return ec;
}

SelftestEntry hydrogen_stationary(bool flip) {
  const RadialGrid g(30.0, 1023);
  const PhysParams params = make_params(2.0, 0, 3.0);
  const Field u0 = Field::sample(g, [](double r) { return std::exp(-r); });
  const TimeSeries ts = evolve(coulomb_run(u0, params, flip));
  const Field& u = *ts.final_field;
  const auto w = g.moment_weights(2);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double d = std::abs(u[j]) - u0[j].real();
    num += w[j] * d * d;
    den += w[j] * std::norm(u0[j]);
  }
  const double err = std::sqrt(num / den);
  return {"hydrogen_ground_state_modulus", err < 1e-4, sci("relative L2 drift of |u|", err, 1e-4)};
}

SelftestEntry coulomb_energy(bool flip) {
  const RadialGrid g(30.0, 511);
  const PhysParams params = make_params(2.0, -1, 3.0);
  const Field u0 = Field::sample(g, [](double r) { return 0.8 * std::exp(-r * r / 2.0); });
  const TimeSeries ts = evolve(coulomb_run(u0, params, flip));
  const double mass = relative_drift(ts, &DiagnosticsRecord::M);
  const double energy = relative_drift(ts, &DiagnosticsRecord::E);
  const bool ok = mass < 1e-10 && energy < 1e-3;
  return {"energy_conservation", ok,
          sci("mass drift", mass, 1e-10) + ", " + sci("energy drift", energy, 1e-3)};
}

SelftestEntry virial_consistency(bool flip) {
  const RadialGrid g(30.0, 511);
  const PhysParams params = make_params(1.0, 1, 3.0);
  const Field u0 = Field::sample(g, [](double r) { return std::exp(-r * r / 2.0); });
  EvolveConfig ec = coulomb_run(u0, params, flip);
  ec.dt0 = 5e-4;
  const TimeSeries ts = evolve(ec);
  // Centered differences of y and y' against the closed-form derivatives.
  double worst = 0.0, scale = 0.0;
  const auto& s = ts.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double dt = s[i + 1].t - s[i - 1].t;
    const double dy = (s[i + 1].y - s[i - 1].y) / dt;
    const double dyp = (s[i + 1].yprime - s[i - 1].yprime) / dt;
    worst = std::max({worst, std::abs(dy - s[i].yprime), std::abs(dyp - s[i].ysecond_rhs)});
    scale = std::max({scale, std::abs(s[i].yprime), std::abs(s[i].ysecond_rhs)});
  }
  const double rel = worst / std::max(scale, 1e-300);
  return {"virial_identity", rel < 1e-3, sci("relative mismatch", rel, 1e-3)};
}

SelftestEntry w_residual() {
  const RadialGrid g(30.0, 2047);
  const GroundState w = explicit_W(g);
  return {"explicit_W_residual", w.residual < 1e-10, sci("ODE residual", w.residual, 1e-10)};
}

SelftestEntry simd_equivalence() {
  if (!simd::avx2_available()) return {"simd_equivalence", true, "AVX2 unavailable, scalar only"};
  const RadialGrid g(10.0, 1001);
  const Field u = Field::sample(g, [](double r) { return cplx(std::cos(r), std::sin(3.0 * r)); });
  const auto w = g.moment_weights(2);
  const auto& a = simd::scalar_kernels();
  const auto& b = simd::kernels_for(simd::Isa::avx2);
  const double x = a.sum_w_abs4(u.values().data(), w.data(), u.size());
  const double y = b.sum_w_abs4(u.values().data(), w.data(), u.size());
  const double rel = std::abs(x - y) / std::abs(x);
  return {"simd_equivalence", rel < 1e-13, sci("relative difference", rel, 1e-13)};
}

SelftestEntry morawetz_monotone(bool flip) {
  const RadialGrid g(40.0, 1023);
  const PhysParams params = make_params(-1.0, 1, 3.0);
  const Field u0 = Field::sample(g, [](double r) { return std::exp(-r * r / 4.0); });
  EvolveConfig ec = coulomb_run(u0, params, flip);
  ec.t_max = 1.0;
  ec.dt0 = 2e-3;
  const TimeSeries ts = evolve(ec);
  double worst = 0.0;
  for (std::size_t i = 1; i < ts.samples.size(); ++i) {
    worst = std::min(worst, ts.samples[i].A - ts.samples[i - 1].A);
  }
  return {"morawetz_monotone", worst > -1e-8, sci("largest decrease of A", std::max(0.0, -worst), 1e-8)};
}

SelftestEntry config_round_trip() {
  const SimConfig c = parse_config(catalog_config("blowup_gaussian"));
  const bool ok = parse_config(serialize_config(c)) == c;
  return {"config_round_trip", ok, ok ? "serialize/parse reproduces the config" : "configs differ"};
}

SelftestEntry guarded(const std::string& name, const std::function<SelftestEntry()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

std::vector<SelftestEntry> run_selftest(const SelftestOptions& options) {
  const bool flip = options.inject_coulomb_sign;
  std::vector<SelftestEntry> out;
  out.push_back(guarded("transform_round_trip", transform_round_trip));
  out.push_back(guarded("laplacian_of_gaussian", laplacian_of_gaussian));
  out.push_back(guarded("ground_state_Q_p3", ground_state_residual));
  out.push_back(guarded("explicit_W_residual", w_residual));
  out.push_back(guarded("simd_equivalence", simd_equivalence));
  out.push_back(guarded("config_round_trip", config_round_trip));
  out.push_back(guarded("hydrogen_ground_state_modulus", [&] { return hydrogen_stationary(flip); }));
  out.push_back(guarded("energy_conservation", [&] { return coulomb_energy(flip); }));
  out.push_back(guarded("virial_identity", [&] { return virial_consistency(flip); }));
  out.push_back(guarded("morawetz_monotone", [&] { return morawetz_monotone(flip); }));
  return out;
}

}  // namespace cnls
