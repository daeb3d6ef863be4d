#include "cnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cnls/error.hpp"
#include "cnls/simd.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

struct Moments {
  double M = 0.0;
  double h1_sq = 0.0;
  double hhalf_sq = 0.0;
  double X = 0.0;   // int |u|^2 / r
  double X2 = 0.0;  // int |u|^2 / r^2
  double P = 0.0;   // int |u|^{p+1}
  double Pr = 0.0;  // int |u|^{p+1} / r
  double y = 0.0;
  double yprime = 0.0;
  double A = 0.0;
  double l4 = 0.0;
  double sup = 0.0;
};

// |u|^{p+1} integrals share the Coulomb weights with the stepper, so the
// first node carries the same origin correction as the potential.
Moments compute_moments(const Field& u, double p) {
  const RadialGrid& g = u.grid();
  const SpectralAnalysis a = analyze(u);
  const auto vals = u.values();
  const auto w2 = g.moment_weights(2);
  const auto w3 = g.moment_weights(3);
  const auto w4 = g.moment_weights(4);
  const auto coul = g.coulomb_weights();

  Moments m;
  m.M = simd::sum_w_abs2(vals, w2);
  m.h1_sq = hdot_norm_squared(g, a.coefficients, 1.0);
  m.hhalf_sq = hdot_norm_squared(g, a.coefficients, 0.5);
  m.y = simd::sum_w_abs2(vals, w4);
  m.yprime = 4.0 * simd::sum_w_im_conj(vals, a.du, w3);
  m.A = simd::sum_w_im_conj(vals, a.du, w2);
  m.l4 = simd::sum_w_abs4(vals, w2);
  m.sup = std::sqrt(simd::max_abs2(vals));

  const double origin_sq = std::norm(a.origin);
  m.X2 = simd::sum_w_abs2(vals, g.moment_weights(0)) + kFourPi * 0.5 * g.spacing() * origin_sq;

  double X = 0.0, P = 0.0, Pr = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const double a2 = std::norm(vals[j]);
    const double ap = std::pow(a2, 0.5 * (p + 1.0));
    X += w2[j] * coul[j] * a2;
    P += w2[j] * ap;
    Pr += w2[j] * coul[j] * ap;
  }
  m.X = X;
  m.P = P;
  m.Pr = Pr;
  return m;
}

double energy_of(const Moments& m, const PhysParams& pp) {
  return 0.5 * m.h1_sq - 0.5 * pp.K * m.X + pp.lambda * m.P / (pp.p + 1.0);
}

double energy0_of(const Moments& m, const PhysParams& pp) {
  return 0.5 * m.h1_sq + pp.lambda * m.P / (pp.p + 1.0);
}

double virial_rhs(const Moments& m, const PhysParams& pp) {
  return 8.0 * m.h1_sq - 4.0 * pp.K * m.X +
         12.0 * pp.lambda * (pp.p - 1.0) / (pp.p + 1.0) * m.P;
}

double morawetz_rate(const Moments& m, const PhysParams& pp) {
  return -0.5 * pp.K * m.X2 + pp.lambda * 2.0 * (pp.p - 1.0) / (pp.p + 1.0) * m.Pr;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

std::string_view status_name(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_detected: return "blowup_detected";
    case RunStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

EnergyReport energy_report(const Field& u, const PhysParams& params) {
  const Moments m = compute_moments(u, params.p);
  return {m.M, energy_of(m, params), energy0_of(m, params), m.h1_sq, m.X, m.P};
}

VirialReport virial_report(const Field& u, const PhysParams& params) {
  const Moments m = compute_moments(u, params.p);
  return {m.y, m.yprime, virial_rhs(m, params)};
}

MorawetzReport morawetz_report(const Field& u, const PhysParams& params) {
  const Moments m = compute_moments(u, params.p);
  return {m.A, morawetz_rate(m, params)};
}

DiagnosticsRecord diagnose(const Field& u, const PhysParams& params, double t, double dt) {
  const Moments m = compute_moments(u, params.p);
  DiagnosticsRecord r;
  r.t = t;
  r.M = m.M;
  r.E = energy_of(m, params);
  r.E0 = energy0_of(m, params);
  r.h1 = std::sqrt(m.h1_sq);
  r.hhalf = std::sqrt(m.hhalf_sq);
  r.y = m.y;
  r.yprime = m.yprime;
  r.ysecond_rhs = virial_rhs(m, params);
  r.A = m.A;
  r.rate_lb = morawetz_rate(m, params);
  r.l4 = m.l4;
  r.sup = m.sup;
  r.dt = dt;
  return r;
}

double threshold_C(double E, double M, const PhysParams& params) {
  if (params.K <= 0.0) return E;
  const double p = params.p;
  if (3.0 * p - 7.0 <= 0.0) {
    throw DomainError("threshold_C: K > 0 needs p > 7/3");
  }
  return E + 3.0 * params.K * params.K * M / (2.0 * (3.0 * p - 7.0) * (p - 1.0));
}

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::global_defocusing: return "global_defocusing";
    case Regime::global_subthreshold: return "global_subthreshold";
    case Regime::mass_critical_below_MQ: return "mass_critical_below_MQ";
    case Regime::blowup_negative_C: return "blowup_negative_C";
    case Regime::blowup_case2: return "blowup_case2";
    case Regime::blowup_case3: return "blowup_case3";
    case Regime::energy_critical_subthreshold: return "energy_critical_subthreshold";
    case Regime::undetermined: return "undetermined";
  }
  return "undetermined";
}

double Classification::witness(std::string_view name) const {
  for (const auto& [key, value] : witnesses) {
    if (key == name) return value;
  }
  return std::nan("");
}

Classification classify_initial_data(const Field& u0, const PhysParams& params,
                                     const GroundRefs& refs) {
  const Moments m = compute_moments(u0, params.p);
  const double p = params.p;
  const double K = params.K;
  const double E = energy_of(m, params);

  Classification out;
  auto note = [&](const char* name, double value) { out.witnesses.emplace_back(name, value); };
  note("M", m.M);
  note("E", E);
  note("h1", std::sqrt(m.h1_sq));

  if (params.lambda > 0) {
    out.regime = Regime::global_defocusing;
    out.reason = "defocusing nonlinearity";
    return out;
  }
  if (params.lambda == 0) {
    out.reason = "linear equation is outside the table";
    return out;
  }

  const double mass_critical = 7.0 / 3.0;
  if (p < mass_critical && !near(p, mass_critical)) {
    out.regime = Regime::global_subthreshold;
    out.reason = "mass-subcritical power";
    return out;
  }

  if (near(p, mass_critical)) {
    if (refs.Q == nullptr) throw DomainError("classify: mass-critical case needs Q");
    const double MQ = refs.Q->norms.mass;
    note("M(Q)", MQ);
    if (m.M < MQ) {
      out.regime = Regime::mass_critical_below_MQ;
      out.reason = "mass below M(Q)";
      return out;
    }
  } else if (p < 5.0 && !near(p, 5.0) && K < 0.0) {
    if (refs.Q == nullptr) throw DomainError("classify: intercritical case needs Q");
    const ConstantsReport c = constants_report(*refs.Q, p);
    const double s = params.s_c();
    // Signed power: E <= 0 satisfies the energy condition outright.
    const double lhs_energy = std::pow(m.M, 1.0 - s) * std::copysign(std::pow(std::abs(E), s), E);
    const double rhs_energy = c.mass_energy_threshold;
    const double lhs_norm = std::pow(m.M, 0.5 * (1.0 - s)) * std::pow(m.h1_sq, 0.5 * s);
    const double rhs_norm = c.norm_threshold;
    note("mass_energy", lhs_energy);
    note("mass_energy_Q", rhs_energy);
    note("mass_norm", lhs_norm);
    note("mass_norm_Q", rhs_norm);
    if (lhs_energy < rhs_energy && lhs_norm < rhs_norm) {
      out.regime = Regime::global_subthreshold;
      out.reason = "mass-energy and mass-gradient products below Q";
      return out;
    }
  } else if (near(p, 5.0) && K < 0.0) {
    if (refs.W == nullptr) throw DomainError("classify: energy-critical case needs W");
    const double h1W = refs.W->norms.h1_sq;
    const double E0W = h1W / 3.0;
    note("E0(W)", E0W);
    note("h1(W)", std::sqrt(h1W));
    if (E < E0W && m.h1_sq < h1W) {
      out.regime = Regime::energy_critical_subthreshold;
      out.reason = "energy and gradient below W";
      return out;
    }
  }

  // Blow-up criteria need 4/3 < p - 1 <= 4 with p above mass-critical.
  if (p > mass_critical && !near(p, mass_critical) && (p < 5.0 || near(p, 5.0))) {
    const double C = threshold_C(E, m.M, params);
    note("C", C);
    note("yprime", m.yprime);
    if (C < 0.0) {
      out.regime = Regime::blowup_negative_C;
      out.reason = "C < 0";
      return out;
    }
    if (C == 0.0 && m.yprime < 0.0) {
      out.regime = Regime::blowup_case2;
      out.reason = "C = 0 with inward virial velocity";
      return out;
    }
    if (C > 0.0) {
      const double need = 24.0 * (p - 1.0) * C * m.y;
      note("yprime_sq", m.yprime * m.yprime);
      note("case3_threshold", need);
      if (m.yprime * m.yprime >= need) {
        out.regime = Regime::blowup_case3;
        out.reason = "virial velocity dominates C";
        return out;
      }
    }
  }
  out.reason = "no sufficient condition applies";
  return out;
}

ThresholdConditions threshold_conditions(const Field& u, const PhysParams& params,
                                         const ConstantsReport& Q) {
  const Moments m = compute_moments(u, params.p);
  const double s = params.s_c();
  ThresholdConditions tc;
  tc.threshold = Q.norm_threshold;
  tc.weak_product = std::pow(m.M, 0.5 * (1.0 - s)) * std::pow(m.h1_sq, 0.5 * s);
  const double strong_sq = m.h1_sq - params.K * m.X;
  tc.strong_product = std::pow(m.M, 0.5 * (1.0 - s)) * std::pow(std::max(strong_sq, 0.0), 0.5 * s);
  tc.weak = tc.weak_product < tc.threshold;
  tc.strong = tc.strong_product < tc.threshold;
  return tc;
}

InteractionL4 interaction_l4(const TimeSeries& series) {
  const auto& s = series.samples;
  if (s.empty()) throw DomainError("interaction_l4: empty series");
  InteractionL4 out;
  double sup_half = s.front().hhalf;
  for (std::size_t i = 1; i < s.size(); ++i) {
    out.total += 0.5 * (s[i].t - s[i - 1].t) * (s[i].l4 + s[i - 1].l4);
    sup_half = std::max(sup_half, s[i].hhalf);
  }
  out.bound_witness = std::sqrt(s.front().M) * sup_half;
  return out;
}

LocalAverage local_time_average(const TimeSeries& series, double R, LocalQuantity which,
                                const PhysParams& params) {
  const auto& snaps = series.snapshots;
  const auto& times = series.snapshot_times;
  if (snaps.empty() || times.size() != snaps.size()) {
    throw DomainError("local_time_average: series carries no snapshots");
  }
  const RadialGrid& g = snaps.front().grid();
  if (!(R > 0.0) || R > g.r_max()) {
    throw DomainError("local_time_average: radius must lie in (0, r_max]");
  }

  auto local = [&](const Field& u) {
    if (which == LocalQuantity::mass) return weighted_integral(u, Weight::ball(R));
    const SpectralAnalysis a = analyze(u);
    const auto w2 = g.moment_weights(2);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size() && g.node(j) <= R; ++j) acc += w2[j] * std::norm(a.du[j]);
    return acc;
  };

  LocalAverage out;
  out.bound = which == LocalQuantity::mass ? 4.0 * params.K : std::pow(params.K, 3);
  if (snaps.size() == 1) {
    out.value = local(snaps.front());
    return out;
  }
  double prev = local(snaps.front());
  double integral = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    const double cur = local(snaps[i]);
    integral += 0.5 * (times[i] - times[i - 1]) * (cur + prev);
    prev = cur;
  }
  const double span = times.back() - times.front();
  out.value = span > 0.0 ? integral / span : prev;
  return out;
}

H1Bound defocusing_h1_bound(const TimeSeries& series, const PhysParams& params) {
  const auto& s = series.samples;
  if (s.empty()) throw DomainError("defocusing_h1_bound: empty series");
  H1Bound out;
  for (const auto& rec : s) {
    out.sup_norm_sq = std::max(out.sup_norm_sq, rec.M + rec.h1 * rec.h1);
    if (params.K != 0.0 && rec.M > 0.0 && rec.h1 > 0.0) {
      const double X = 2.0 * (rec.E0 - rec.E) / params.K;
      out.hardy_max = std::max(out.hardy_max, X / (std::sqrt(rec.M) * rec.h1));
    }
  }
  out.C1 = 1.0 + params.K * params.K * out.hardy_max * out.hardy_max;
  out.bound = out.C1 * s.front().M + 4.0 * s.front().E;
  return out;
}

double hardy_quotient(const Field& u) {
  const Moments m = compute_moments(u, 3.0);
  const double denom = std::sqrt(m.M * m.h1_sq);
  return denom > 0.0 ? m.X / denom : 0.0;
}

}  // namespace cnls
