#pragma once

// Monitored functionals on fields and time series.
//
// Conventions: M = int |u|^2, h1^2 = int |grad u|^2, X = int |u|^2/|x|,
// P = int |u|^{p+1}. Energy E = h1^2/2 - (K/2) X + lambda P/(p+1).

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnls/ground_states.hpp"
#include "cnls/grid.hpp"
#include "cnls/series.hpp"

namespace cnls {

struct EnergyReport {
  double M = 0.0;
  double E = 0.0;
  double E0 = 0.0;
  double h1_sq = 0.0;
  double X = 0.0;
  double P = 0.0;
};

EnergyReport energy_report(const Field& u, const PhysParams& params);

struct VirialReport {
  double y = 0.0;
  double yprime = 0.0;
  /// 8 h1^2 - 4K X + 12 lambda (p-1)/(p+1) P
  double ysecond_rhs = 0.0;
};

VirialReport virial_report(const Field& u, const PhysParams& params);

struct MorawetzReport {
  double A = 0.0;
  /// -(K/2) int |u|^2/|x|^2 + lambda 2(p-1)/(p+1) int |u|^{p+1}/|x|
  double rate_lb = 0.0;
};

MorawetzReport morawetz_report(const Field& u, const PhysParams& params);

/// Every functional at once, sharing one spectral analysis.
DiagnosticsRecord diagnose(const Field& u, const PhysParams& params, double t = 0.0,
                           double dt = 0.0);

/// E for K <= 0; E + 3K^2 M / (2(3p-7)(p-1)) for K > 0 (requires p > 7/3).
double threshold_C(double E, double M, const PhysParams& params);

enum class Regime {
  global_defocusing,
  global_subthreshold,
  mass_critical_below_MQ,
  blowup_negative_C,
  blowup_case2,
  blowup_case3,
  energy_critical_subthreshold,
  undetermined,
};

std::string_view regime_name(Regime regime);

struct Classification {
  Regime regime = Regime::undetermined;
  std::vector<std::pair<std::string, double>> witnesses;
  std::string reason;

  double witness(std::string_view name) const;
};

struct GroundRefs {
  const GroundState* Q = nullptr;
  const GroundState* W = nullptr;
};

/// Decision table over computed witnesses. Asserts sufficient conditions
/// only; anything not covered is `undetermined`. Throws DomainError when the
/// needed reference profile is missing.
Classification classify_initial_data(const Field& u0, const PhysParams& params,
                                     const GroundRefs& refs);

/// Norm products compared against ||Q||_2^{1-s_c} ||Q||_{H1}^{s_c}:
/// weak uses ||u||_{H1}^2, strong uses ||u||_{H1}^2 - K int |u|^2/|x|.
struct ThresholdConditions {
  double weak_product = 0.0;
  double strong_product = 0.0;
  double threshold = 0.0;
  bool weak = false;
  bool strong = false;
};

ThresholdConditions threshold_conditions(const Field& u, const PhysParams& params,
                                         const ConstantsReport& Q);

struct InteractionL4 {
  /// Trapezoid integral of ||u(t)||_4^4 over the sampled times.
  double total = 0.0;
  /// ||u(0)||_2 * sup_t ||u(t)||_{H^{1/2} dot}
  double bound_witness = 0.0;
};

InteractionL4 interaction_l4(const TimeSeries& series);

enum class LocalQuantity { mass, gradient };

struct LocalAverage {
  double value = 0.0;
  /// 4K for mass, K^3 for gradient.
  double bound = 0.0;
};

/// Time average over the kept snapshots of int_{|x|<=R} |u|^2 (mass) or of
/// |d_r u|^2 (gradient). Needs a series recorded with snapshots.
LocalAverage local_time_average(const TimeSeries& series, double R, LocalQuantity which,
                                const PhysParams& params);

/// X / (||u||_2 ||u||_{H1}), the Hardy-type quotient of a field.
double hardy_quotient(const Field& u);

/// Uniform H^1 bound for defocusing runs. With c the largest Hardy quotient
/// seen on the samples (X recovered as 2(E0 - E)/K), Young's inequality gives
/// ||u||_{H^1}^2 = M + h1^2 <= (1 + K^2 c^2) M + 4E.
struct H1Bound {
  double sup_norm_sq = 0.0;  // max over samples of M + h1^2
  double bound = 0.0;        // C1 M(u0) + 4 E(u0)
  double C1 = 1.0;
  double hardy_max = 0.0;
};

H1Bound defocusing_h1_bound(const TimeSeries& series, const PhysParams& params);

}  // namespace cnls
