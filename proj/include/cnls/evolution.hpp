#pragma once

#include <vector>

#include "cnls/grid.hpp"
#include "cnls/series.hpp"

namespace cnls {

/// Where the Coulomb term enters the Strang splitting.
///
/// `linear` (default): the phase substep carries only the nonlinearity and the
/// middle substep is the Cayley transform of -Lap - K/r, solved by BiCGSTAB
/// preconditioned with the kinetic part (exact kinetic flow when K = 0).
///
/// `phase`: -K/r sits in the pointwise phase next to the nonlinearity and the
/// middle substep is the exact kinetic flow. Data with u(0) != 0 then sees a
/// phase exp(i K dt/(2r)) that is singular at the origin and the scheme loses
/// order; kept for comparison.
enum class CoulombSplit { linear, phase };

/// Blow-up detector thresholds.
struct DetectorThresholds {
  double h1_factor = 10.0;
  double sup_max = 1e3;
  double dt_min = 1e-9;
};

struct EvolveConfig {
  EvolveConfig(Field initial_field, PhysParams phys)
      : initial(std::move(initial_field)), params(phys) {}

  Field initial;
  PhysParams params;
  double dt0 = 1e-3;
  double t_max = 1.0;
  bool adaptive = false;
  /// Cap on dt growth between consecutive adaptive steps.
  double safety = 2.0;
  DetectorThresholds detector;
  bool absorber = false;
  int sample_stride = 1;
  bool keep_snapshots = false;
  /// Keep a field for every snapshot_stride-th sample (the final sample is always kept).
  int snapshot_stride = 1;
  CoulombSplit split = CoulombSplit::linear;
  /// Mutation hook for the self-test: the stepper uses -K in place of K.
  bool flip_coulomb_sign = false;
};

/// Strang splitting for i u_t = -Lap u - (K/r) u + lambda |u|^{p-1} u:
/// half phase, linear substep, half phase re-evaluated on the updated field.
/// Buffers are reused across steps.
class StrangStepper {
 public:
  StrangStepper(const RadialGrid& grid, const PhysParams& params,
                CoulombSplit split = CoulombSplit::linear, double coulomb_sign = 1.0);

  /// Advances u in place. Throws ConvergenceError if the linear solve stalls.
  void step(std::vector<cplx>& u, double dt);

  /// BiCGSTAB iterations used by the most recent step.
  int last_iterations() const noexcept { return last_iterations_; }

 private:
  void phase(std::vector<cplx>& u, double half_dt) const;
  void kinetic(std::vector<cplx>& v, double dt);
  void cayley(std::vector<cplx>& v, double dt);
  void apply_spectral(std::vector<cplx>& v, const std::vector<cplx>& multiplier);

  RadialGrid grid_;
  PhysParams params_;
  CoulombSplit split_;
  std::vector<double> potential_;  // -K/r with the origin-corrected first node
  bool has_potential_ = false;
  std::vector<cplx> v_, c_, mult_;
  std::vector<cplx> b_, y_, r_, rhat_, p_, q_, s_, t_, z_;
  int last_iterations_ = 0;
};

/// One Strang step. Throws NumericalError on non-finite output.
Field strang_step(const Field& u, double dt, const PhysParams& params,
                  CoulombSplit split = CoulombSplit::linear);

/// One implicit-midpoint step with the three-point Laplacian on v = r u and
/// the plain -K/r potential; fixed-point iteration on the nonlinear midpoint
/// (at most 20 sweeps, tolerance 1e-12). Throws ConvergenceError.
Field cn_reference_step(const Field& u, double dt, const PhysParams& params);

/// Runs the stepper to t_max, recording diagnostics every sample_stride steps
/// and stopping early on detected blow-up or step underflow.
TimeSeries evolve(const EvolveConfig& config);

/// cos^2 taper over the outer 10% of the radius.
std::vector<double> absorber_mask(const RadialGrid& grid);

}  // namespace cnls
