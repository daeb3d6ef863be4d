#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cnls/grid.hpp"

namespace cnls {

// Q(p):   -Lap Q + Q = Q^p
// W:      -Lap W = W^5
// f(K,p): -Lap f - (K/r) f + f + f^p = 0, K > 0
enum class ProfileKind { Q, W, f };

std::string_view kind_name(ProfileKind kind);

struct ProfileNorms {
  double mass = 0.0;   // ||.||_2^2 on the truncated ball
  double h1_sq = 0.0;  // ||.||_{H^1 dot}^2
  double lp1 = 0.0;    // ||.||_{p+1}^{p+1}
  bool mass_divergent = false;
};

struct GroundState {
  ProfileKind kind;
  double p;
  double K;
  Field profile;
  double amplitude;  // value at the origin
  double residual;   // sup-norm of the radial ODE residual at the nodes
  ProfileNorms norms;
};

/// Outward shooting from r = h/2 with a series start, RK4 on a lattice
/// h/32 (refined to h/64, h/128 if the residual misses tol) and
/// bisection on the central amplitude. Past the radius where the bracketing
/// trajectories separate, the profile continues along the decaying solution
/// of the linearized equation.
///
/// kind must be Q (1 < p < 5) or f (K > 0, 1 < p <= 5).
/// Throws ConvergenceError if no bracket exists in [1e-3, 1e3] or the
/// residual exceeds tol.
GroundState shoot_ground_state(ProfileKind kind, double p, double K, const RadialGrid& grid,
                               double tol = 1e-8);

/// W(r) = (1 + r^2/3)^{-1/2}. The residual is measured with the closed-form
/// derivatives on nodes r <= 10.
GroundState explicit_W(const RadialGrid& grid);

/// Pointwise W'' + (2/r) W' + W^5 from closed-form derivatives.
double w_ode_residual(double r);

struct ConstantsReport {
  double p = 0.0;
  double s_c = 0.0;
  double C0 = 0.0;
  double M = 0.0;
  double h1_sq = 0.0;
  double lp1 = 0.0;
  double E0 = 0.0;
  /// |C0 ||Q||_2^{(1-s_c)(p-1)} ||Q||_{H1}^{s_c(p-1)} / (2(p+1)/(3(p-1))) - 1|
  double identity_qah1_residual = 0.0;
  /// |E0 - (3p-7)/(6(p-1)) ||Q||_{H1}^2| and |E0 - (3p-7)/(4(p+1)) ||Q||_{p+1}^{p+1}|,
  /// both divided by ||Q||_{H1}^2.
  double energy_identity_residuals[2] = {0.0, 0.0};
  /// M^{1-s_c} E0^{s_c}; NaN when E0 <= 0 and s_c is not an integer.
  double mass_energy_threshold = 0.0;
  /// ||Q||_2^{1-s_c} ||Q||_{H1}^{s_c}
  double norm_threshold = 0.0;
};

ConstantsReport constants_report(const GroundState& Q, double p);

struct ImaginaryTimeOptions {
  std::optional<double> fixed_mass;
  /// Converged when the relative L2 change between successive iterates, or
  /// (for Q) the relative residual of -Lap u + omega u - mu u^p, drops below tol.
  double tol = 1e-9;
  double tau = 0.5;
  int max_iterations = 20000;
};

struct ImaginaryTimeResult {
  GroundState state;
  /// Value of the descended functional after each iteration.
  std::vector<double> functional;
  /// Mass after each iteration.
  std::vector<double> mass;
  int iterations = 0;
  /// Raw iterate relates to the profile by u(r) = amplitude_scale * profile(length_scale * r).
  double amplitude_scale = 1.0;
  double length_scale = 1.0;
  Field raw;
};

/// Gradient descent cross-check for the shooting solver.
///
/// lambda = -1, K = 0: ascent of the Weinstein quotient
/// ||u||_{p+1}^{p+1} / (||u||_2^{(5-p)/2} ||u||_{H1}^{3(p-1)/2}) with the mass
/// projected back after every step; the functional record is the negative
/// quotient. The maximizer is a rescaled Q, returned in Q's own units.
///
/// lambda = +1, K > 2: descent of the action
/// (1/2)||u||_{H1}^2 - (K/2) int |u|^2/r + (1/2) M + ||u||_{p+1}^{p+1}/(p+1),
/// whose critical point is f itself. fixed_mass is rejected for this kind.
///
/// The reported residual uses the spectral Laplacian; for f it skips r < 1,
/// where the cusp at the origin limits spectral accuracy.
ImaginaryTimeResult imaginary_time_ground(const PhysParams& params, const RadialGrid& grid,
                                          const ImaginaryTimeOptions& options = {});

}  // namespace cnls
