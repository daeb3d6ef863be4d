#pragma once

// Spectral calculus and quadrature on a RadialGrid.
//
// Integrals are over the ball |x| <= r_max in R^3 (radial measure 4*pi*r^2 dr)
// with the node rule h*sum_j. The rule is spectrally accurate whenever the
// integrand extends to a smooth even function of r; the two odd-integrand
// cases (weights 1/r and 1/r^2) get explicit origin corrections.

#include <span>
#include <vector>

#include "cnls/grid.hpp"

namespace cnls {

SpectralField to_spectral(const Field& field);
Field from_spectral(const SpectralField& spectral);

/// Lap u = (1/r) d^2/dr^2 (r u), multiplier -kappa_k^2 on sine modes.
Field apply_laplacian(const Field& field);

/// d/dr u = (v' - u)/r with v' summed spectrally.
Field radial_derivative(const Field& field);

/// u(0) = v'(0), read off the spectral cosine sum.
cplx origin_value(const Field& field);

/// ||u||_{L^q}, q >= 1.
double lp_norm(const Field& field, double q);

/// Homogeneous Sobolev norm ||u||_{H^s dot}, s in [0, 1]; squared value is
/// 4*pi*(r_max/2)*sum_k kappa_k^{2s} |c_k|^2.
double hdot_norm(const Field& field, double s);

enum class WeightKind { r2, r1, one, inv_r, inv_r2, ball };

struct Weight {
  WeightKind kind = WeightKind::one;
  double radius = 0.0;  // only for ball

  static Weight r2() { return {WeightKind::r2}; }
  static Weight r1() { return {WeightKind::r1}; }
  static Weight one() { return {WeightKind::one}; }
  static Weight inv_r() { return {WeightKind::inv_r}; }
  static Weight inv_r2() { return {WeightKind::inv_r2}; }
  static Weight ball(double R) { return {WeightKind::ball, R}; }
};

/// int w(|x|) |u|^2 dx over the truncated domain.
double weighted_integral(const Field& field, Weight weight);

/// 4*pi * int_0^{r_max} g(r) r^power dr from node samples g_j, power in 0..4.
/// `g_origin` is g(0); it enters the origin corrections for power 0 and 1.
double integrate_radial(const RadialGrid& grid, std::span<const double> g, int power,
                        double g_origin);

/// Everything derived from one forward transform of a field.
struct SpectralAnalysis {
  std::vector<cplx> coefficients;  // sine coefficients of r*u
  std::vector<cplx> du;            // d/dr u at the nodes
  cplx origin;                     // u(0)
};

SpectralAnalysis analyze(const Field& field);

/// Squared H^s-dot norm from sine coefficients.
double hdot_norm_squared(const RadialGrid& grid, std::span<const cplx> coefficients, double s);

/// Evaluate the sine series of r*u at arbitrary radii and return u there
/// (0 beyond r_max; the spectral origin value at r = 0). O(n) per radius.
std::vector<cplx> evaluate(const Field& field, std::span<const double> radii);

}  // namespace cnls
