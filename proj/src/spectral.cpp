#include "cnls/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cnls/error.hpp"
#include "cnls/simd.hpp"
#include "cnls/transform.hpp"

namespace cnls {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::vector<cplx> sine_coefficients(const Field& field) {
  const RadialGrid& g = field.grid();
  std::vector<cplx> v(field.values().begin(), field.values().end());
  simd::mul_real(v, g.nodes());
  std::vector<cplx> c(g.size());
  g.transform().forward(v, c);
  return c;
}

std::vector<cplx> values_from_coefficients(const RadialGrid& g, std::span<const cplx> c) {
  std::vector<cplx> u(g.size());
  g.transform().inverse(c, u);
  simd::mul_real(u, g.inv_nodes());
  return u;
}

// v'(r_j) for j = 0..n+1 (both walls included).
std::vector<cplx> v_prime(const RadialGrid& g, std::span<const cplx> c) {
  std::vector<cplx> a(c.begin(), c.end());
  simd::mul_real(a, g.wavenumbers());
  std::vector<cplx> out(g.size() + 2);
  g.transform().cosine_sum(a, out);
  return out;
}

}  // namespace

SpectralField to_spectral(const Field& field) {
  return SpectralField{field.grid(), sine_coefficients(field)};
}

Field from_spectral(const SpectralField& spectral) {
  if (spectral.coefficients.size() != spectral.grid.size()) {
    throw SizingError("spectral field: coefficient count does not match grid");
  }
  return Field(spectral.grid, values_from_coefficients(spectral.grid, spectral.coefficients));
}

Field apply_laplacian(const Field& field) {
  const RadialGrid& g = field.grid();
  std::vector<cplx> c = sine_coefficients(field);
  const auto kappa = g.wavenumbers();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= -kappa[k] * kappa[k];
  return Field(g, values_from_coefficients(g, c));
}

SpectralAnalysis analyze(const Field& field) {
  const RadialGrid& g = field.grid();
  SpectralAnalysis out;
  out.coefficients = sine_coefficients(field);
  const std::vector<cplx> vp = v_prime(g, out.coefficients);
  out.origin = vp[0];
  out.du.resize(g.size());
  const auto inv_r = g.inv_nodes();
  const auto u = field.values();
  for (std::size_t j = 0; j < g.size(); ++j) out.du[j] = (vp[j + 1] - u[j]) * inv_r[j];
  return out;
}

Field radial_derivative(const Field& field) {
  return Field(field.grid(), analyze(field).du);
}

cplx origin_value(const Field& field) {
  const std::vector<cplx> c = sine_coefficients(field);
  return v_prime(field.grid(), c)[0];
}

double integrate_radial(const RadialGrid& grid, std::span<const double> g, int power,
                        double g_origin) {
  if (g.size() != grid.size()) throw SizingError("integrate_radial: length mismatch");
  const auto w = grid.moment_weights(power);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) acc += w[j] * g[j];
  const double h = grid.spacing();
  if (power == 0) acc += kFourPi * 0.5 * h * g_origin;
  if (power == 1) acc += kFourPi * h * h / 12.0 * g_origin;
  return acc;
}

double weighted_integral(const Field& field, Weight weight) {
  const RadialGrid& g = field.grid();
  const auto u = field.values();
  const double h = g.spacing();
  switch (weight.kind) {
    case WeightKind::r2:
      return simd::sum_w_abs2(u, g.moment_weights(4));
    case WeightKind::r1:
      return simd::sum_w_abs2(u, g.moment_weights(3));
    case WeightKind::one:
      return simd::sum_w_abs2(u, g.moment_weights(2));
    case WeightKind::inv_r:
      // Same node weights as the Coulomb multiplier in the stepper.
      return simd::sum_w_abs2(u, g.moment_weights(1)) + kFourPi * h * h / 12.0 * std::norm(u[0]);
    case WeightKind::inv_r2:
      return simd::sum_w_abs2(u, g.moment_weights(0)) +
             kFourPi * 0.5 * h * std::norm(origin_value(field));
    case WeightKind::ball: {
      if (!(weight.radius >= 0.0) || weight.radius > g.r_max()) {
        throw DomainError("weighted_integral: ball radius " + std::to_string(weight.radius) +
                          " outside [0, r_max]");
      }
      const auto w = g.moment_weights(2);
      double acc = 0.0;
      for (std::size_t j = 0; j < u.size() && g.node(j) <= weight.radius; ++j) {
        acc += w[j] * std::norm(u[j]);
      }
      return acc;
    }
  }
  throw DomainError("weighted_integral: unknown weight");
}

double lp_norm(const Field& field, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("lp_norm: exponent must be >= 1");
  const RadialGrid& g = field.grid();
  const auto w = g.moment_weights(2);
  const auto u = field.values();
  if (q == 2.0) return std::sqrt(simd::sum_w_abs2(u, w));
  if (q == 4.0) return std::pow(simd::sum_w_abs4(u, w), 0.25);
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += w[j] * std::pow(std::abs(u[j]), q);
  return std::pow(acc, 1.0 / q);
}

double hdot_norm_squared(const RadialGrid& grid, std::span<const cplx> coefficients, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("hdot_norm: order s must lie in [0, 1]");
  if (coefficients.size() != grid.size()) throw SizingError("hdot_norm: length mismatch");
  const auto kappa = grid.wavenumbers();
  double acc = 0.0;
  if (s == 0.0) {
    for (const auto& c : coefficients) acc += std::norm(c);
  } else if (s == 1.0) {
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      acc += kappa[k] * kappa[k] * std::norm(coefficients[k]);
    }
  } else {
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      acc += std::pow(kappa[k], 2.0 * s) * std::norm(coefficients[k]);
    }
  }
  return kFourPi * 0.5 * grid.r_max() * acc;
}

double hdot_norm(const Field& field, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("hdot_norm: order s must lie in [0, 1]");
  return std::sqrt(hdot_norm_squared(field.grid(), sine_coefficients(field), s));
}

std::vector<cplx> evaluate(const Field& field, std::span<const double> radii) {
  const RadialGrid& g = field.grid();
  const std::vector<cplx> c = sine_coefficients(field);
  const auto kappa = g.wavenumbers();
  std::vector<cplx> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (r > g.r_max() || r < 0.0) continue;
    cplx acc = 0.0;
    if (r == 0.0) {
      for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * kappa[k];
      out[i] = acc;
    } else {
      for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * std::sin(kappa[k] * r);
      out[i] = acc / r;
    }
  }
  return out;
}

}  // namespace cnls
