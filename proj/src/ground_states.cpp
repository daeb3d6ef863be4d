#include "cnls/ground_states.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cnls/error.hpp"
#include "cnls/simd.hpp"
#include "cnls/spectral.hpp"
#include "cnls/transform.hpp"

namespace cnls {
namespace {

template <class T>
T signed_pow(T y, double p) {
  return std::copysign(std::pow(std::abs(y), static_cast<T>(p)), y);
}

ProfileNorms measure(const Field& u, double p) {
  const RadialGrid& g = u.grid();
  ProfileNorms n;
  const SpectralField s = to_spectral(u);
  n.mass = weighted_integral(u, Weight::one());
  n.h1_sq = hdot_norm_squared(g, s.coefficients, 1.0);
  const auto w = g.moment_weights(2);
  for (std::size_t j = 0; j < u.size(); ++j) n.lp1 += w[j] * std::pow(std::abs(u[j]), p + 1.0);
  return n;
}

enum class Outcome { crosses, turns_up, none };

template <class T = double>
struct Shot {
  std::vector<T> y;
  Outcome outcome = Outcome::none;
};

// Radial ODE y'' = F(r, y, y') on the fine lattice r_m = h/2 + m*h/refine.
class Shooter {
 public:
  Shooter(ProfileKind kind, double p, double K, const RadialGrid& grid, std::size_t refine)
      : kind_(kind), p_(p), K_(K), r0_(0.5 * grid.spacing()),
        delta_(grid.spacing() / static_cast<double>(refine)), refine_(refine),
        last_(refine * grid.size()) {}

  /// Fine index of grid node j (0-based).
  std::size_t node_index(std::size_t j) const { return refine_ * (j + 1) - refine_ / 2; }

  double radius(std::size_t m) const { return r0_ + static_cast<double>(m) * delta_; }
  double step() const { return delta_; }
  std::size_t last() const { return last_; }

  template <class T>
  T accel(T r, T y, T dy) const {
    if (kind_ == ProfileKind::Q) return -2 * dy / r + y - signed_pow(y, p_);
    return -2 * dy / r + (1 - K_ / r) * y + signed_pow(y, p_);
  }

  template <class T>
  void rk4(T r, T d, T& y, T& dy) const {
    const T half = d / 2;
    const T k1y = dy;
    const T k1v = accel(r, y, dy);
    const T k2y = dy + half * k1v;
    const T k2v = accel(r + half, y + half * k1y, k2y);
    const T k3y = dy + half * k2v;
    const T k3v = accel(r + half, y + half * k2y, k3y);
    const T k4y = dy + d * k3v;
    const T k4v = accel(r + d, y + d * k3y, k4y);
    y += d / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    dy += d / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }

  template <class T = double>
  Shot<T> run(double amplitude) const {
    const T a = amplitude;
    T y = 0;
    T dy = 0;
    const T e = r0_;
    if (kind_ == ProfileKind::Q) {
      const T b2 = (a - std::pow(a, T(p_))) / 6;
      const T b4 = b2 * (1 - p_ * std::pow(a, T(p_ - 1))) / 20;
      y = a + b2 * e * e + b4 * e * e * e * e;
      dy = 2.0 * b2 * e + 4.0 * b4 * e * e * e;
    } else {
      const T b1 = -T(K_) / 2;
      const T b2 = (1 + std::pow(a, T(p_ - 1)) + T(K_) * K_ / 2) / 6;
      const T b3 = (b1 * (1 + p_ * std::pow(a, T(p_ - 1))) - K_ * b2) / 12;
      y = a * (1.0 + e * (b1 + e * (b2 + e * b3)));
      dy = a * (b1 + e * (2.0 * b2 + 3.0 * e * b3));
    }
    Shot<T> shot;
    shot.y.reserve(last_ + 1);
    shot.y.push_back(y);
    for (std::size_t m = 0; m < last_; ++m) {
      // The 1/r coefficients vary on the scale r itself; subdivide close to the origin.
      const T r = r0_ + static_cast<T>(m) * delta_;
      const int sub = 1 + static_cast<int>(256.0 * delta_ / static_cast<double>(r));
      const T d = T(delta_) / sub;
      for (int i = 0; i < sub; ++i) rk4<T>(r + i * d, d, y, dy);
      shot.y.push_back(y);
      if (y < 0) {
        shot.outcome = Outcome::crosses;
        return shot;
      }
      if (dy > 0 || y > 1e6 * std::max(amplitude, 1.0)) {
        shot.outcome = Outcome::turns_up;
        return shot;
      }
    }
    return shot;
  }

 private:
  ProfileKind kind_;
  double p_;
  double K_;
  double r0_;
  double delta_;
  std::size_t refine_;
  std::size_t last_;
};

// Decaying solution of v'' = (1 - K/r) v (v = r*y) on fine indices [from, last],
// normalized to 1 at index `anchor`. Integrated inward as the Riccati pair
// g = v'/v, L = log v, which is stable in that direction.
std::vector<double> linear_tail(const Shooter& sh, double K, std::size_t from, std::size_t anchor) {
  const double d = sh.step();
  const std::size_t extra = static_cast<std::size_t>(std::ceil(30.0 / d));
  const std::size_t far = sh.last() + extra;
  std::vector<double> L(sh.last() - from + 1);
  double r = sh.radius(far);
  double g = 0.5 * K / r - 1.0;
  double logv = 0.0;
  auto rhs_g = [K](double rr, double gg) { return 1.0 - K / rr - gg * gg; };
  for (std::size_t m = far; m > from; --m) {
    if (m <= sh.last()) L[m - from] = logv;
    const double h = -d;
    const double k1g = rhs_g(r, g), k1l = g;
    const double g2 = g + 0.5 * h * k1g;
    const double k2g = rhs_g(r + 0.5 * h, g2), k2l = g2;
    const double g3 = g + 0.5 * h * k2g;
    const double k3g = rhs_g(r + 0.5 * h, g3), k3l = g3;
    const double g4 = g + h * k3g;
    const double k4g = rhs_g(r + h, g4), k4l = g4;
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    logv += h / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
    r = sh.radius(m - 1);
  }
  L[0] = logv;
  const double ref = L[anchor - from] - std::log(sh.radius(anchor));
  std::vector<double> tail(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double rr = sh.radius(from + i);
    tail[i] = std::exp(L[i] - std::log(rr) - ref);
  }
  return tail;
}

// Nine-point residual of the profile ODE at fine index m.
long double node_residual(const Shooter& sh, const std::vector<long double>& y, std::size_t m,
                     std::size_t spread, ProfileKind kind, double p, double K) {
  using L = long double;
  static constexpr L c1[] = {0.0L, 4.0L / 5, -1.0L / 5, 4.0L / 105, -1.0L / 280};
  static constexpr L c2[] = {-205.0L / 72, 8.0L / 5, -1.0L / 5, 8.0L / 315, -1.0L / 560};
  const std::size_t k = std::max<std::size_t>(1, std::min(spread, m / 4));
  const L s = static_cast<L>(k) * sh.step();
  L d1 = 0;
  L d2 = c2[0] * y[m];
  for (std::size_t i = 1; i <= 4; ++i) {
    const L plus = y[m + i * k], minus = y[m - i * k];
    d1 += c1[i] * (plus - minus);
    d2 += c2[i] * (plus + minus);
  }
  d1 /= s;
  d2 /= s * s;
  const L r = static_cast<L>(sh.radius(m));
  const L y0 = y[m];
  if (kind == ProfileKind::Q) return d2 + 2 * d1 / r - y0 + signed_pow(y0, p);
  return d2 + 2 * d1 / r - (1 - K / r) * y0 - signed_pow(y0, p);
}

}  // namespace

std::string_view kind_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Q:
      return "Q";
    case ProfileKind::W:
      return "W";
    case ProfileKind::f:
      return "f";
  }
  return "?";
}

namespace {

struct Attempt {
  std::vector<double> values;
  double amplitude;
  double residual;
};

Attempt shoot_once(ProfileKind kind, double p, double K, const RadialGrid& grid,
                   std::size_t refine) {
  const Shooter sh(kind, p, K, grid, refine);

  // Coarse logarithmic scan for the first change of outcome.
  constexpr int kPerDecade = 8;
  constexpr int kSamples = 6 * kPerDecade + 1;
  double lo = 0.0, hi = 0.0;
  Shot<> shot_lo, shot_hi;
  bool bracketed = false;
  Shot<> prev = sh.run(1e-3);
  double prev_a = 1e-3;
  for (int k = 1; k < kSamples && !bracketed; ++k) {
    const double a = 1e-3 * std::pow(10.0, static_cast<double>(k) / kPerDecade);
    Shot<> cur = sh.run(a);
    if (cur.outcome == Outcome::none) continue;  // e.g. the constant solution Q = 1
    if (prev.outcome == Outcome::none) {
      prev = std::move(cur);
      prev_a = a;
      continue;
    }
    if (cur.outcome != prev.outcome) {
      lo = prev_a;
      hi = a;
      shot_lo = std::move(prev);
      shot_hi = std::move(cur);
      bracketed = true;
      break;
    }
    prev = std::move(cur);
    prev_a = a;
  }
  if (!bracketed) {
    throw ConvergenceError("shoot_ground_state: no bisection bracket for " +
                           std::string(kind_name(kind)) + " in amplitude range [1e-3, 1e3]");
  }

  for (int it = 0; it < 200; ++it) {
    if (shot_lo.outcome == Outcome::none || shot_hi.outcome == Outcome::none) break;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    Shot<> s = sh.run(mid);
    if (s.outcome == shot_lo.outcome) {
      lo = mid;
      shot_lo = std::move(s);
    } else {
      hi = mid;
      shot_hi = std::move(s);
    }
  }
  if (shot_lo.outcome == Outcome::none) shot_hi = shot_lo, hi = lo;
  if (shot_hi.outcome == Outcome::none) shot_lo = shot_hi, lo = hi;

  // Trust the shot while the bracketing trajectories agree.
  const std::size_t common = std::min(shot_lo.y.size(), shot_hi.y.size());
  std::size_t m_star = common - 1;
  for (std::size_t m = 0; m < common; ++m) {
    const double a = shot_lo.y[m], b = shot_hi.y[m];
    if (std::abs(a - b) > 1e-6 * std::max(std::abs(a), std::abs(b))) {
      m_star = m;
      break;
    }
  }
  // Drop the last few points, which may sit next to a turning event.
  if (m_star + 1 < common || shot_lo.outcome != Outcome::none) m_star = m_star > 8 ? m_star - 8 : 0;

  // Final trajectories in extended precision so the residual stencils are not
  // limited by rounding in steep cores.
  const Shot<long double> ext_lo = sh.run<long double>(lo);
  const Shot<long double> ext_hi = sh.run<long double>(hi);
  m_star = std::min({m_star, ext_lo.y.size() - 1, ext_hi.y.size() - 1});
  std::vector<long double> y(sh.last() + 1);
  for (std::size_t m = 0; m <= m_star; ++m) y[m] = 0.5L * (ext_lo.y[m] + ext_hi.y[m]);

  if (m_star < sh.last()) {
    const double r_star = sh.radius(m_star);
    const double need = std::min(0.5 * grid.r_max(), 8.0);
    if (r_star < need) {
      throw ConvergenceError("shoot_ground_state: trajectory resolved only to r = " +
                             std::to_string(r_star) + " (need " + std::to_string(need) + ")");
    }
    const std::size_t blend =
        std::min(m_star, static_cast<std::size_t>(std::round(2.0 / sh.step())));
    const std::size_t m_b = m_star - blend;
    const std::vector<double> tail = linear_tail(sh, K, m_b, m_star);
    const long double scale = y[m_star];
    for (std::size_t m = m_b; m <= sh.last(); ++m) {
      const long double t = scale * tail[m - m_b];
      if (m >= m_star) {
        y[m] = t;
      } else {
        const double s = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(m - m_b) /
                                              static_cast<double>(blend));
        y[m] = (1 - s) * y[m] + s * t;
      }
    }
  }

  const std::size_t n = grid.size();
  const std::size_t spread =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::round(1e-3 / sh.step())));
  std::vector<double> values(n);
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = sh.node_index(j);
    values[j] = static_cast<double>(y[m]);
    if (m + 4 * spread <= sh.last()) {
      residual = std::max(
          residual, static_cast<double>(std::abs(node_residual(sh, y, m, spread, kind, p, K))));
    }
  }
  return Attempt{std::vector<double>(values.begin(), values.end()), 0.5 * (lo + hi), residual};
}

}  // namespace

GroundState shoot_ground_state(ProfileKind kind, double p, double K, const RadialGrid& grid,
                               double tol) {

  if (!(tol > 0.0)) throw DomainError("shoot_ground_state: tol must be positive");
  if (kind == ProfileKind::Q) {
    if (!(p > 1.0 && p < 5.0)) throw DomainError("shoot_ground_state: Q needs 1 < p < 5");
    K = 0.0;
  } else if (kind == ProfileKind::f) {
    if (!(K > 0.0)) throw DomainError("shoot_ground_state: f needs K > 0");
    if (!(p > 1.0 && p <= 5.0)) throw DomainError("shoot_ground_state: f needs 1 < p <= 5");
  } else {
    throw DomainError("shoot_ground_state: W is not shot; use explicit_W");
  }


  // Steep cores (large p) need a finer integration lattice; refine until the
  // residual target is met.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t refine : {32u, 64u, 128u}) {
    Attempt at = shoot_once(kind, p, K, grid, refine);
    best = std::min(best, at.residual);
    if (at.residual < tol) {
      std::vector<cplx> values(at.values.begin(), at.values.end());
      Field profile(grid, std::move(values));
      return GroundState{kind, p, K, profile, at.amplitude, at.residual, measure(profile, p)};
    }
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "shoot_ground_state: residual %.3g exceeds tolerance %.3g", best,
                tol);
  throw ConvergenceError(msg);
}

double w_ode_residual(double r) {
  const double s = 1.0 + r * r / 3.0;
  const double w = 1.0 / std::sqrt(s);
  const double w1 = -(r / 3.0) * std::pow(s, -1.5);
  const double w2 = -(1.0 / 3.0) * std::pow(s, -1.5) + (r * r / 3.0) * std::pow(s, -2.5);
  return w2 + 2.0 * w1 / r + std::pow(w, 5);
}

GroundState explicit_W(const RadialGrid& grid) {
  Field profile = Field::sample(grid, [](double r) { return 1.0 / std::sqrt(1.0 + r * r / 3.0); });
  double residual = 0.0;
  for (std::size_t j = 0; j < grid.size() && grid.node(j) <= 10.0; ++j) {
    residual = std::max(residual, std::abs(w_ode_residual(grid.node(j))));
  }
  // r W does not vanish at r_max, so a sine series of the truncated profile
  // rings; the norms use the closed-form derivative with the trapezoid rule,
  // whose wall node r_max is known in closed form too.
  ProfileNorms norms;
  const double h = grid.spacing();
  auto add = [&](double r, double weight) {
    const double s = 1.0 + r * r / 3.0;
    const double w = 1.0 / std::sqrt(s);
    const double dw = -(r / 3.0) * std::pow(s, -1.5);
    const double m = 4.0 * std::numbers::pi * weight * r * r;
    norms.mass += m * w * w;
    norms.h1_sq += m * dw * dw;
    norms.lp1 += m * std::pow(w, 6);
  };
  for (std::size_t j = 0; j < grid.size(); ++j) add(grid.node(j), h);
  add(grid.r_max(), 0.5 * h);
  norms.mass_divergent = true;
  return GroundState{ProfileKind::W, 5.0, 0.0, profile, 1.0, residual, norms};
}

ConstantsReport constants_report(const GroundState& Q, double p) {
  if (Q.kind != ProfileKind::Q) throw DomainError("constants_report: needs a Q profile");
  const ProfileNorms& n = Q.norms;
  if (!(n.mass > 0.0 && n.h1_sq > 0.0 && n.lp1 > 0.0)) {
    throw DomainError("constants_report: degenerate profile norms");
  }
  ConstantsReport c;
  c.p = p;
  c.s_c = 1.5 - 2.0 / (p - 1.0);
  c.M = n.mass;
  c.h1_sq = n.h1_sq;
  c.lp1 = n.lp1;
  const double l2 = std::sqrt(n.mass);
  const double h1 = std::sqrt(n.h1_sq);
  c.C0 = n.lp1 / (std::pow(l2, 0.5 * (5.0 - p)) * std::pow(h1, 1.5 * (p - 1.0)));
  const double lhs =
      c.C0 * std::pow(l2, (1.0 - c.s_c) * (p - 1.0)) * std::pow(h1, c.s_c * (p - 1.0));
  const double rhs = 2.0 * (p + 1.0) / (3.0 * (p - 1.0));
  c.identity_qah1_residual = std::abs(lhs / rhs - 1.0);
  c.E0 = 0.5 * n.h1_sq - n.lp1 / (p + 1.0);
  c.energy_identity_residuals[0] =
      std::abs(c.E0 - (3.0 * p - 7.0) / (6.0 * (p - 1.0)) * n.h1_sq) / n.h1_sq;
  c.energy_identity_residuals[1] =
      std::abs(c.E0 - (3.0 * p - 7.0) / (4.0 * (p + 1.0)) * n.lp1) / n.h1_sq;
  const bool integral_exponent = c.s_c == std::round(c.s_c);
  if (c.E0 > 0.0 || integral_exponent) {
    c.mass_energy_threshold = std::pow(c.M, 1.0 - c.s_c) * std::pow(c.E0, c.s_c);
  } else {
    c.mass_energy_threshold = std::numeric_limits<double>::quiet_NaN();
  }
  c.norm_threshold = std::pow(l2, 1.0 - c.s_c) * std::pow(h1, c.s_c);
  return c;
}

namespace {

struct Functionals {
  double M, H, X, P;
};

Functionals functionals(const Field& u, std::span<const cplx> coeffs, double p) {
  const RadialGrid& g = u.grid();
  Functionals f{};
  f.M = weighted_integral(u, Weight::one());
  f.H = hdot_norm_squared(g, coeffs, 1.0);
  f.X = weighted_integral(u, Weight::inv_r());
  const auto w = g.moment_weights(2);
  for (std::size_t j = 0; j < u.size(); ++j) f.P += w[j] * std::pow(std::abs(u[j]), p + 1.0);
  return f;
}

constexpr double kRedilateAt = 1e-4;

void scale_to_mass(std::vector<cplx>& u, const RadialGrid& g, double target) {
  const double m = simd::sum_w_abs2(u, g.moment_weights(2));
  const double s = std::sqrt(target / m);
  for (auto& z : u) z *= s;
}

Field dilate(const Field& u, double b, double a) {
  // w(r) = u(r / b) / a
  const RadialGrid& g = u.grid();
  std::vector<double> radii(g.size());
  for (std::size_t j = 0; j < radii.size(); ++j) radii[j] = g.node(j) / b;
  std::vector<cplx> w = evaluate(u, radii);
  for (auto& z : w) z = cplx(z.real() / a, 0.0);
  return Field(g, std::move(w));
}

}  // namespace

ImaginaryTimeResult imaginary_time_ground(const PhysParams& params, const RadialGrid& grid,
                                          const ImaginaryTimeOptions& opt) {
  const double p = params.p;
  const bool weinstein = params.lambda == -1 && params.K == 0.0;
  const bool action = params.lambda == 1 && params.K > 2.0;
  if (!weinstein && !action) {
    throw DomainError("imaginary_time_ground: no positive profile for these parameters");
  }
  if (weinstein && !(p > 1.0 && p < 5.0)) throw DomainError("imaginary_time_ground: need 1 < p < 5");
  if (action && opt.fixed_mass) {
    throw DomainError("imaginary_time_ground: the soliton has fixed frequency, not fixed mass");
  }
  if (!(opt.tol > 0.0) || !(opt.tau > 0.0)) throw DomainError("imaginary_time_ground: bad options");

  const std::size_t n = grid.size();
  const auto kappa = grid.wavenumbers();
  const auto r = grid.nodes();
  const auto inv_r = grid.inv_nodes();
  const auto coul = grid.coulomb_weights();
  const SineTransform& tr = grid.transform();

  std::vector<cplx> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = std::exp(-0.25 * r[j] * r[j]);
  double target = simd::sum_w_abs2(u, grid.moment_weights(2));
  if (opt.fixed_mass) {
    if (!(*opt.fixed_mass > 0.0)) throw DomainError("imaginary_time_ground: fixed_mass must be > 0");
    target = *opt.fixed_mass;
  }
  if (weinstein) scale_to_mass(u, grid, target);

  ImaginaryTimeResult out{
      GroundState{weinstein ? ProfileKind::Q : ProfileKind::f, p, params.K, Field::zeros(grid), 0,
                  0, {}},
      {}, {}, 0, 1.0, 1.0, Field::zeros(grid)};

  const double alpha = 0.25 * (5.0 - p);
  const double beta = 0.75 * (p - 1.0);
  const double tau = weinstein ? opt.tau : opt.tau;

  std::vector<cplx> v(n), c(n), next(n);
  double omega = 1.0, mu = 1.0;
  bool redilated = !weinstein;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    for (std::size_t j = 0; j < n; ++j) v[j] = u[j] * r[j];
    tr.forward(v, c);
    const Field uf(grid, u);
    const Functionals f = functionals(uf, c, p);
    if (weinstein) {
      omega = alpha * f.H / (beta * f.M);
      mu = (p + 1.0) * f.H / (2.0 * beta * f.P);
      out.functional.push_back(-f.P / (std::pow(f.M, alpha) * std::pow(f.H, beta)));
    } else {
      out.functional.push_back(0.5 * f.H - 0.5 * params.K * f.X + 0.5 * f.M + f.P / (p + 1.0));
    }
    out.mass.push_back(f.M);

    // On a finite ball the maximizing family keeps shrinking very slowly, so
    // the iterates may never stop moving. The Euler-Lagrange residual
    // -Lap u + omega u - mu |u|^{p-1} u stays meaningful along that drift.
    double el_residual = std::numeric_limits<double>::infinity();
    if (weinstein) {
      for (std::size_t k = 0; k < n; ++k) next[k] = kappa[k] * kappa[k] * c[k];
      tr.inverse(next, next);
      const auto w = grid.moment_weights(2);
      double res = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double nl = std::pow(std::norm(u[j]), 0.5 * (p - 1.0));
        res += w[j] * std::norm(next[j] * inv_r[j] + omega * u[j] - mu * nl * u[j]);
      }
      el_residual = std::sqrt(res / f.M) / omega;
    }

    for (std::size_t j = 0; j < n; ++j) {
      const double a2 = std::norm(u[j]);
      const double nl = std::pow(a2, 0.5 * (p - 1.0));
      cplx g;
      if (weinstein) {
        g = u[j] - tau * (omega * u[j] - mu * nl * u[j]);
      } else {
        g = u[j] + tau * (params.K * coul[j] * u[j] - nl * u[j]);
      }
      v[j] = g * r[j];
    }
    tr.forward(v, c);
    for (std::size_t k = 0; k < n; ++k) {
      const double shift = weinstein ? 0.0 : tau;
      c[k] /= 1.0 + shift + tau * kappa[k] * kappa[k];
    }
    tr.inverse(c, next);
    for (std::size_t j = 0; j < n; ++j) next[j] = cplx(next[j].real() * inv_r[j], 0.0);
    if (weinstein) scale_to_mass(next, grid, target);

    double diff = 0.0, norm = 0.0;
    const auto w = grid.moment_weights(2);
    for (std::size_t j = 0; j < n; ++j) {
      diff += w[j] * std::norm(next[j] - u[j]);
      norm += w[j] * std::norm(next[j]);
    }
    u.swap(next);
    if (!std::isfinite(diff)) throw ConvergenceError("imaginary_time_ground: iteration diverged");
    const double change = std::sqrt(diff / norm);
    if (redilated && (change < opt.tol || el_residual < opt.tol)) {
      converged = true;
      ++it;
      break;
    }
    // The start has the wrong width; a wide iterate feels the wall and stalls.
    // Once the shape has settled, bring the free dilation parameter to
    // omega = 1 so the profile fits the same ball as Q, then polish.
    if (!redilated && change < std::max(opt.tol, kRedilateAt)) {
      const Field cur(grid, u);
      const Field d = dilate(cur, std::sqrt(omega), 1.0);
      u.assign(d.values().begin(), d.values().end());
      scale_to_mass(u, grid, target);
      redilated = true;
    }
  }
  out.iterations = it;
  if (!converged) {
    throw ConvergenceError("imaginary_time_ground: no convergence within " +
                           std::to_string(opt.max_iterations) + " iterations");
  }

  Field raw(grid, u);
  out.raw = raw;
  Field profile = raw;
  if (weinstein) {
    const double b = std::sqrt(omega);
    const double a = std::pow(omega / mu, 1.0 / (p - 1.0));
    out.amplitude_scale = a;
    out.length_scale = b;
    profile = dilate(raw, b, a);
  }
  const Field lap = apply_laplacian(profile);
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // The Coulomb cusp of f spoils the spectral Laplacian at the first nodes.
    if (action && r[j] < 1.0) continue;
    const double q = profile[j].real();
    const double res = weinstein
                           ? lap[j].real() - q + signed_pow(q, p)
                           : lap[j].real() + params.K * inv_r[j] * q - q - signed_pow(q, p);
    residual = std::max(residual, std::abs(res));
  }
  out.state.profile = profile;
  if (action) {
    // The spectral origin sum rings on the cusp. Fit f = a (1 - (K/2) r) + b r^2
    // through the first two nodes instead.
    const double r1 = r[0], r2 = r[1];
    const double f1 = profile[0].real(), f2 = profile[1].real();
    const double g1 = 1.0 - 0.5 * params.K * r1, g2 = 1.0 - 0.5 * params.K * r2;
    out.state.amplitude = (f1 * r2 * r2 - f2 * r1 * r1) / (g1 * r2 * r2 - g2 * r1 * r1);
  } else {
    out.state.amplitude = origin_value(profile).real();
  }
  out.state.residual = residual;
  out.state.norms = measure(profile, p);
  return out;
}

}  // namespace cnls
