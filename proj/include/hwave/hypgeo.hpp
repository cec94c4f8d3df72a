#pragma once

// Scalar kernels on the hyperbolic plane and the singularity-removing
// quadrature rules shared by the propagator, solver and blow-up code.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hwave/errors.hpp"

namespace hwave {

/// Data envelope theta_k(r) = (cosh r)^(-k-rho), rho = 1/2 on H^2.
struct EnvelopeParams {
  double k = 1.0;
  static constexpr double rho = 0.5;

  void validate() const;
};

/// Weight Phi_h(t, r) = e^{r/2} <t - r>^h and the linear-estimate constant
/// N_h that scales the solution ball.
struct WeightParams {
  double h = 1.2;
  double N_h = 1.0;

  void validate() const;
};

struct QuadratureConfig {
  int nodes_inner = 64;
  int nodes_outer = 128;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  // When set, spherical means are recomputed at half resolution and a
  // disagreement beyond the tolerances raises NumericError.
  bool strict = false;

  void validate() const;
};

struct Node {
  double x;
  double w;
};

// ---- elementary functions -------------------------------------------------

/// <s> = sqrt(1 + s^2).
inline double japanese(double s) { return std::hypot(1.0, s); }

/// log cosh x without overflow for |x| up to the double range.
double log_cosh(double x);
/// log sinh x for x > 0.
double log_sinh(double x);
/// acosh(1 + d) for d >= 0, accurate when d is tiny.
double acosh1p(double d);

// ---- kernels --------------------------------------------------------------

double theta_k(double r, const EnvelopeParams& params);
double log_theta_k(double r, const EnvelopeParams& params);

/// K_k(s): (cosh s)^{1/2-k} for k < 1/2, <s> for k = 1/2, 1 for k > 1/2.
double K_factor(double s, double k);
double log_K_factor(double s, double k);

double phi_weight(double t, double r, const WeightParams& params);
double log_phi_weight(double t, double r, const WeightParams& params);

// ---- quadrature rules -----------------------------------------------------

/// Chebyshev-Gauss rule for  int_lo^hi g(x) ((hi - x)(x - lo))^{-1/2} dx.
/// Exact for polynomials g of degree < 2n.
std::vector<Node> cg_nodes(int n, double lo, double hi);

/// Gauss-Legendre nodes on [-1, 1]; cached, thread-safe.
const std::vector<Node>& gauss_legendre_unit(int n);
std::vector<Node> gauss_legendre(int n, double lo, double hi);

/// Integrate g over [lo, hi] with n-point Gauss-Legendre.
template <class G>
double integrate_gl(G&& g, double lo, double hi, int n) {
  if (hi <= lo) return 0.0;
  const auto& unit = gauss_legendre_unit(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (const auto& nd : unit) sum += nd.w * g(mid + half * nd.x);
  return sum * half;
}

/// Composite Gauss-Legendre over the pieces delimited by `cuts` (sorted,
/// may contain points outside [lo, hi]; those are ignored).
template <class G>
double integrate_gl_pieces(G&& g, double lo, double hi, std::span<const double> cuts,
                           int n) {
  double sum = 0.0;
  double a = lo;
  for (double c : cuts) {
    if (c <= a || c >= hi) continue;
    sum += integrate_gl(g, a, c, n);
    a = c;
  }
  return sum + integrate_gl(g, a, hi, n);
}

/// Geometrically graded composite Gauss-Legendre on [lo, hi] refined toward
/// one endpoint. Handles integrable log/power endpoint singularities.
template <class G>
double integrate_graded(G&& g, double lo, double hi, bool toward_lo, int n_per_piece,
                        double ratio = 0.2, int levels = 24) {
  if (hi <= lo) return 0.0;
  const double len = hi - lo;
  double sum = 0.0;
  double outer = 1.0;
  for (int k = 0; k < levels; ++k) {
    const double inner = outer * ratio;
    if (toward_lo)
      sum += integrate_gl(g, lo + len * inner, lo + len * outer, n_per_piece);
    else
      sum += integrate_gl(g, hi - len * outer, hi - len * inner, n_per_piece);
    outer = inner;
  }
  if (toward_lo)
    sum += integrate_gl(g, lo, lo + len * outer, n_per_piece);
  else
    sum += integrate_gl(g, hi - len * outer, hi, n_per_piece);
  return sum;
}

struct TanhSinhResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

/// Double-exponential (tanh-sinh) quadrature on [lo, hi]. The integrand is
/// called as g(x, x - lo, hi - x); the two distances are accurate even where
/// x itself rounds to an endpoint, so endpoint singularities can be formed
/// without cancellation.
template <class G>
TanhSinhResult tanh_sinh(G&& g, double lo, double hi, double tol, int max_levels = 10) {
  TanhSinhResult res;
  if (hi <= lo) return res;
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr double t_max = 4.0;
  const double half = 0.5 * (hi - lo);

  // Abscissa t maps to x = (lo + hi)/2 + half * tanh(u), u = pi/2 sinh t. The distance
  // to the nearer endpoint is half * 2 / (1 + e^{2|u|}).
  auto term = [&](double t) {
    const double u = half_pi * std::sinh(t);
    const double ch = std::cosh(u);
    const double w = half_pi * std::cosh(t) / (ch * ch);
    const double near = 2.0 * half / (1.0 + std::exp(2.0 * std::abs(u)));
    const double far = 2.0 * half - near;
    const double x = t >= 0 ? hi - near : lo + near;
    const double v = t >= 0 ? g(x, far, near) : g(x, near, far);
    return w * v;
  };

  double h = 1.0;
  double sum = term(0.0);
  for (double t = h; t <= t_max; t += h) sum += term(t) + term(-t);
  double estimate = sum * h * half;
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) add += term(t) + term(-t);
    sum += add;
    const double next = sum * h * half;
    res.error_estimate = std::abs(next - estimate);
    res.levels = level;
    estimate = next;
    if (level >= 3 && res.error_estimate <= tol * std::max(1.0, std::abs(estimate))) break;
  }
  res.value = estimate;
  return res;
}

/// Arithmetic-geometric mean.
double agm(double a, double b);

/// Complete elliptic integral of the first kind K(m), parameter m = k^2,
/// given the complementary parameter m1 = 1 - m (passed separately so that
/// m -> 1 keeps full relative accuracy).
double ellint_K_complement(double m1);

}  // namespace hwave
