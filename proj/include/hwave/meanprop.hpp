#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hwave/field.hpp"
#include "hwave/hypgeo.hpp"
#include "hwave/profile.hpp"

namespace hwave {

/// Even C^1 weight a(s) with a'(s) > 0 for s > 0, as required by the
/// R-operator and Beta-identity machinery. Differences a(x) - a(y) are
/// formed from x - y without cancellation (custom weights integrate a' over
/// offsets up to 1/2).
class MonotoneWeight {
 public:
  using Fn = std::function<double(double)>;

  static MonotoneWeight two_cosh();
  static MonotoneWeight square();
  /// Validated on construction over [0, check_to].
  static MonotoneWeight custom(std::string name, Fn a, Fn da, double check_to = 10.0);

  const std::string& name() const { return name_; }
  double value(double s) const;
  double derivative(double s) const;
  /// a(x) - a(y) given x, y >= 0 and their exact difference x - y.
  double difference(double x, double y, double x_minus_y) const;
  double difference(double x, double y) const { return difference(x, y, x - y); }

  /// Checks a' > 0 and that (a'(t) - a'(s)) / sqrt(a(t) - a(s)) is
  /// nonincreasing in s on a grid of [0, t] for t up to check_to.
  void validate(double check_to = 10.0) const;

 private:
  enum class Form { two_cosh, square, custom };
  MonotoneWeight(std::string name, Form form, Fn a, Fn da);
  std::string name_;
  Form form_;
  Fn a_, da_;
};

// ---- spherical means and the sine propagator -------------------------------

/// Mean of a radial f over the geodesic circle of radius t about a point at
/// distance r from the origin.
double spherical_mean(const RadialProfile& f, double t, double r,
                      const QuadratureConfig& q = {});

/// I(t, r, phi): solution at (t, r) of the linear equation with u(0) = 0,
/// u_t(0) = phi. Odd in t; negative t is accepted and returns -I(|t|).
double sine_propagator(const RadialProfile& phi, double t, double r,
                       const QuadratureConfig& q = {});

/// d/dt I(t, r, u0) by a fourth-order central difference (step 1e-2).
double sine_propagator_dt(const RadialProfile& u0, double t, double r,
                          const QuadratureConfig& q = {});

/// u^0(t, r) = d/dt I(t, r, u0) + I(t, r, u1).
double linear_solution(const RadialProfile& u0, const RadialProfile& u1, double t, double r,
                       const QuadratureConfig& q = {});

/// Appends the (lambda, weight) pairs for which
///   I(t, r, phi) ~= sum_i w_i phi(lambda_i)
/// with the quadrature split at the given profile breakpoints.
void propagator_nodes(double t, double r, const QuadratureConfig& q,
                      std::span<const double> breakpoints, std::vector<Node>& out);

// ---- Fubini form and Beta-type integrals ----------------------------------

/// W(t, r, f): the double integral over 0 < s < t, |r - s| < lambda < r + s
/// with kernel a'(s) / sqrt((a(t)-a(s))(a(r+lambda)-a(s))(a(s)-a(r-lambda))),
/// evaluated lambda-outer with the Beta-type s-integral done in closed form
/// or by Chebyshev-Gauss. For a = 2cosh and f = phi sinh, W / pi = I.
double W_evaluator(double t, double r, const RadialProfile& f, const MonotoneWeight& a,
                   const QuadratureConfig& q = {});

/// pi * int |f(lambda)| / sqrt|a(r+lambda) - a(t)| over the range of the
/// W bound (r - t .. r + t when r >= t, 0 .. t + r otherwise).
double W_majorant(double t, double r, const RadialProfile& f, const MonotoneWeight& a,
                  const QuadratureConfig& q = {});

/// int_b^c a'(s) / sqrt((a(c)-a(s))(a(s)-a(b))) ds, which equals pi.
double beta_identity_check(double b, double c, const MonotoneWeight& a,
                           const QuadratureConfig& q = {});

using TimeProfile = std::function<double(double)>;

/// R v(t) = int_0^t (a'(s)/2) / sqrt(a(t) - a(s)) v(s) ds.
double r_operator(const TimeProfile& v, double t, const MonotoneWeight& a,
                  const QuadratureConfig& q = {});

struct RBoundCheck {
  double lhs = 0.0;             // |d/dt R v(t)| by differencing
  double rhs = 0.0;             // (a'(t)/2) / sqrt(a(t)-a(0)) |v(t)| + R|dv|(t)
  double diff_error = 0.0;      // estimate of the differencing error in lhs
  bool holds() const { return lhs <= rhs + diff_error; }
};

RBoundCheck dt_r_bound_check(const TimeProfile& v, const TimeProfile& dv, double t,
                             const MonotoneWeight& a, const QuadratureConfig& q = {});

// ---- Duhamel term ----------------------------------------------------------

/// Composite Simpson weights on n equal intervals of width h (3/8 rule on the
/// last three intervals when n is odd, trapezoid when n = 1).
std::vector<double> simpson_weights(std::size_t n, double h);

/// int_0^t I(t - tau, r, F(tau, .)) dtau with F given on a grid. t must be a
/// node of F.t_grid; the grid must cover [0, t] x [0, r + t].
double duhamel(const SpaceTimeField& F, double t, double r, const QuadratureConfig& q = {});

// ---- lower bounds for the blow-up iteration --------------------------------

/// C0 = (1/2) sqrt(tanh(tau0/8) tanh(tau0/2)), the infimum of
/// (1/2)(tanh lambda tanh r)^{1/2} over lambda > tau0/8, r > tau0/2.
double lower_bound_C0(double tau0);

struct LowerBoundI {
  double bound_large = 0.0;
  std::optional<double> bound_small;
};

/// C0 (sinh r)^{-1/2} int phi (sinh lambda)^{1/2} over [max(t, r), t + r]
/// and, when |t - r| > tau0/8, over [|t - r|, t + r].
LowerBoundI lower_bound_I(const RadialProfile& phi, double t, double r, double tau0, double C0,
                          const QuadratureConfig& q = {});

/// int_{|r-t|}^{r+t} phi sinh(lambda) (2 cosh(r + lambda))^{-1/2} dlambda,
/// a lower bound for I(t, r, phi) when phi >= 0.
double lowerbd_integral(const RadialProfile& phi, double t, double r,
                        const QuadratureConfig& q = {});

}  // namespace hwave
