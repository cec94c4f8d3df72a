#pragma once

#include <algorithm>
#include <cmath>
#include <vector>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "hwave/profile.hpp"

namespace testsupport {

// Small property-test driver: draws cases from a seeded stream and reports
// the case number and seed of the first failure.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  // log-uniform on [lo, hi], lo > 0
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 rng_;
};

template <class Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
  Gen g(seed);
  for (int n = 0; n < cases; ++n) {
    CAPTURE(n);
    CAPTURE(seed);
    body(g);
  }
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

// Spherical mean by its definition: the average of f over the circle of
// radius t about a point at distance r, cosh d = cosh r cosh t - sinh r sinh t cos(angle).
// The angle range is split where d crosses a breakpoint of f.
inline double mean_oracle(const hwave::RadialProfile& f, double t, double r) {
  if (t == 0.0) return f(r);
  auto g = [&](double th) {
    const double s = std::sin(0.5 * th);
    // cosh d - 1 = cosh(r - t) - 1 + 2 sinh r sinh t sin^2(th/2), without cancellation
    const double sh = std::sinh(0.5 * (r - t));
    const double cm1 = 2.0 * sh * sh + 2.0 * std::sinh(r) * std::sinh(t) * s * s;
    return f(std::acosh(1.0 + cm1));
  };
  std::vector<double> cuts{0.0};
  if (r > 0.0)
    for (double b : f.breakpoints())
      if (b > std::abs(r - t) && b < r + t) {
        // sin^2(th/2) = (cosh b - cosh(r - t)) / (2 sinh r sinh t)
        const double m = std::abs(r - t);
        const double s2 = std::sinh(0.5 * (b + m)) * std::sinh(0.5 * (b - m)) /
                          (std::sinh(r) * std::sinh(t));
        cuts.push_back(2.0 * std::asin(std::sqrt(std::clamp(s2, 0.0, 1.0))));
      }
  cuts.push_back(std::numbers::pi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, cuts[k], cuts[k + 1],
                                                                         12, 1e-13);
  return sum / std::numbers::pi;
}

// I(t, r, phi) = int_0^t sinh s (2 cosh t - 2 cosh s)^{-1/2} M^s phi(r) ds with
// tanh-sinh in s and the definition-based mean inside. The s range is split
// where the mean's support edges |r - s|, r + s cross a breakpoint.
inline double propagator_oracle(const hwave::RadialProfile& phi, double t, double r) {
  if (t == 0.0) return 0.0;
  std::vector<double> cuts{0.0};
  for (double b : phi.breakpoints())
    for (double c : {b - r, r - b, r + b})
      if (c > 0.0 && c < t) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(t);
  boost::math::quadrature::tanh_sinh<double> ts(12);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const bool last = k + 2 == cuts.size();
    // near the upper end of the last piece the second argument is t - s exactly
    auto g = [&](double s, double xc) {
      const double left = (last && xc > 0.0) ? xc : t - s;
      const double gap = 4.0 * std::sinh(0.5 * (t + s)) * std::sinh(0.5 * left);
      return std::sinh(s) / std::sqrt(gap) * mean_oracle(phi, s, r);
    };
    sum += ts.integrate(g, a, b, 1e-11);
  }
  return sum;
}

}  // namespace testsupport
