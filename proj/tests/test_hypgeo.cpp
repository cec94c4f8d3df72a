#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>

#include "hwave/hypgeo.hpp"
#include "support.hpp"

using namespace hwave;
using testsupport::for_all;
using testsupport::Gen;

namespace {

double weighted_cg_oracle(const std::function<double(double)>& g, double lo, double hi) {
  // x = mid + half sin(phi) turns the Chebyshev weight into d phi.
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double ph) { return g(mid + half * std::sin(ph)); }, -std::numbers::pi / 2,
      std::numbers::pi / 2, 15, 1e-14);
}

double cg_sum(const std::vector<Node>& nodes, const std::function<double(double)>& g) {
  double s = 0.0;
  for (const auto& n : nodes) s += n.w * g(n.x);
  return s;
}

}  // namespace

TEST_CASE("theta_k examples") {
  CHECK(theta_k(0.0, {1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(theta_k(0.0, {0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(theta_k(2.0, {0.5}) == doctest::Approx(1.0 / std::cosh(2.0)).epsilon(1e-14));
  CHECK(theta_k(2.0, {0.5}) == doctest::Approx(0.265802).epsilon(1e-6));
  CHECK_THROWS_AS(theta_k(-0.1, {1.0}), DomainError);
  CHECK_THROWS_AS(EnvelopeParams{0.0}.validate(), DomainError);
}

TEST_CASE("theta_k is strictly decreasing and bounded by one") {
  for_all(500, 11, [](Gen& g) {
    const double k = g.log_uniform(0.05, 5.0);
    const double r1 = g.uniform(0.0, 30.0);
    const double r2 = r1 + g.log_uniform(1e-6, 10.0);
    CHECK(theta_k(r2, {k}) < theta_k(r1, {k}));
    CHECK(theta_k(r1, {k}) <= 1.0);
  });
}

TEST_CASE("log-domain envelopes agree with direct evaluation and survive large r") {
  for_all(200, 12, [](Gen& g) {
    const double k = g.log_uniform(0.1, 3.0);
    const double r = g.uniform(0.0, 40.0);
    CHECK(log_theta_k(r, {k}) == doctest::Approx(std::log(theta_k(r, {k}))).epsilon(1e-12));
  });
  CHECK(std::isfinite(log_theta_k(2000.0, {1.0})));
  CHECK(log_theta_k(2000.0, {1.0}) == doctest::Approx(-1.5 * (2000.0 - std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("K_factor examples and branches") {
  CHECK(K_factor(0.0, 0.25) == doctest::Approx(1.0));
  CHECK(K_factor(3.0, 1.0) == 1.0);
  CHECK(K_factor(1.0, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(K_factor(2.0, 0.25) == doctest::Approx(std::pow(std::cosh(2.0), 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(K_factor(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(K_factor(1.0, -1.0), DomainError);
  for_all(200, 13, [](Gen& g) {
    const double s = g.uniform(-20.0, 20.0);
    const double k = g.coin() ? 0.5 : g.log_uniform(0.01, 3.0);
    CHECK(K_factor(s, k) == doctest::Approx(K_factor(-s, k)).epsilon(1e-15));
    CHECK(log_K_factor(s, k) == doctest::Approx(std::log(K_factor(s, k))).epsilon(1e-12));
  });
}

TEST_CASE("phi_weight examples") {
  CHECK(phi_weight(0.0, 0.0, {1.2, 1.0}) == doctest::Approx(1.0));
  for (double r : {0.0, 0.7, 3.0, 10.0})
    CHECK(phi_weight(r, r, {1.7, 1.0}) == doctest::Approx(std::exp(r / 2)).epsilon(1e-14));
  CHECK(phi_weight(2.0, 1.0, {2.0, 1.0}) == doctest::Approx(2.0 * std::exp(0.5)).epsilon(1e-14));
  CHECK(phi_weight(2.0, 1.0, {2.0, 1.0}) == doctest::Approx(3.297443).epsilon(1e-6));
  CHECK_THROWS_AS(phi_weight(1.0, -1.0, {1.2, 1.0}), DomainError);
  for_all(300, 14, [](Gen& g) {
    const double t = g.uniform(-10.0, 50.0), r = g.uniform(0.0, 50.0), h = g.uniform(0.1, 3.0);
    CHECK(phi_weight(t, r, {h, 1.0}) >= 1.0);
    CHECK(log_phi_weight(t, r, {h, 1.0}) ==
          doctest::Approx(std::log(phi_weight(t, r, {h, 1.0}))).epsilon(1e-12));
  });
}

TEST_CASE("japanese bracket") {
  CHECK(japanese(0.0) == 1.0);
  CHECK(japanese(1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-16));
  CHECK(japanese(-3.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-16));
}

TEST_CASE("hyperbolic helpers") {
  for_all(300, 15, [](Gen& g) {
    const double x = g.uniform(-30.0, 30.0);
    CHECK(log_cosh(x) == doctest::Approx(std::log(std::cosh(x))).epsilon(1e-13));
    const double y = g.log_uniform(1e-8, 30.0);
    CHECK(log_sinh(y) == doctest::Approx(std::log(std::sinh(y))).epsilon(1e-13));
    const double d = g.log_uniform(1e-14, 10.0);
    // acosh(1 + d) = 2 asinh(sqrt(d / 2))
    CHECK(acosh1p(d) == doctest::Approx(2.0 * std::asinh(std::sqrt(d / 2))).epsilon(1e-13));
  });
  CHECK(log_cosh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(log_sinh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(log_sinh(0.0), DomainError);
}

TEST_CASE("cosh product and exponential bounds") {
  for (int i = 1; i <= 40; ++i)
    for (int j = 1; j <= 40; ++j) {
      const double b = 0.25 * i, c = 0.25 * j;
      const double lhs = std::cosh(b) * std::cosh(c);
      CHECK(lhs <= std::cosh(b + c));
      CHECK(std::cosh(b + c) <= 2.0 * lhs);
    }
  for (int i = 0; i <= 400; ++i) {
    const double t = -20.0 + 0.1 * i;
    CHECK(0.5 * std::exp(std::abs(t)) <= std::cosh(t));
    CHECK(std::cosh(t) <= std::exp(std::abs(t)));
  }
}

TEST_CASE("cg_nodes examples") {
  CHECK(cg_sum(cg_nodes(1, -1.0, 1.0), [](double) { return 1.0; }) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(cg_sum(cg_nodes(4, 0.0, 2.0), [](double x) { return x; }) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-15));
  auto x6 = [](double x) { return std::pow(x, 6); };
  for (auto [lo, hi] : {std::pair{-1.0, 1.0}, {0.0, 2.0}, {0.3, 5.7}, {-4.0, -1.5}}) {
    const double ref = weighted_cg_oracle(x6, lo, hi);
    CHECK(cg_sum(cg_nodes(8, lo, hi), x6) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cg_nodes(4, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cg_nodes(4, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(cg_nodes(0, 0.0, 1.0), DomainError);
}

TEST_CASE("cg_nodes integrates polynomials of degree < 2n exactly") {
  for_all(60, 16, [](Gen& g) {
    const int n = g.integer(1, 12);
    const int deg = g.integer(0, 2 * n - 1);
    const double lo = g.uniform(-3.0, 3.0), hi = lo + g.uniform(0.1, 4.0);
    std::vector<double> coef(deg + 1);
    for (auto& c : coef) c = g.uniform(-1.0, 1.0);
    auto poly = [&](double x) {
      double v = 0.0;
      for (int i = deg; i >= 0; --i) v = v * x + coef[i];
      return v;
    };
    const double ref = weighted_cg_oracle(poly, lo, hi);
    const double got = cg_sum(cg_nodes(n, lo, hi), poly);
    double scale = 0.0;  // integral of |poly|, guards cancellation in the relative check
    for (const auto& nd : cg_nodes(64, lo, hi)) scale += nd.w * std::abs(poly(nd.x));
    CHECK(std::abs(got - ref) <= 1e-12 * scale);
  });
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 4, 8, 16, 32, 64}) {
    const auto& u = gauss_legendre_unit(n);
    REQUIRE(u.size() == static_cast<std::size_t>(n));
    double sw = 0.0, top = 0.0;
    for (const auto& nd : u) {
      sw += nd.w;
      top += nd.w * std::pow(nd.x, 2 * n - 2);
    }
    CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
  CHECK(integrate_gl([](double x) { return std::exp(x); }, 0.0, 2.0, 16) ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("graded and tanh-sinh rules handle endpoint singularities") {
  const double ref_log = -1.0;  // int_0^1 ln x dx
  CHECK(integrate_graded([](double x) { return std::log(x); }, 0.0, 1.0, true, 16, 0.2, 30) ==
        doctest::Approx(ref_log).epsilon(1e-12));
  auto res = tanh_sinh([](double, double a, double b) { return 1.0 / std::sqrt(a * b); }, 0.0,
                       1.0, 1e-13);
  CHECK(res.value == doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("complete elliptic integral against Boost") {
  for_all(100, 17, [](Gen& g) {
    const double m1 = g.log_uniform(1e-12, 1.0);
    // K(m) = R_F(0, 1 - m, 1) takes the complementary parameter directly
    CHECK(ellint_K_complement(m1) ==
          doctest::Approx(boost::math::ellint_rf(0.0, m1, 1.0)).epsilon(1e-13));
  });
  CHECK(ellint_K_complement(0.75) == doctest::Approx(boost::math::ellint_1(0.5)).epsilon(1e-14));
  CHECK(agm(1.0, 1.0) == 1.0);
  CHECK(agm(24.0, 6.0) == doctest::Approx(13.458171481725615).epsilon(1e-14));
  CHECK_THROWS_AS(ellint_K_complement(0.0), DomainError);
}

TEST_CASE("parameter record validation") {
  CHECK_NOTHROW(QuadratureConfig{}.validate());
  CHECK_THROWS_AS((QuadratureConfig{3, 64, 1e-10, 1e-8, false}.validate()), ConfigError);
  CHECK_THROWS_AS((QuadratureConfig{16, 64, 0.0, 1e-8, false}.validate()), ConfigError);
  CHECK_THROWS_AS((QuadratureConfig{16, 64, 1e-10, 1.0, false}.validate()), ConfigError);
  CHECK_THROWS_AS((WeightParams{0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((WeightParams{1.2, 0.0}.validate()), DomainError);
}
