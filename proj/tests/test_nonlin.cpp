#include <cmath>

#include "hwave/nonlin.hpp"
#include "support.hpp"

using namespace hwave;
using testsupport::for_all;
using testsupport::Gen;

namespace {

NonlinearitySpec generic(double p, double q, double delta0) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::piecewise_generic;
  s.p = p;
  s.q = q;
  s.delta0 = delta0;
  return s;
}

NonlinearitySpec canonical(double p, double A) {
  NonlinearitySpec s;
  s.p = p;
  s.A = A;
  return s;
}

}  // namespace

TEST_CASE("F_canonical examples") {
  CHECK(F_canonical(0.0, 2.5) == 0.0);
  const double u = 1.0 / std::sinh(1.0);
  for (double p : {1.5, 2.0, 3.5, 7.0}) CHECK(F_canonical(u, p) == doctest::Approx(u).epsilon(1e-14));
  // asinh(1/u) = ln(1/u) + ln 2 + O(u^2), so the ratio to the log model is
  // (L / (L + ln 2))^{2.5}: 0.912 at u = 1e-8, inside 5% only below ~3e-15.
  double prev_gap = INFINITY;
  for (double small : {1e-8, 1e-16, 1e-64, 1e-256}) {
    const double L = std::log(1.0 / small);
    const double ratio = F_canonical(small, 3.5) / (std::pow(L, -2.5) * small);
    CHECK(ratio == doctest::Approx(std::pow(L / (L + std::log(2.0)), 2.5)).epsilon(1e-12));
    CHECK(std::abs(ratio - 1.0) < prev_gap);
    prev_gap = std::abs(ratio - 1.0);
  }
  CHECK(prev_gap <= 0.05);
}

TEST_CASE("F_canonical is even, vanishes to first order and satisfies its definition") {
  double prev = INFINITY;
  for (double u : {1e-4, 1e-8, 1e-12}) {
    const double ratio = F_canonical(u, 3.5) / u;
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(F_canonical_prime(0.0, 3.5) == 0.0);
  for_all(500, 11, [](Gen& g) {
    const double u = g.log_uniform(1e-12, 1e3) * (g.coin() ? 1 : -1);
    const double p = g.uniform(1.1, 6.0);
    CHECK(F_canonical(u, p) == F_canonical(-u, p));
    CHECK(F_canonical(u, p) * std::pow(std::asinh(1.0 / std::abs(u)), p - 1) / std::abs(u) ==
          doctest::Approx(1.0).epsilon(1e-13));
  });
}

TEST_CASE("F_canonical derivative matches a central difference") {
  for_all(200, 12, [](Gen& g) {
    const double u = g.log_uniform(1e-6, 50.0);
    const double p = g.uniform(1.2, 5.0);
    const double h = 1e-6 * u;
    const double fd = (F_canonical(u + h, p) - F_canonical(u - h, p)) / (2 * h);
    CHECK(F_canonical_prime(u, p) == doctest::Approx(fd).epsilon(1e-6));
  });
}

TEST_CASE("F_generic examples") {
  const auto s = generic(2.0, 2.0, 0.1);
  CHECK(F_generic(0.0, s) == 0.0);
  CHECK(F_generic(20.0, s) >= 40.0);
  CHECK(F_generic(-20.0, s) >= 40.0);
  const double u = s.delta0 / 2;
  CHECK(F_generic(u, s) >= s.delta0 / std::log(2.0 / s.delta0) * u);
}

TEST_CASE("F_generic satisfies both lower bounds") {
  for (const auto& s : {generic(2.0, 2.0, 0.1), generic(3.5, 3.0, 0.2), generic(1.5, 1.5, 0.5)}) {
    CAPTURE(s.p);
    CAPTURE(s.q);
    CAPTURE(s.delta0);
    Gen g(13);
    for (int i = 0; i < 1000; ++i) {
      const double u = g.log_uniform(1e-200, s.delta0 * (1 - 1e-12));
      CHECK(F_generic(u, s) >= s.delta0 * std::pow(std::log(1.0 / u), 1 - s.p) * u);
    }
    for (int i = 0; i < 1000; ++i) {
      const double u = g.log_uniform(1.0 / s.delta0 * (1 + 1e-12), 1e6);
      CHECK(F_generic(u, s) >= s.delta0 * std::pow(u, s.q));
    }
  }
}

TEST_CASE("F_generic is C1 and increasing on the positive axis") {
  const auto s = generic(2.5, 2.0, 0.1);
  CHECK(F_generic_prime(0.0, s) == 0.0);
  double prev = 0.0;
  for (double lu = -30.0; lu <= 5.0; lu += 0.01) {
    const double u = std::exp(lu);
    const double v = F_generic(u, s);
    CHECK(v > prev);
    prev = v;
  }
  // derivative continuity across both joins
  for (double join : {s.delta0, 1.0 / s.delta0}) {
    const double h = 1e-9 * join;
    CHECK(F_generic_prime(join - h, s) == doctest::Approx(F_generic_prime(join + h, s)).epsilon(1e-5));
    CHECK(F_generic(join - h, s) == doctest::Approx(F_generic(join + h, s)).epsilon(1e-7));
  }
  for_all(200, 14, [&](Gen& g) {
    const double u = g.log_uniform(1e-6, 50.0);
    const double h = 1e-6 * u;
    const double fd = (F_generic(u + h, s) - F_generic(u - h, s)) / (2 * h);
    CHECK(F_generic_prime(u, s) == doctest::Approx(fd).epsilon(1e-5));
  });
}

TEST_CASE("G_envelope examples") {
  CHECK(G_envelope(std::exp(-10.0), 3.5, 2.0) == doctest::Approx(2.0 * std::pow(10.0, -2.5)).epsilon(1e-14));
  CHECK(G_envelope(std::exp(-10.0), 3.5, 2.0) == doctest::Approx(0.0063246).epsilon(1e-5));
  CHECK(G_envelope(std::exp(-1.0), 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(G_envelope(std::exp(-10.0), 2.0, 1.0) < G_envelope(std::exp(-5.0), 2.0, 1.0));
  CHECK_THROWS_AS(G_envelope(0.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(G_envelope(0.6, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(G_envelope(1.0, 2.0, 1.0), DomainError);
}

TEST_CASE("lipschitz_diff_bound examples") {
  const auto s3 = canonical(3.5, 1.0);
  auto d = lipschitz_diff_bound(0.3, 0.3, s3);
  CHECK(d.diff == 0.0);
  CHECK(d.bound == 0.0);

  auto fitted = canonical(3.5, 1.0);
  fitted.A = fit_envelope_constant(fitted, 0.0).A;
  d = lipschitz_diff_bound(1e-4, 5e-5, fitted);
  CHECK(d.diff <= d.bound);
  CHECK(d.diff > 0.0);

  const auto s2 = canonical(2.0, 1.0);
  d = lipschitz_diff_bound(1e-8, 0.0, s2);
  CHECK(d.diff == F_canonical(1e-8, 2.0));
  CHECK(d.diff <= G_envelope(1e-8, 2.0, 1.0) * 1e-8);
  CHECK_THROWS_AS(lipschitz_diff_bound(2.0, 0.0, s2), DomainError);
}

TEST_CASE("lipschitz_diff_bound holds for random pairs") {
  for (double p : {1.5, 2.0, 3.5}) {
    auto s = canonical(p, 1.0);
    s.A = fit_envelope_constant(s, 0.0).A;
    const double lim = 1.0 / s.A;
    Gen g(15 + static_cast<unsigned>(p * 10));
    for (int i = 0; i < 10000; ++i) {
      double u, v;
      if (g.coin()) {
        u = g.uniform(-lim, lim);
        v = g.uniform(-lim, lim);
      } else {
        u = g.log_uniform(1e-30, lim) * (g.coin() ? 1 : -1);
        v = g.log_uniform(1e-30, lim) * (g.coin() ? 1 : -1);
      }
      const auto d = lipschitz_diff_bound(u, v, s);
      if (!(d.diff <= d.bound * (1 + 1e-12) + 1e-300)) {
        CAPTURE(p);
        CAPTURE(u);
        CAPTURE(v);
        FAIL_CHECK("Lipschitz envelope violated");
      }
    }
  }
}

TEST_CASE("fit_envelope_constant bounds F' and exceeds 2 N_h") {
  for (double p : {1.5, 2.0, 3.5}) {
    for (double N_h : {0.0, 1.987, 5.0}) {
      auto s = canonical(p, 1.0);
      const auto fit = fit_envelope_constant(s, N_h);
      CAPTURE(p);
      CAPTURE(N_h);
      CHECK(fit.A >= fit.sup_ratio);
      CHECK(fit.A > 2 * N_h);
      CHECK(fit.A > 1.0);
      CHECK(fit.u_at_sup > 0.0);
      CHECK(fit.u_at_sup < 1.0);
      for (double lu = std::log(1.0 / fit.A); lu > -300.0; lu -= 0.05) {
        const double u = std::exp(lu);
        if (u >= 1.0 / fit.A) continue;
        if (!(std::abs(F_canonical_prime(u, p)) <= G_envelope(u, p, fit.A))) {
          CAPTURE(u);
          FAIL_CHECK("G does not bound F'");
          break;
        }
      }
    }
  }
}

TEST_CASE("nonlinearity specs are validated") {
  CHECK_NOTHROW(canonical(2.0, 1.0).validate());
  CHECK_THROWS_AS(canonical(1.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(canonical(2.0, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(generic(2.0, 1.0, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(generic(2.0, 2.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(generic(2.0, 2.0, 0.0).validate(), ConfigError);
  CHECK(nonlinearity_kind_from_string(to_string(NonlinearityKind::piecewise_generic)) ==
        NonlinearityKind::piecewise_generic);
  CHECK_THROWS_AS(nonlinearity_kind_from_string("cubic"), ConfigError);
  NonlinearitySpec none;
  none.kind = NonlinearityKind::none;
  CHECK(F_eval(0.7, none) == 0.0);
  CHECK(F_eval(0.7, canonical(2.0, 1.0)) == F_canonical(0.7, 2.0));
}

TEST_CASE("lipschitz_bound_on covers sampled slopes") {
  const auto s = canonical(2.0, 1.0);
  const double M = lipschitz_bound_on(s, 0.5);
  for_all(300, 16, [&](Gen& g) {
    const double u = g.uniform(-0.5, 0.5), v = g.uniform(-0.5, 0.5);
    if (u == v) return;
    CHECK(std::abs(F_canonical(u, 2.0) - F_canonical(v, 2.0)) <= M * std::abs(u - v) * (1 + 1e-9));
  });
}
