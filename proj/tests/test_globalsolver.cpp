#include <cmath>
#include <numbers>

#include "hwave/fdoracle.hpp"
#include "hwave/globalsolver.hpp"
#include "support.hpp"

using namespace hwave;
using testsupport::for_all;
using testsupport::Gen;

namespace {

NonlinearitySpec canonical(double p) {
  NonlinearitySpec s;
  s.p = p;
  return s;
}

SolverConfig coarse_config(double h = 1.2) {
  SolverConfig c;
  c.h = h;
  c.grid = {4.0, 4.0, 0.1, 0.1};
  return c;
}

const RadialProfile& theta1() {
  static const RadialProfile th = RadialProfile::theta(1.0);
  return th;
}

// t, r <= 4 at spacing 0.1: cheap enough to build per test
const SolverContext& coarse() {
  static const SolverContext ctx(RadialProfile::zero(), theta1(), canonical(3.5), coarse_config());
  return ctx;
}

// the default grid, t, r <= 8 at spacing 0.05
const SolverContext& standard() {
  static const SolverContext ctx(RadialProfile::zero(), theta1(), canonical(3.5), SolverConfig{});
  return ctx;
}

const PicardResult& standard_run() {
  static const PicardResult res = picard_solve(standard(), standard().epsilon_cap() / 2);
  return res;
}

SpaceTimeField make_field(double t_max, double r_max, double step, auto f) {
  SpaceTimeField u(uniform_grid(0.0, t_max, step), uniform_grid(0.0, r_max, step));
  for (std::size_t i = 0; i < u.nt(); ++i)
    for (std::size_t j = 0; j < u.nr(); ++j) u.at(i, j) = f(u.t_grid[i], u.r_grid[j]);
  return u;
}

}  // namespace

TEST_CASE("weighted_norm examples") {
  const double h = 1.2;
  CHECK(weighted_norm(make_field(3, 3, 0.1, [](double, double) { return 0.0; }), h) == 0.0);
  const auto inv = make_field(5, 5, 0.07, [&](double t, double r) {
    return std::exp(-r / 2) * std::pow(japanese(t - r), -h);
  });
  CHECK(weighted_norm(inv, h) == doctest::Approx(1.0).epsilon(1e-13));
  const auto faster = make_field(5, 5, 0.07, [&](double t, double r) {
    return std::exp(-r) * std::pow(japanese(t - r), -h);
  });
  CHECK(weighted_norm(faster, h) == doctest::Approx(1.0).epsilon(1e-13));
  for_all(20, 41, [&](Gen& g) {
    const double c = g.uniform(-3.0, 3.0);
    auto scaled = inv;
    for (double& v : scaled.values) v *= c;
    CHECK(weighted_norm(scaled, h) == doctest::Approx(std::abs(c)).epsilon(1e-13));
  });
}

TEST_CASE("solver configuration is validated") {
  const auto z = RadialProfile::zero();
  CHECK_THROWS_AS(SolverContext(z, theta1(), canonical(3.0), coarse_config()), ConfigError);
  CHECK_THROWS_AS(SolverContext(z, theta1(), canonical(3.5), coarse_config(1.5)), ConfigError);
  CHECK_THROWS_AS(SolverContext(z, theta1(), canonical(3.5), coarse_config(1.0)), ConfigError);
  auto bad = coarse_config();
  bad.max_iters = 0;
  CHECK_THROWS_AS(SolverContext(z, theta1(), canonical(3.5), bad), ConfigError);
  // 2 theta_1 leaves the envelope
  const auto big = RadialProfile::closed_form("2theta1", [](double r) { return 2.0 * std::pow(std::cosh(r), -1.5); });
  CHECK_THROWS_AS(SolverContext(z, big, canonical(3.5), coarse_config()), DomainError);
  CHECK_THROWS_AS(SolverContext(coarse().kernel_ptr(), z, theta1(), canonical(3.5), SolverConfig{}),
                  ConfigError);
}

TEST_CASE("zero epsilon converges at once") {
  const auto res = picard_solve(coarse(), 0.0);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  for (double v : res.field.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(picard_solve(coarse(), -1.0), ConfigError);
}

TEST_CASE("the first iterate is epsilon u0") {
  const auto& ctx = coarse();
  const double eps = ctx.epsilon_cap() / 4;
  const SpaceTimeField zero = ctx.kernel().zero_field();
  const SpaceTimeField first = ctx.picard_map(zero, eps);
  for (std::size_t n = 0; n < first.values.size(); ++n)
    CHECK(first.values[n] == eps * ctx.linear().values[n]);
  const auto res = picard_solve(ctx, eps);
  REQUIRE_FALSE(res.history.empty());
  CHECK(res.history[0] == doctest::Approx(weighted_norm(ctx.nonlinear_term(first), ctx.config().h)).epsilon(1e-12));
}

TEST_CASE("Picard differences contract from the second iterate") {
  const auto& res = standard_run();
  REQUIRE(res.converged);
  REQUIRE(res.history.size() >= 3);
  for (std::size_t n = 2; n < res.history.size(); ++n) {
    if (res.history[n - 1] < 1e-13) break;  // at the rounding floor
    CAPTURE(n);
    CHECK(res.history[n] <= 0.5 * res.history[n - 1]);
  }
}

TEST_CASE("converged solutions are fixed points inside X_eps") {
  const auto& ctx = standard();
  const auto& res = standard_run();
  const double tol = ctx.config().fixed_point_tol;
  CHECK(res.residual <= 2 * tol);
  CHECK(weighted_norm(res.full, ctx.config().h) <= 2 * res.epsilon * res.N_h);
  CHECK(res.weighted == doctest::Approx(weighted_norm(res.full, ctx.config().h)));
  // recompute u - eps u0 - L F(u) independently of the returned residual
  const SpaceTimeField Tu = ctx.picard_map(res.full, res.epsilon);
  double worst = 0.0;
  for (std::size_t n = 0; n < Tu.values.size(); ++n)
    worst = std::max(worst, std::abs(Tu.values[n] - res.full.values[n]) * ctx.weight().values[n]);
  CHECK(worst <= 2 * tol);
}

TEST_CASE("escape and non-convergence are reported") {
  const auto& ctx = coarse();
  CHECK_THROWS_AS(picard_solve(ctx, 50.0 * ctx.epsilon_cap()), DomainEscapeError);
  auto cfg = coarse_config();
  cfg.max_iters = 1;
  cfg.fixed_point_tol = 1e-300;
  const SolverContext tight(coarse().kernel_ptr(), RadialProfile::zero(), theta1(), canonical(3.5), cfg);
  try {
    (void)picard_solve(tight, tight.epsilon_cap() / 2);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.history().size() == 1);
  }
}

TEST_CASE("the linear part is linear in epsilon") {
  NonlinearitySpec none = canonical(3.5);
  none.kind = NonlinearityKind::none;
  const SolverContext ctx(coarse().kernel_ptr(), RadialProfile::zero(), theta1(), none, coarse_config());
  const double a = 0.37;
  const auto one = picard_solve(ctx, a);
  const auto two = picard_solve(ctx, 2 * a);
  for (std::size_t n = 0; n < one.field.values.size(); ++n)
    CHECK(std::abs(two.field.values[n] - 2 * one.field.values[n]) <= 1e-12);
}

TEST_CASE("contraction ratios are symmetric and skip equal pairs") {
  const auto& ctx = coarse();
  const double eps = ctx.epsilon_cap() / 2;
  auto [u, v] = random_pair(ctx, eps, 7);
  const auto fwd = contraction_report(ctx, eps, {{u, v}});
  const auto back = contraction_report(ctx, eps, {{v, u}});
  REQUIRE(fwd.sampled_pairs == 1);
  CHECK(fwd.max_ratio == back.max_ratio);
  CHECK(fwd.max_ratio > 0.0);
  const auto same = contraction_report(ctx, eps, {{u, u}, {v, v}});
  CHECK(same.sampled_pairs == 0);
  CHECK(same.max_ratio == 0.0);
  CHECK(same.ratios.empty());
  // members of X_eps
  CHECK(weighted_norm(u, ctx.config().h) <= 2 * eps * ctx.N_h() * (1 + 1e-12));
  CHECK(weighted_norm(v, ctx.config().h) <= 2 * eps * ctx.N_h() * (1 + 1e-12));
  // seed discipline
  const auto again = random_pair(ctx, eps, 7);
  CHECK(again.first.values == u.values);
}

TEST_CASE("contraction ratios shrink with epsilon") {
  const auto& ctx = coarse();
  double prev = INFINITY;
  for (double eps = ctx.epsilon_cap(); eps > 1e-9; eps /= 8) {
    const auto rep = contraction_probe(ctx, eps, 3, 99);
    CAPTURE(eps);
    CHECK(rep.sampled_pairs == 3);
    CHECK(rep.max_ratio <= prev);
    double m = 0.0;
    for (double r : rep.ratios) m = std::max(m, r);
    CHECK(rep.max_ratio == m);
    prev = rep.max_ratio;
  }
}

TEST_CASE("epsilon threshold") {
  const auto& ctx = coarse();
  CHECK_THROWS_AS(epsilon_threshold(ctx, 0.0, 2, 5), NumericError);
  CHECK_THROWS_AS(epsilon_threshold(ctx, 0.5, 0, 5), DomainError);

  const auto found = epsilon_threshold(ctx, 0.5, 3, 5);
  CHECK(found.epsilon > 0.0);
  CHECK(found.max_ratio <= 0.5);
  CHECK(contraction_probe(ctx, found.epsilon, 3, 5).max_ratio == found.max_ratio);

  const SolverContext p4(coarse().kernel_ptr(), RadialProfile::zero(), theta1(), canonical(4.0),
                         coarse_config(1.5));
  const auto eps0 = epsilon_threshold(p4, 0.5, 3, 5);
  CHECK(eps0.epsilon > 0.0);
  CHECK(eps0.epsilon <= p4.epsilon_cap());

  // a target below every probe forces a full bisection, ending on an accepted point
  const double tight_target = 0.5 * contraction_probe(ctx, ctx.epsilon_cap(), 3, 5).max_ratio;
  const auto bis = epsilon_threshold(ctx, tight_target, 3, 5);
  CHECK(bis.probes.size() == 22);
  CHECK(bis.max_ratio <= tight_target);
  CHECK(bis.epsilon < bis.upper);
}

TEST_CASE("Picard solution agrees with the finite-difference oracle") {
  const auto& res = standard_run();
  NonlinearitySpec spec = standard().spec();
  FDConfig c;
  c.dr = 5e-3;
  c.dt = 4e-3;
  c.t_max = 4.0;
  c.r_max = 4.0 + effective_support(theta1()) + 0.5;
  c.stride_t = 25;
  const auto fd = fd_solve(RadialProfile::zero(), theta1(), spec, c, res.epsilon);
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < res.field.nt(); ++i) {
    const double t = res.field.t_grid[i];
    if (t > 4.0 + 1e-9) break;
    for (std::size_t j = 0; j < res.field.nr(); ++j) {
      const double r = res.field.r_grid[j];
      if (r > 4.0 + 1e-9) break;
      const double v = res.field.at(i, j);
      peak = std::max(peak, std::abs(v));
      worst = std::max(worst, std::abs(v - fd.interpolate(t, r)));
    }
  }
  CHECK(worst <= 1e-2 * peak);
}

TEST_CASE("PDE residual of the Picard solution shrinks under refinement") {
  auto residual = [](double step) {
    SolverConfig cfg = coarse_config();
    cfg.grid = {3.0, 3.0, step, step};
    const SolverContext ctx(RadialProfile::zero(), theta1(), canonical(3.5), cfg);
    const auto res = picard_solve(ctx, ctx.epsilon_cap() / 2);
    const auto& u = res.field;
    double worst = 0.0;
    for (double t : {1.0, 1.5, 2.0}) {
      for (double r : {0.5, 1.0, 1.5}) {
        const auto i = static_cast<std::size_t>(std::llround(t / step));
        const auto j = static_cast<std::size_t>(std::llround(r / step));
        const double utt = (u.at(i + 1, j) - 2 * u.at(i, j) + u.at(i - 1, j)) / (step * step);
        const double urr = (u.at(i, j + 1) - 2 * u.at(i, j) + u.at(i, j - 1)) / (step * step);
        const double ur = (u.at(i, j + 1) - u.at(i, j - 1)) / (2 * step);
        const double res_pde = utt - urr - ur / std::tanh(r) - 0.25 * u.at(i, j) -
                               F_eval(u.at(i, j), ctx.spec());
        worst = std::max(worst, std::abs(res_pde));
      }
    }
    return worst;
  };
  const double coarse_res = residual(0.1), fine_res = residual(0.05);
  CAPTURE(coarse_res);
  CAPTURE(fine_res);
  CHECK(fine_res < 0.5 * coarse_res);
}

TEST_CASE("claim bound") {
  const auto zero = claim_bound_check(3.5, 1.2, 1e-3, 0.0, 1.0);
  CHECK(zero.claim_value == 0.0);
  CHECK(zero.weighted == 0.0);
  const auto small = claim_bound_check(3.5, 1.2, 1e-4, 2.0, 1.0);
  const auto large = claim_bound_check(3.5, 1.2, 1e-1, 2.0, 1.0);
  CHECK(small.weighted > 0.0);
  CHECK(small.weighted < large.weighted);
  CHECK(std::isfinite(large.weighted));
  CHECK(small.weighted == doctest::Approx(small.claim_value * std::sqrt(std::cosh(1.0)) *
                                          std::pow(japanese(1.0), 1.2)));
  CHECK_THROWS_AS(claim_bound_check(3.0, 1.2, 1e-3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(claim_bound_check(3.5, 1.6, 1e-3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(claim_bound_check(3.5, 1.2, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("decay_fit on synthetic fields") {
  const auto ray = make_field(12, 12, 0.1, [](double, double r) { return std::exp(-r / 2); });
  const auto rep = decay_fit(ray, 1.0);
  CHECK(rep.slope_r == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(rep.points_r >= 4);
  CHECK(rep.points_tr >= 4);
  CHECK_FALSE(rep.fit_window.empty());

  const auto inv = make_field(12, 12, 0.1, [](double t, double r) {
    return 1.0 / std::sqrt(std::cosh(r) * std::cosh(t - r));
  });
  const auto rep_inv = decay_fit(inv, 1.0);
  CHECK(rep_inv.sup_weighted == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep_inv.slope_r == doctest::Approx(-0.5).epsilon(1e-3));

  const auto tiny = make_field(3, 3, 0.5, [](double, double r) { return std::exp(-r); });
  CHECK_THROWS_AS(decay_fit(tiny, 1.0), NumericError);
  CHECK_THROWS_AS(decay_fit(inv, 0.0), DomainError);
}

TEST_CASE("local existence window") {
  const double c = 2 * std::sqrt(2.0) * std::numbers::e;
  CHECK(local_existence_window(1.0) == doctest::Approx(1.0 / c).epsilon(1e-15));
  CHECK(local_existence_window(1.0) == doctest::Approx(0.130065).epsilon(1e-6));
  CHECK(local_existence_window(1.0 / c) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(local_existence_window(0.1) == 1.0);
  double prev = INFINITY;
  for (double M = 1.0; M < 1e8; M *= 3) {
    const double T = local_existence_window(M);
    CHECK(T < prev);
    prev = T;
  }
  CHECK(prev < 1e-8);
  CHECK_THROWS_AS(local_existence_window(0.0), DomainError);
  CHECK_THROWS_AS(local_existence_window(-1.0), DomainError);
}
