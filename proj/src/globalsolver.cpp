#include "hwave/globalsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hwave/errors.hpp"
#include "hwave/meanprop.hpp"
#include "hwave/parallel.hpp"

namespace hwave {

void SolverConfig::validate(const NonlinearitySpec& spec) const {
  std::ostringstream os;
  if (!(spec.p > 3.0))
    os << "solver: global existence needs p > 3 (got p = " << spec.p << ")";
  else if (!(h > 1.0 && h < spec.p - 2.0))
    os << "solver: need 1 < h < p - 2 (got h = " << h << ", p - 2 = " << spec.p - 2.0 << ")";
  else if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    os << "solver: epsilon must be a finite nonnegative number";
  else if (max_iters < 1) os << "solver: max_iters must be positive";
  else if (!(fixed_point_tol > 0.0)) os << "solver: fixed_point_tol must be positive";
  else if (!(k > 0.0)) os << "solver: envelope index k must be positive";
  if (!os.str().empty()) throw ConfigError(os.str());
  grid.validate();
  quadrature.validate();
  if (spec.kind != NonlinearityKind::none) spec.validate();
}

double weighted_norm(const SpaceTimeField& u, double h) {
  double best = 0.0;
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const double t = u.t_grid[i];
    const double* row = u.row(i);
    for (std::size_t j = 0; j < u.nr(); ++j) {
      if (row[j] == 0.0) continue;
      const double r = u.r_grid[j];
      const double d = t - r;
      const double v = std::abs(row[j]) * std::exp(0.5 * r + 0.5 * h * std::log1p(d * d));
      best = std::max(best, v);
    }
  }
  return best;
}

double estimate_N_h(const SpaceTimeField& linear, double h) { return 1.1 * weighted_norm(linear, h); }

// ---- context --------------------------------------------------------------------

SolverContext::SolverContext(const RadialProfile& u0, const RadialProfile& u1,
                             const NonlinearitySpec& spec, const SolverConfig& cfg)
    : spec_(spec), cfg_(cfg) {
  cfg_.validate(spec_);
  kernel_ = std::make_shared<const GridPropagator>(cfg_.grid, cfg_.quadrature);
  init(u0, u1);
}

SolverContext::SolverContext(std::shared_ptr<const GridPropagator> kernel, const RadialProfile& u0,
                             const RadialProfile& u1, const NonlinearitySpec& spec,
                             const SolverConfig& cfg)
    : kernel_(std::move(kernel)), spec_(spec), cfg_(cfg) {
  cfg_.validate(spec_);
  const SolverGrid& g = kernel_->grid();
  if (g.dt != cfg_.grid.dt || g.dr != cfg_.grid.dr || g.t_max != cfg_.grid.t_max ||
      g.r_max != cfg_.grid.r_max)
    throw ConfigError("solver: supplied propagator was built for a different grid");
  init(u0, u1);
}

void SolverContext::init(const RadialProfile& u0, const RadialProfile& u1) {
  const auto& r = kernel_->r_grid();
  if (cfg_.enforce_envelope) {
    const EnvelopeParams env{cfg_.k};
    for (double x : r) {
      double du0 = 0.0;
      if (!u0.is_zero()) {
        const double step = 1e-5;
        const double lo = std::max(0.0, x - step);
        const double hi = std::min(u0.domain_end(), x + step);
        if (hi > lo) du0 = (u0(hi) - u0(lo)) / (hi - lo);
      }
      const double a = std::abs(x <= u0.domain_end() ? u0(x) : 0.0);
      const double b = std::abs(x <= u1.domain_end() ? u1(x) : 0.0);
      const double lhs = a + b + std::abs(du0);
      const double rhs = theta_k(x, env);
      if (lhs > rhs * (1.0 + 1e-9) + 1e-300) {
        std::ostringstream os;
        os << "solver: data exceed the envelope theta_k (k = " << cfg_.k << ") at r = " << x
           << ": |u0| + |u1| + |u0'| = " << lhs << " > " << rhs;
        throw DomainError(os.str());
      }
    }
  }
  linear_ = kernel_->linear_part(u0, u1);
  N_h_ = cfg_.N_h > 0.0 ? cfg_.N_h : estimate_N_h(linear_, cfg_.h);
  if (!(N_h_ > 0.0)) N_h_ = 1.0;  // zero data: any ball radius works
  if (spec_.kind != NonlinearityKind::none) {
    const EnvelopeFit fit = fit_envelope_constant(spec_, N_h_);
    spec_.A = std::max(spec_.A, fit.A);
  } else {
    spec_.A = std::max(spec_.A, 2.0 * N_h_ * (1.0 + 1e-2));
  }
  weight_ = kernel_->zero_field();
  for (std::size_t i = 0; i < weight_.nt(); ++i)
    for (std::size_t j = 0; j < weight_.nr(); ++j)
      weight_.at(i, j) = phi_weight(weight_.t_grid[i], weight_.r_grid[j], {cfg_.h, N_h_});
}

SpaceTimeField SolverContext::apply_F(const SpaceTimeField& u) const {
  SpaceTimeField out = kernel_->zero_field();
  if (spec_.kind == NonlinearityKind::none) return out;
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const std::size_t rows = kernel_->valid_count(i);
    const double* src = u.row(i);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < rows; ++j) dst[j] = F_eval(src[j], spec_);
  }
  return out;
}

SpaceTimeField SolverContext::nonlinear_term(const SpaceTimeField& u) const {
  return kernel_->duhamel(apply_F(u));
}

SpaceTimeField SolverContext::picard_map(const SpaceTimeField& u, double eps) const {
  SpaceTimeField out = nonlinear_term(u);
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] += eps * linear_.values[n];
  return out;
}

namespace {

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) {
  SpaceTimeField d = a;
  for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] -= b.values[n];
  return d;
}

double sup_abs(const SpaceTimeField& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

// ---- Picard -----------------------------------------------------------------------

PicardResult picard_solve(const RadialProfile& u0, const RadialProfile& u1,
                          const NonlinearitySpec& spec, const SolverConfig& cfg) {
  const SolverContext ctx(u0, u1, spec, cfg);
  return picard_solve(ctx, cfg.epsilon);
}

PicardResult picard_solve(const SolverContext& ctx, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("solver: epsilon must be >= 0");
  const SolverConfig& cfg = ctx.config();
  const bool check_escape = ctx.spec().kind != NonlinearityKind::none;
  const double limit = 1.0 / ctx.A();
  PicardResult res;
  res.epsilon = eps;
  res.N_h = ctx.N_h();
  res.A = ctx.A();

  auto check = [&](const SpaceTimeField& u, int n) {
    if (!check_escape) return;
    const double m = sup_abs(u);
    if (m > limit) {
      std::ostringstream os;
      os << "picard_solve: iterate " << n << " reaches |u| = " << m << " > 1/A = " << limit
         << "; epsilon = " << eps << " is too large for the envelope bound";
      throw DomainEscapeError(os.str(), res.history);
    }
  };

  SpaceTimeField u = ctx.linear();
  for (double& v : u.values) v *= eps;
  check(u, 0);
  for (int n = 1; n <= cfg.max_iters; ++n) {
    SpaceTimeField next = ctx.picard_map(u, eps);
    for (double v : next.values)
      if (!std::isfinite(v)) throw NumericError("picard_solve: non-finite iterate");
    const double diff = weighted_norm(difference(next, u), cfg.h);
    res.history.push_back(diff);
    u = std::move(next);
    check(u, n);
    if (diff < cfg.fixed_point_tol) {
      res.iterations = n;
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "picard_solve: no convergence in " << cfg.max_iters << " iterations (last difference "
       << (res.history.empty() ? 0.0 : res.history.back()) << ")";
    throw ConvergenceError(os.str(), res.history);
  }
  res.residual = weighted_norm(difference(u, ctx.picard_map(u, eps)), cfg.h);
  res.weighted = weighted_norm(u, cfg.h);
  res.field = ctx.kernel().restrict_to_report(u);
  res.full = std::move(u);
  return res;
}

// ---- contraction ----------------------------------------------------------------

ContractionReport contraction_report(const SolverContext& ctx, double eps,
                                     const std::vector<FieldPair>& pairs) {
  ContractionReport rep;
  rep.epsilon = eps;
  std::vector<double> ratio(pairs.size(), -1.0);
  parallel_for(0, pairs.size(), [&](std::size_t n) {
    const auto& [u, v] = pairs[n];
    const double denom = weighted_norm(difference(u, v), ctx.config().h);
    if (denom == 0.0) return;
    const SpaceTimeField Fu = ctx.apply_F(u);
    SpaceTimeField Fd = ctx.apply_F(v);
    for (std::size_t m = 0; m < Fd.values.size(); ++m) Fd.values[m] = Fu.values[m] - Fd.values[m];
    const double num = weighted_norm(ctx.kernel().duhamel(Fd), ctx.config().h);
    ratio[n] = num / denom;
  }, 2);
  for (double r : ratio) {
    if (r < 0.0) continue;
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  rep.sampled_pairs = static_cast<int>(rep.ratios.size());
  return rep;
}

namespace {

SpaceTimeField random_member(const SolverContext& ctx, double eps, std::mt19937_64& rng) {
  constexpr int terms = 8;
  std::uniform_real_distribution<double> freq(0.0, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> amp(0.0, 1.0);
  double a[terms], wt[terms], pt[terms], wr[terms], pr[terms];
  double norm = 0.0;
  for (int k = 0; k < terms; ++k) {
    a[k] = amp(rng);
    wt[k] = freq(rng);
    pt[k] = phase(rng);
    wr[k] = freq(rng);
    pr[k] = phase(rng);
    norm += std::abs(a[k]);
  }
  const GridPropagator& K = ctx.kernel();
  SpaceTimeField u = K.zero_field();
  const double scale = 2.0 * eps * ctx.N_h() / norm;
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const double t = u.t_grid[i];
    for (std::size_t j = 0; j < K.valid_count(i); ++j) {
      const double r = u.r_grid[j];
      double xi = 0.0;
      for (int k = 0; k < terms; ++k) xi += a[k] * std::cos(wt[k] * t + pt[k]) * std::cos(wr[k] * r + pr[k]);
      u.at(i, j) = scale * xi / ctx.weight().at(i, j);
    }
  }
  return u;
}

}  // namespace

FieldPair random_pair(const SolverContext& ctx, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SpaceTimeField u = random_member(ctx, eps, rng);
  SpaceTimeField v = random_member(ctx, eps, rng);
  return {std::move(u), std::move(v)};
}

ContractionReport contraction_probe(const SolverContext& ctx, double eps, int n_pairs,
                                    std::uint64_t seed) {
  if (n_pairs < 0) throw DomainError("contraction_probe: n_pairs must be nonnegative");
  if (!(eps > 0.0)) throw DomainError("contraction_probe: epsilon must be positive");
  std::vector<FieldPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int n = 0; n < n_pairs; ++n) pairs.push_back(random_pair(ctx, eps, seed + static_cast<std::uint64_t>(n)));
  return contraction_report(ctx, eps, pairs);
}

EpsilonSearch epsilon_threshold(const SolverContext& ctx, double target_ratio, int n_pairs,
                                std::uint64_t seed) {
  if (n_pairs < 1) throw DomainError("epsilon_threshold: n_pairs must be positive");
  EpsilonSearch out;
  auto probe = [&](double eps) {
    const double m = contraction_probe(ctx, eps, n_pairs, seed).max_ratio;
    out.probes.emplace_back(eps, m);
    return m;
  };
  double lo = 1e-12;
  double hi = std::min(1.0, ctx.epsilon_cap());
  if (!(hi > lo)) throw NumericError("epsilon_threshold: empty bracket (N_h A too large)");
  const double m_hi = probe(hi);
  if (m_hi <= target_ratio) {
    out.epsilon = out.upper = hi;
    out.max_ratio = m_hi;
    return out;
  }
  double m_lo = probe(lo);
  if (!(m_lo <= target_ratio)) {
    std::ostringstream os;
    os << "epsilon_threshold: no admissible epsilon down to 1e-12 (max ratio " << m_lo
       << " > target " << target_ratio << ")";
    throw NumericError(os.str());
  }
  for (int it = 0; it < 20; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double m = probe(mid);
    if (m <= target_ratio) {
      lo = mid;
      m_lo = m;
    } else {
      hi = mid;
    }
  }
  out.epsilon = lo;
  out.upper = hi;
  out.max_ratio = m_lo;
  return out;
}

// ---- claim integral -----------------------------------------------------------------

ClaimValue claim_bound_check(double p, double h, double epsilon, double t, double r,
                             const QuadratureConfig& q) {
  if (!(p > 3.0)) throw DomainError("claim_bound_check: needs p > 3");
  if (!(h > 1.0 && h < p - 2.0)) throw DomainError("claim_bound_check: needs 1 < h < p - 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("claim_bound_check: needs 0 < epsilon < 1");
  if (!(t >= 0.0) || !(r >= 0.0)) throw DomainError("claim_bound_check: needs t, r >= 0");
  q.validate();
  if (t == 0.0) return {};
  const double L = std::log(1.0 / epsilon);
  const MonotoneWeight a = MonotoneWeight::two_cosh();
  auto integrand = [&](double tau) {
    const double s = t - tau;
    if (s <= 0.0) return 0.0;
    auto f = RadialProfile::closed_form(
        "claim",
        [=](double lam) {
          if (lam <= 0.0) return 0.0;
          const double d = tau - lam;
          return std::pow(L + lam, 1.0 - p) *
                 std::exp(log_sinh(lam) - 0.5 * log_cosh(lam) - 0.5 * h * std::log1p(d * d));
        },
        {}, std::nullopt);
    return W_evaluator(s, r, f, a, q);
  };
  // the tau-integrand has a kink where t - tau = r
  const int n = std::max(8, q.nodes_outer / 4);
  std::vector<double> cuts;
  if (t > r) cuts.push_back(t - r);
  ClaimValue out;
  out.claim_value = integrate_gl_pieces(integrand, 0.0, t, cuts, n);
  out.weighted = out.claim_value * std::exp(0.5 * log_cosh(r) + 0.5 * h * std::log1p((t - r) * (t - r)));
  return out;
}

// ---- decay ------------------------------------------------------------------------

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw NumericError("decay_fit: degenerate fit window");
  return (n * sxy - sx * sy) / den;
}

// u(t, r_j) by linear interpolation between time rows.
double at_time(const SpaceTimeField& u, double t, std::size_t j) {
  const auto& tg = u.t_grid;
  auto it = std::lower_bound(tg.begin(), tg.end(), t - 1e-9);
  if (it == tg.end()) return std::nan("");
  const auto i1 = static_cast<std::size_t>(it - tg.begin());
  if (std::abs(tg[i1] - t) <= 1e-9) return u.at(i1, j);
  if (i1 == 0) return std::nan("");
  const std::size_t i0 = i1 - 1;
  const double w = (t - tg[i0]) / (tg[i1] - tg[i0]);
  return (1.0 - w) * u.at(i0, j) + w * u.at(i1, j);
}

}  // namespace

DecayFitReport decay_fit(const SpaceTimeField& u, double k) {
  u.validate();
  if (!(k > 0.0)) throw DomainError("decay_fit: k must be positive");
  DecayFitReport rep;
  const double tmax = u.t_grid.back();

  std::vector<double> x, y;
  for (std::size_t j = 0; j < u.nr(); ++j) {
    const double r = u.r_grid[j];
    if (r < 2.0 || r + 1.0 > tmax + 1e-9) continue;
    const double v = std::abs(at_time(u, r + 1.0, j));
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    x.push_back(r);
    y.push_back(std::log(v));
  }
  if (x.size() < 4) throw NumericError("decay_fit: fewer than 4 points on the ray t - r = 1, r >= 2");
  rep.slope_r = ls_slope(x, y);
  rep.points_r = static_cast<int>(x.size());

  const double target = std::min(tmax, u.r_grid.back()) / 3.0;
  std::size_t jf = 0;
  for (std::size_t j = 0; j < u.nr(); ++j)
    if (std::abs(u.r_grid[j] - target) < std::abs(u.r_grid[jf] - target)) jf = j;
  const double rf = u.r_grid[jf];
  x.clear();
  y.clear();
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const double d = u.t_grid[i] - rf;
    if (d < 2.0) continue;
    const double v = std::abs(u.at(i, jf));
    if (!(v > 0.0)) continue;
    x.push_back(d);
    y.push_back(std::log(v));
  }
  if (x.size() < 4) throw NumericError("decay_fit: fewer than 4 points at fixed r with t - r >= 2");
  rep.slope_tr = ls_slope(x, y);
  rep.points_tr = static_cast<int>(x.size());

  for (std::size_t i = 0; i < u.nt(); ++i)
    for (std::size_t j = 0; j < u.nr(); ++j) {
      const double v = std::abs(u.at(i, j));
      if (v == 0.0) continue;
      const double t = u.t_grid[i], r = u.r_grid[j];
      const double lw = std::log(v) + 0.5 * log_cosh(r) + 0.5 * log_cosh(t - r) - log_K_factor(t - r, k);
      rep.sup_weighted = std::max(rep.sup_weighted, std::exp(lw));
    }
  std::ostringstream os;
  os << "slope_r: t-r=1, r in [2, " << tmax - 1.0 << "]; slope_tr: r=" << rf << ", t-r in [2, "
     << tmax - rf << "]";
  rep.fit_window = os.str();
  return rep;
}

double local_existence_window(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("local_existence_window: M must be positive");
  return std::min(1.0, 1.0 / (2.0 * std::sqrt(2.0) * std::numbers::e * M));
}

}  // namespace hwave
