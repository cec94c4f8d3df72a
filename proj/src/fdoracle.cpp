#include "hwave/fdoracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hwave/errors.hpp"
#include "hwave/parallel.hpp"

namespace hwave {

void FDConfig::validate(double support_radius) const {
  std::ostringstream os;
  if (!(dr > 0.0) || !(dt > 0.0)) os << "fd: dr and dt must be positive";
  else if (!(t_max >= 0.0) || !(r_max > 0.0)) os << "fd: need t_max >= 0 and r_max > 0";
  else if (cfl() > 0.9 + 1e-12)
    os << "fd: CFL dt/dr = " << cfl() << " exceeds the stability margin 0.9";
  else if (r_max < t_max + support_radius - 1e-9)
    os << "fd: r_max = " << r_max << " < t_max + data support = " << t_max + support_radius
       << "; the outer boundary would reach reported values";
  else if (stride_t < 1 || stride_r < 1) os << "fd: strides must be >= 1";
  else if (r_max / dr > 5e7) os << "fd: grid too large";
  if (!os.str().empty()) throw ConfigError(os.str());
}

double effective_support(const RadialProfile& f, double threshold) {
  if (f.is_zero()) return 0.0;
  if (auto s = f.support_radius()) return *s;
  const double end = std::min(700.0, f.domain_end());
  constexpr double h = 0.01;
  for (double lam = end; lam > 0.0; lam -= h)
    if (std::abs(f(lam)) >= threshold) return std::min(end, lam + h);
  return std::abs(f(0.0)) >= threshold ? h : 0.0;
}

Forcing no_forcing() { return {}; }

Forcing nonlinear_forcing(const NonlinearitySpec& spec) {
  if (spec.kind == NonlinearityKind::none) return {};
  spec.validate();
  return [spec](double, std::span<const double>, std::span<const double> u, std::span<double> out) {
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = F_eval(u[j], spec);
  };
}

Forcing source_forcing(const SpaceTimeField& source) {
  source.validate();
  auto rows = std::make_shared<std::vector<Pchip>>();
  const bool even = source.r_grid.front() == 0.0;
  if (source.nr() >= 2)
    for (std::size_t i = 0; i < source.nt(); ++i)
      rows->emplace_back(source.r_grid, std::vector<double>(source.row(i), source.row(i) + source.nr()),
                         even);
  auto src = std::make_shared<SpaceTimeField>(source);
  return [src, rows](double t, std::span<const double> r, std::span<const double>,
                     std::span<double> out) {
    const auto& tg = src->t_grid;
    std::size_t i1 = static_cast<std::size_t>(std::upper_bound(tg.begin(), tg.end(), t) - tg.begin());
    i1 = std::clamp<std::size_t>(i1, 1, std::max<std::size_t>(tg.size() - 1, 1));
    const std::size_t i0 = tg.size() == 1 ? 0 : i1 - 1;
    if (tg.size() == 1) i1 = 0;
    double w = tg.size() == 1 ? 0.0 : (t - tg[i0]) / (tg[i1] - tg[i0]);
    w = std::clamp(w, 0.0, 1.0);
    const double rmax = src->r_grid.back();
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] > rmax * (1.0 + 1e-12)) {
        out[j] = 0.0;  // the source vanishes outside its grid
        continue;
      }
      if (rows->empty()) {
        out[j] = (1.0 - w) * src->at(i0, 0) + w * src->at(i1, 0);
        continue;
      }
      out[j] = (1.0 - w) * (*rows)[i0](r[j]) + w * (*rows)[i1](r[j]);
    }
  };
}

// ---- stepper --------------------------------------------------------------------

LeapfrogStepper::LeapfrogStepper(const FDConfig& cfg, const RadialProfile& u0,
                                 const RadialProfile& u1, Forcing forcing, double eps)
    : cfg_(cfg), forcing_(std::move(forcing)), dt_(cfg.dt) {
  cfg_.validate(std::max(effective_support(u0), effective_support(u1)));
  const auto n = static_cast<std::size_t>(std::llround(cfg.r_max / cfg.dr));
  r_.resize(n + 1);
  coth_half_.assign(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    r_[j] = static_cast<double>(j) * cfg.dr;
    if (j > 0) coth_half_[j] = 1.0 / std::tanh(r_[j]) / (2.0 * cfg.dr);
  }
  cur_.assign(n + 1, 0.0);
  u1_.assign(n + 1, 0.0);
  auto sample = [&](const RadialProfile& f, double r) {
    return r <= f.domain_end() ? f(r) : 0.0;
  };
  for (std::size_t j = 0; j < n; ++j) {
    cur_[j] = eps * sample(u0, r_[j]);
    u1_[j] = eps * sample(u1, r_[j]);
  }
  prev_ = cur_;
  scratch_.assign(n + 1, 0.0);
  force_.assign(n + 1, 0.0);
}

void LeapfrogStepper::apply_operator(std::span<const double> u, double t,
                                     std::span<double> out) const {
  const std::size_t n = u.size() - 1;
  const double inv_dr2 = 1.0 / (cfg_.dr * cfg_.dr);
  out[0] = 4.0 * (u[1] - u[0]) * inv_dr2 + 0.25 * u[0];
  parallel_for(1, n, [&](std::size_t j) {
    out[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dr2 +
             coth_half_[j] * (u[j + 1] - u[j - 1]) + 0.25 * u[j];
  });
  out[n] = 0.0;
  if (forcing_) {
    forcing_(t, r_, u, force_);
    for (std::size_t j = 0; j < n; ++j) out[j] += force_[j];
  }
}

void LeapfrogStepper::step() {
  const std::size_t n = cur_.size() - 1;
  apply_operator(cur_, t_, scratch_);
  const double dt2 = dt_ * dt_;
  if (!started_) {
    // Taylor start: u(dt) = u0 + dt u1 + dt^2/2 u_tt(0)
    for (std::size_t j = 0; j < n; ++j) prev_[j] = cur_[j] + dt_ * u1_[j] + 0.5 * dt2 * scratch_[j];
    prev_[n] = 0.0;
    std::swap(prev_, cur_);
    started_ = true;
  } else {
    for (std::size_t j = 0; j < n; ++j) prev_[j] = 2.0 * cur_[j] - prev_[j] + dt2 * scratch_[j];
    prev_[n] = 0.0;
    std::swap(prev_, cur_);
  }
  t_ += dt_;
  ++steps_;
  for (std::size_t j = 0; j <= n; ++j) {
    if (!std::isfinite(cur_[j])) {
      std::ostringstream os;
      os << "fd_solve: non-finite value at t=" << t_ << ", r=" << r_[j];
      throw InstabilityError(os.str(), t_, r_[j]);
    }
  }
}

void LeapfrogStepper::reverse() {
  if (!started_) {
    dt_ = -dt_;
    return;
  }
  std::swap(cur_, prev_);
  t_ -= dt_;
  dt_ = -dt_;
}

// ---- drivers ------------------------------------------------------------------------

namespace {

PartialSolve run(const RadialProfile& u0, const RadialProfile& u1, Forcing forcing,
                 const FDConfig& cfg, double eps, bool stop_on_breakdown) {
  LeapfrogStepper stepper(cfg, u0, u1, std::move(forcing), eps);
  const double ratio = cfg.t_max / cfg.dt;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    steps = static_cast<std::size_t>(std::ceil(ratio));

  const auto& rg = stepper.r_grid();
  std::vector<double> r_out;
  std::vector<std::size_t> r_idx;
  for (std::size_t j = 0; j < rg.size(); j += static_cast<std::size_t>(cfg.stride_r)) {
    r_out.push_back(rg[j]);
    r_idx.push_back(j);
  }
  std::vector<double> t_out;
  std::vector<double> vals;
  auto record = [&] {
    t_out.push_back(stepper.t());
    for (std::size_t j : r_idx) vals.push_back(stepper.current()[j]);
  };
  PartialSolve out;
  record();
  for (std::size_t s = 1; s <= steps; ++s) {
    try {
      stepper.step();
    } catch (const InstabilityError& e) {
      if (!stop_on_breakdown) throw;
      out.t_breakdown = e.t();
      break;
    }
    if (s % static_cast<std::size_t>(cfg.stride_t) == 0 || s == steps) record();
  }
  out.field.t_grid = std::move(t_out);
  out.field.r_grid = std::move(r_out);
  out.field.values = std::move(vals);
  return out;
}

}  // namespace

SpaceTimeField fd_solve(const RadialProfile& u0, const RadialProfile& u1, Forcing forcing,
                        const FDConfig& cfg, double eps) {
  return run(u0, u1, std::move(forcing), cfg, eps, false).field;
}

PartialSolve fd_solve_until_breakdown(const RadialProfile& u0, const RadialProfile& u1,
                                      Forcing forcing, const FDConfig& cfg, double eps) {
  return run(u0, u1, std::move(forcing), cfg, eps, true);
}

SpaceTimeField fd_solve(const RadialProfile& u0, const RadialProfile& u1,
                        const NonlinearitySpec& spec, const FDConfig& cfg, double eps) {
  return fd_solve(u0, u1, nonlinear_forcing(spec), cfg, eps);
}

OrderReport convergence_order(const RadialProfile& u0, const RadialProfile& u1,
                              const NonlinearitySpec& spec, const FDConfig& cfg, int refinements,
                              double t_probe, double r_probe, std::optional<double> exact) {
  if (refinements < 1) throw DomainError("convergence_order needs refinements >= 1");
  OrderReport rep;
  for (int k = 0; k <= refinements; ++k) {
    FDConfig c = cfg;
    const double scale = std::ldexp(1.0, -k);
    c.dr = cfg.dr * scale;
    c.dt = cfg.dt * scale;
    c.t_max = t_probe;
    c.stride_t = 1 << 30;
    c.stride_r = 1;
    const double jr = r_probe / c.dr;
    const double nt = t_probe / c.dt;
    if (std::abs(jr - std::round(jr)) > 1e-6 || std::abs(nt - std::round(nt)) > 1e-6)
      throw DomainError("convergence_order: probe point must be a grid node at every level");
    const SpaceTimeField f = fd_solve(u0, u1, spec, c);
    rep.spacings.push_back(c.dr);
    rep.values.push_back(f.at(f.nt() - 1, static_cast<std::size_t>(std::llround(jr))));
  }
  const std::size_t L = rep.values.size();
  if (exact) {
    for (double v : rep.values) rep.errors.push_back(std::abs(v - *exact));
  } else {
    for (std::size_t k = 0; k + 1 < L; ++k)
      rep.errors.push_back(std::abs(rep.values[k] - rep.values[k + 1]));
  }
  const std::size_t E = rep.errors.size();
  if (E >= 2 && rep.errors[E - 1] > 0.0 && rep.errors[E - 2] > 0.0)
    rep.order = std::log2(rep.errors[E - 2] / rep.errors[E - 1]);
  else
    rep.inconclusive = true;
  for (std::size_t k = 0; k + 1 < E; ++k)
    if (!(rep.errors[k + 1] < rep.errors[k])) rep.inconclusive = true;
  if (refinements < 2) rep.inconclusive = true;
  return rep;
}

}  // namespace hwave
