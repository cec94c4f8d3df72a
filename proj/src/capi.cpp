#include "hwave/hwave.h"

#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <utility>

#include "commands.hpp"
#include "hwave/blowlab.hpp"
#include "hwave/fdoracle.hpp"
#include "hwave/globalsolver.hpp"
#include "hwave/meanprop.hpp"
#include "hwave/nonlin.hpp"
#include "hwave/parallel.hpp"

struct hwave_profile {
  hwave::RadialProfile f;
};

struct hwave_field {
  hwave::SpaceTimeField u;
};

namespace {

thread_local std::string g_last_error;

hwave_status fail(hwave_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
hwave_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return HWAVE_OK;
  } catch (const hwave::ConfigError& e) {
    return fail(HWAVE_ERR_CONFIG, e.what());
  } catch (const hwave::DomainError& e) {
    return fail(HWAVE_ERR_DOMAIN, e.what());
  } catch (const hwave::ConvergenceError& e) {
    return fail(HWAVE_ERR_CONVERGENCE, e.what());
  } catch (const hwave::DomainEscapeError& e) {
    return fail(HWAVE_ERR_DOMAIN_ESCAPE, e.what());
  } catch (const hwave::InstabilityError& e) {
    return fail(HWAVE_ERR_INSTABILITY, e.what());
  } catch (const hwave::NumericError& e) {
    return fail(HWAVE_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HWAVE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HWAVE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HWAVE_ERR_INTERNAL, "unknown exception");
  }
}

hwave::QuadratureConfig to_cpp(const hwave_quadrature* q) {
  hwave::QuadratureConfig c;
  if (!q) return c;
  c.nodes_inner = q->nodes_inner;
  c.nodes_outer = q->nodes_outer;
  c.abs_tol = q->abs_tol;
  c.rel_tol = q->rel_tol;
  c.strict = q->strict != 0;
  return c;
}

hwave::NonlinearitySpec to_cpp(const hwave_nonlinearity& f) {
  hwave::NonlinearitySpec s;
  switch (f.kind) {
    case HWAVE_F_NONE: s.kind = hwave::NonlinearityKind::none; break;
    case HWAVE_F_CANONICAL: s.kind = hwave::NonlinearityKind::canonical_sinh_inverse; break;
    case HWAVE_F_GENERIC: s.kind = hwave::NonlinearityKind::piecewise_generic; break;
    default: throw hwave::ConfigError("unknown nonlinearity kind");
  }
  s.p = f.p;
  s.q = f.q;
  s.delta0 = f.delta0;
  s.A = f.A;
  return s;
}

template <class Make>
hwave_status make_profile(hwave_profile** out, Make&& make) {
  if (!out) return fail(HWAVE_ERR_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new hwave_profile{make()}; });
}

}  // namespace

extern "C" {

const char* hwave_last_error(void) { return g_last_error.c_str(); }

const char* hwave_version(void) { return "1.0.0"; }

void hwave_set_threads(int n) { hwave::set_thread_count(n); }

hwave_status hwave_profile_zero(hwave_profile** out) {
  return make_profile(out, [] { return hwave::RadialProfile::zero(); });
}

hwave_status hwave_profile_constant(double value, hwave_profile** out) {
  return make_profile(out, [&] { return hwave::RadialProfile::constant(value); });
}

hwave_status hwave_profile_theta(double k, hwave_profile** out) {
  return make_profile(out, [&] { return hwave::RadialProfile::theta(k); });
}

hwave_status hwave_profile_plateau(double lo, double hi, double ramp, double height,
                                   hwave_profile** out) {
  return make_profile(out, [&] { return hwave::RadialProfile::plateau(lo, hi, ramp, height); });
}

hwave_status hwave_profile_sampled(const double* x, const double* y, size_t n, int cubic,
                                   hwave_profile** out) {
  if (!x || !y) return fail(HWAVE_ERR_ARGUMENT, "sample arrays are NULL");
  return make_profile(out, [&] {
    return hwave::RadialProfile::sampled(
        std::vector<double>(x, x + n), std::vector<double>(y, y + n),
        cubic ? hwave::RadialProfile::Interp::cubic : hwave::RadialProfile::Interp::linear);
  });
}

hwave_status hwave_profile_eval(const hwave_profile* f, double lambda, double* out) {
  if (!f || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] { *out = f->f(lambda); });
}

void hwave_profile_free(hwave_profile* f) { delete f; }

size_t hwave_field_nt(const hwave_field* u) { return u ? u->u.nt() : 0; }
size_t hwave_field_nr(const hwave_field* u) { return u ? u->u.nr() : 0; }
const double* hwave_field_t_grid(const hwave_field* u) { return u ? u->u.t_grid.data() : nullptr; }
const double* hwave_field_r_grid(const hwave_field* u) { return u ? u->u.r_grid.data() : nullptr; }
const double* hwave_field_values(const hwave_field* u) { return u ? u->u.values.data() : nullptr; }
void hwave_field_free(hwave_field* u) { delete u; }

void hwave_quadrature_default(hwave_quadrature* q) {
  if (!q) return;
  const hwave::QuadratureConfig c;
  *q = {c.nodes_inner, c.nodes_outer, c.abs_tol, c.rel_tol, c.strict ? 1 : 0};
}

void hwave_nonlinearity_default(hwave_nonlinearity* f) {
  if (!f) return;
  const hwave::NonlinearitySpec s;
  *f = {HWAVE_F_CANONICAL, s.p, s.q, s.delta0, s.A};
}

void hwave_fd_config_default(hwave_fd_config* cfg) {
  if (!cfg) return;
  const hwave::FDConfig c;
  *cfg = {c.dr, c.dt, c.r_max, c.t_max, c.stride_t, c.stride_r};
}

void hwave_solver_config_default(hwave_solver_config* cfg) {
  if (!cfg) return;
  const hwave::SolverConfig c;
  cfg->h = c.h;
  cfg->epsilon = c.epsilon;
  cfg->t_max = c.grid.t_max;
  cfg->r_max = c.grid.r_max;
  cfg->dt = c.grid.dt;
  cfg->dr = c.grid.dr;
  cfg->max_iters = c.max_iters;
  cfg->fixed_point_tol = c.fixed_point_tol;
  cfg->k = c.k;
  cfg->enforce_envelope = c.enforce_envelope ? 1 : 0;
  cfg->N_h = c.N_h;
  cfg->quadrature = {c.quadrature.nodes_inner, c.quadrature.nodes_outer, c.quadrature.abs_tol,
                     c.quadrature.rel_tol, c.quadrature.strict ? 1 : 0};
}

hwave_status hwave_spherical_mean(const hwave_profile* f, double t, double r,
                                  const hwave_quadrature* q, double* out) {
  if (!f || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] { *out = hwave::spherical_mean(f->f, t, r, to_cpp(q)); });
}

hwave_status hwave_sine_propagator(const hwave_profile* phi, double t, double r,
                                   const hwave_quadrature* q, double* out) {
  if (!phi || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] { *out = hwave::sine_propagator(phi->f, t, r, to_cpp(q)); });
}

hwave_status hwave_linear_solution(const hwave_profile* u0, const hwave_profile* u1, double t,
                                   double r, const hwave_quadrature* q, double* out) {
  if (!u0 || !u1 || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] { *out = hwave::linear_solution(u0->f, u1->f, t, r, to_cpp(q)); });
}

hwave_status hwave_F(double u, const hwave_nonlinearity* f, double* out) {
  if (!f || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto s = to_cpp(*f);
    if (s.kind != hwave::NonlinearityKind::none) s.validate();
    *out = hwave::F_eval(u, s);
  });
}

hwave_status hwave_fd_solve(const hwave_profile* u0, const hwave_profile* u1,
                            const hwave_nonlinearity* f, const hwave_fd_config* cfg,
                            double epsilon, hwave_field** out) {
  if (!u0 || !u1 || !f || !cfg || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    hwave::FDConfig c;
    c.dr = cfg->dr;
    c.dt = cfg->dt;
    c.r_max = cfg->r_max;
    c.t_max = cfg->t_max;
    c.stride_t = cfg->stride_t;
    c.stride_r = cfg->stride_r;
    *out = new hwave_field{hwave::fd_solve(u0->f, u1->f, to_cpp(*f), c, epsilon)};
  });
}

hwave_status hwave_picard_solve(const hwave_profile* u0, const hwave_profile* u1,
                                const hwave_nonlinearity* f, const hwave_solver_config* cfg,
                                hwave_field** out, int* iterations, double* residual) {
  if (!u0 || !u1 || !f || !cfg || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    hwave::SolverConfig c;
    c.h = cfg->h;
    c.epsilon = cfg->epsilon;
    c.grid = {cfg->t_max, cfg->r_max, cfg->dt, cfg->dr};
    c.max_iters = cfg->max_iters;
    c.fixed_point_tol = cfg->fixed_point_tol;
    c.k = cfg->k;
    c.enforce_envelope = cfg->enforce_envelope != 0;
    c.N_h = cfg->N_h;
    c.quadrature = to_cpp(&cfg->quadrature);
    hwave::PicardResult res = hwave::picard_solve(u0->f, u1->f, to_cpp(*f), c);
    if (iterations) *iterations = res.iterations;
    if (residual) *residual = res.residual;
    *out = new hwave_field{std::move(res.field)};
  });
}

hwave_status hwave_weighted_norm(const hwave_field* u, double h, double* out) {
  if (!u || !out) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] { *out = hwave::weighted_norm(u->u, h); });
}

hwave_status hwave_boost_l0(double p, int* l0, double* A0) {
  if (!l0 || !A0) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] {
    *l0 = hwave::boost_l0(p);
    *A0 = *l0 * (3.0 - p) - 2.0;
  });
}

hwave_status hwave_blowup_time_bound(double A0, double E, double q, double tau0, double c,
                                     double epsilon, double delta0, double tilde_c, double* T) {
  if (!T) return fail(HWAVE_ERR_ARGUMENT, "NULL argument");
  return guarded([&] {
    *T = hwave::blowup_time_bound(A0, E, q, tau0, c, epsilon, delta0, tilde_c).T;
  });
}

int hwave_run(const hwave_run_request* request) {
  if (!request || !request->command || !request->config_path) {
    g_last_error = "run request is incomplete";
    std::cerr << "wavecli: " << g_last_error << '\n';
    return 2;
  }
  hwave::cli::Request req;
  req.command = request->command;
  req.config_path = request->config_path;
  if (request->out_dir) req.out_dir = request->out_dir;
  if (request->has_seed) req.seed = request->seed;
  return hwave::cli::run_command(req, std::cout, std::cerr);
}

}  // extern "C"
