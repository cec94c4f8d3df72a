#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hwave/field.hpp"
#include "hwave/gridkernel.hpp"
#include "hwave/hypgeo.hpp"
#include "hwave/nonlin.hpp"
#include "hwave/profile.hpp"

namespace hwave {

struct SolverConfig {
  double h = 1.2;
  double epsilon = 1e-3;
  SolverGrid grid;
  int max_iters = 50;
  double fixed_point_tol = 1e-10;
  // Data must satisfy |u0| + |u1| + |u0'| <= theta_k pointwise.
  double k = 1.0;
  bool enforce_envelope = true;
  // <= 0: estimated as 1.1 sup Phi_h |u^0| over the grid.
  double N_h = 0.0;
  // Quadrature for the precomputed grid propagator.
  QuadratureConfig quadrature{16, 32, 1e-10, 1e-8, false};

  /// Needs p > 3 and 1 < h < p - 2 (the contraction regime).
  void validate(const NonlinearitySpec& spec) const;
};

/// max over the grid of Phi_h(t, r) |u(t, r)|.
double weighted_norm(const SpaceTimeField& u, double h);

/// Everything the Picard map needs that does not depend on epsilon: the
/// discrete propagator, the linear solution u^0 for unit epsilon, N_h and
/// the envelope constant A.
class SolverContext {
 public:
  SolverContext(const RadialProfile& u0, const RadialProfile& u1, const NonlinearitySpec& spec,
                const SolverConfig& cfg);
  /// Reuses a propagator built for the same grid.
  SolverContext(std::shared_ptr<const GridPropagator> kernel, const RadialProfile& u0,
                const RadialProfile& u1, const NonlinearitySpec& spec, const SolverConfig& cfg);

  const GridPropagator& kernel() const { return *kernel_; }
  std::shared_ptr<const GridPropagator> kernel_ptr() const { return kernel_; }
  const SpaceTimeField& linear() const { return linear_; }
  const NonlinearitySpec& spec() const { return spec_; }  // A filled in
  const SolverConfig& config() const { return cfg_; }
  double N_h() const { return N_h_; }
  double A() const { return spec_.A; }
  /// Largest epsilon with 2 epsilon N_h <= 1/A.
  double epsilon_cap() const { return 1.0 / (2.0 * N_h_ * spec_.A); }

  /// F(u) on the determined part of the grid (0 elsewhere).
  SpaceTimeField apply_F(const SpaceTimeField& u) const;
  /// L F(u): the Duhamel integral of F(u).
  SpaceTimeField nonlinear_term(const SpaceTimeField& u) const;
  /// The Picard map T u = eps u^0 + L F(u).
  SpaceTimeField picard_map(const SpaceTimeField& u, double eps) const;
  /// Phi_h on the grid.
  const SpaceTimeField& weight() const { return weight_; }

 private:
  void init(const RadialProfile& u0, const RadialProfile& u1);
  std::shared_ptr<const GridPropagator> kernel_;
  NonlinearitySpec spec_;
  SolverConfig cfg_;
  SpaceTimeField linear_, weight_;
  double N_h_ = 0.0;
};

/// 1.1 sup Phi_h |u^0|.
double estimate_N_h(const SpaceTimeField& linear, double h);

struct PicardResult {
  SpaceTimeField field;      // on [0, t_max] x [0, r_max]
  SpaceTimeField full;       // extended grid, 0 outside the determined region
  std::vector<double> history;  // weighted norms of successive differences
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;     // weighted_norm(u - T u) at the returned u
  double weighted = 0.0;     // weighted_norm(u)
  double epsilon = 0.0;
  double N_h = 0.0;
  double A = 0.0;
};

/// Iterates u <- eps u^0 + L F(u) from u = eps u^0. Throws ConvergenceError
/// after max_iters and DomainEscapeError when an iterate leaves |u| <= 1/A.
PicardResult picard_solve(const RadialProfile& u0, const RadialProfile& u1,
                          const NonlinearitySpec& spec, const SolverConfig& cfg);
PicardResult picard_solve(const SolverContext& ctx, double eps);

// ---- contraction --------------------------------------------------------------

struct ContractionReport {
  double epsilon = 0.0;
  int sampled_pairs = 0;
  double max_ratio = 0.0;
  std::vector<double> ratios;
};

using FieldPair = std::pair<SpaceTimeField, SpaceTimeField>;

/// ||L F(u) - L F(v)|| / ||u - v|| for each pair; pairs with u = v are skipped.
ContractionReport contraction_report(const SolverContext& ctx, double eps,
                                     const std::vector<FieldPair>& pairs);

/// Random pair in X_eps: u = 2 eps N_h xi / Phi_h with xi a normalised sum of
/// eight tensor-product cosines (frequencies uniform in [0, 3], phases
/// uniform, amplitudes standard normal), so |xi| <= 1. Pair n of a probe
/// draws from the mt19937_64 stream seeded with seed + n.
FieldPair random_pair(const SolverContext& ctx, double eps, std::uint64_t seed);

ContractionReport contraction_probe(const SolverContext& ctx, double eps, int n_pairs,
                                    std::uint64_t seed);

struct EpsilonSearch {
  double epsilon = 0.0;      // lower end of the final bracket
  double upper = 0.0;        // upper end of the final bracket
  double max_ratio = 0.0;    // probe result at epsilon
  std::vector<std::pair<double, double>> probes;  // (epsilon, max_ratio) in order
};

/// Largest probed epsilon in [1e-12, min(1, epsilon_cap)] whose probe stays
/// within target_ratio: the upper end is accepted directly, otherwise 20
/// geometric bisection steps. Throws NumericError when even 1e-12 fails.
EpsilonSearch epsilon_threshold(const SolverContext& ctx, double target_ratio, int n_pairs,
                                std::uint64_t seed);

// ---- claim integral, decay, local window -------------------------------------

struct ClaimValue {
  double claim_value = 0.0;
  double weighted = 0.0;
};

/// int_0^t W(t - tau, r, f_tau) dtau with
///   f_tau(lambda) = (ln 1/eps + lambda)^{1-p} sinh(lambda) <tau - lambda>^{-h} (cosh lambda)^{-1/2}
/// and weighted = claim_value (cosh r)^{1/2} <t - r>^h.
ClaimValue claim_bound_check(double p, double h, double epsilon, double t, double r,
                             const QuadratureConfig& q = {});

struct DecayFitReport {
  double slope_r = 0.0;
  double slope_tr = 0.0;
  double sup_weighted = 0.0;
  std::string fit_window;
  int points_r = 0;
  int points_tr = 0;
};

/// Least-squares slopes of ln|u| along t - r = 1 (r >= 2) and in t - r at
/// fixed r (nearest node to min(t_max, r_max) / 3, t - r >= 2), plus
/// sup |u| (cosh r)^{1/2} (cosh(t - r))^{1/2} / K_k(t - r).
DecayFitReport decay_fit(const SpaceTimeField& u, double k);

/// min(1, 1 / (2 sqrt(2) e M)).
double local_existence_window(double M);

}  // namespace hwave
