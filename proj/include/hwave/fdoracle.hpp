#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hwave/field.hpp"
#include "hwave/nonlin.hpp"
#include "hwave/profile.hpp"

namespace hwave {

/// Leapfrog discretisation of u_tt = u_rr + coth(r) u_r + u/4 + f on
/// [0, r_max] with u_r(t, 0) = 0 and u(t, r_max) = 0.
struct FDConfig {
  double dr = 2e-3;
  double dt = 1.6e-3;
  double r_max = 8.0;
  double t_max = 4.0;
  // keep every stride-th time level / radial node in the returned field
  int stride_t = 1;
  int stride_r = 1;

  double cfl() const { return dt / dr; }
  /// CFL <= 0.9, positive spacings, r_max >= t_max + support_radius.
  void validate(double support_radius = 0.0) const;
};

/// Radius beyond which |f| < threshold (checked on a grid out to 700), or
/// the declared support radius.
double effective_support(const RadialProfile& f, double threshold = 1e-15);

/// Forcing term f(t, r, u) evaluated on a whole time level.
using Forcing = std::function<void(double t, std::span<const double> r,
                                   std::span<const double> u, std::span<double> out)>;

Forcing no_forcing();
Forcing nonlinear_forcing(const NonlinearitySpec& spec);
/// Prescribed source S(t, r) interpolated from a field (linear in t, cubic in r).
Forcing source_forcing(const SpaceTimeField& source);

/// Explicit stepper exposing its two time levels.
class LeapfrogStepper {
 public:
  LeapfrogStepper(const FDConfig& cfg, const RadialProfile& u0, const RadialProfile& u1,
                  Forcing forcing, double eps = 1.0);

  /// Advance one step; throws InstabilityError on the first non-finite value.
  void step();
  /// Swap the two stored levels and negate dt, so subsequent steps run backward.
  void reverse();

  double t() const { return t_; }
  std::size_t steps_taken() const { return steps_; }
  const std::vector<double>& r_grid() const { return r_; }
  const std::vector<double>& current() const { return cur_; }
  const std::vector<double>& previous() const { return prev_; }

 private:
  void apply_operator(std::span<const double> u, double t, std::span<double> out) const;
  FDConfig cfg_;
  Forcing forcing_;
  std::vector<double> r_, coth_half_, cur_, prev_, scratch_;
  mutable std::vector<double> force_;
  double t_ = 0.0;
  double dt_;
  std::size_t steps_ = 0;
  bool started_ = false;
  std::vector<double> u1_;
};

/// Full run, returning the field on the (strided) grid up to t_max.
SpaceTimeField fd_solve(const RadialProfile& u0, const RadialProfile& u1, Forcing forcing,
                        const FDConfig& cfg, double eps = 1.0);
SpaceTimeField fd_solve(const RadialProfile& u0, const RadialProfile& u1,
                        const NonlinearitySpec& spec, const FDConfig& cfg, double eps = 1.0);

struct PartialSolve {
  SpaceTimeField field;               // recorded levels up to the last finite one
  std::optional<double> t_breakdown;  // time of the first non-finite value
};

/// As fd_solve, but a non-finite value ends the run instead of throwing.
PartialSolve fd_solve_until_breakdown(const RadialProfile& u0, const RadialProfile& u1,
                                      Forcing forcing, const FDConfig& cfg, double eps = 1.0);

struct OrderReport {
  double order = 0.0;
  bool inconclusive = false;
  std::vector<double> spacings;  // dr at each level
  std::vector<double> values;    // probe value at each level
  std::vector<double> errors;    // against the exact value, or successive differences
};

/// Runs fd_solve at dr, dr/2, ... (refinements + 1 levels, dt/dr fixed) and
/// estimates the order at (t_probe, r_probe). With an exact value the order
/// comes from successive error ratios; otherwise from Richardson differences
/// (needs refinements >= 2). Non-monotone errors set `inconclusive`.
OrderReport convergence_order(const RadialProfile& u0, const RadialProfile& u1,
                              const NonlinearitySpec& spec, const FDConfig& cfg, int refinements,
                              double t_probe, double r_probe,
                              std::optional<double> exact = std::nullopt);

}  // namespace hwave
