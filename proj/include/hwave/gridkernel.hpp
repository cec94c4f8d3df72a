#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hwave/field.hpp"
#include "hwave/hypgeo.hpp"
#include "hwave/profile.hpp"

namespace hwave {

/// Uniform (t, r) grid of the integral-equation solver. Values are reported
/// on [0, t_max] x [0, r_max]; internally the radial grid reaches
/// R = r_max + t_max so that every reported value has its domain of
/// dependence on the grid. Row i is determined for r <= R - t_i.
struct SolverGrid {
  double t_max = 8.0;
  double r_max = 8.0;
  double dt = 0.05;
  double dr = 0.05;

  void validate() const;
};

/// Precomputed discrete sine propagator: for every lag d and radial node j,
/// the row K_d[j] with I(d dt, r_j, g) ~= sum_m K_d[j][m] g(r_m) for g given
/// by its samples (local cubic interpolation, even at r = 0).
class GridPropagator {
 public:
  GridPropagator(const SolverGrid& grid, const QuadratureConfig& q);

  const SolverGrid& grid() const { return grid_; }
  const std::vector<double>& t_grid() const { return t_; }
  /// Extended radial grid.
  const std::vector<double>& r_grid() const { return r_; }
  std::size_t nt() const { return t_.size(); }
  std::size_t nr() const { return r_.size(); }
  /// Number of leading radial nodes determined at time index i.
  std::size_t valid_count(std::size_t i) const { return valid_[i]; }
  /// Number of radial nodes with r <= r_max.
  std::size_t report_count() const { return report_nr_; }

  /// out[j] = I(lag dt, r_j, g) for j < rows. rows must not exceed the rows
  /// built for that lag (valid_count(lag - 2) or all when lag < 2).
  void propagate(std::size_t lag, std::span<const double> g, std::span<double> out,
                 std::size_t rows) const;

  /// Zero field on (t_grid, r_grid).
  SpaceTimeField zero_field() const;
  /// Samples of f on r_grid (0 beyond the profile's domain).
  std::vector<double> sample(const RadialProfile& f) const;

  /// (L S)(t_i, r_j) = int_0^{t_i} I(t_i - tau, r_j, S(tau, .)) dtau with
  /// Simpson weights in tau; entries outside the determined region are 0.
  SpaceTimeField duhamel(const SpaceTimeField& source) const;

  /// u^0 = d/dt I(t, r, u0) + I(t, r, u1) on the grid. The time derivative
  /// uses fourth-order central differences of the discrete propagator.
  SpaceTimeField linear_part(const RadialProfile& u0, const RadialProfile& u1) const;

  /// Drops the entries with r > r_max.
  SpaceTimeField restrict_to_report(const SpaceTimeField& f) const;

  std::size_t stored_weights() const;

 private:
  struct Row {
    std::uint32_t first = 0;  // first grid index
    std::uint32_t count = 0;
    std::size_t offset = 0;   // into weights_[lag]
  };
  void build_lag(std::size_t lag, const QuadratureConfig& q);

  SolverGrid grid_;
  double R_ = 0.0;
  std::vector<double> t_, r_;
  std::vector<std::size_t> valid_;
  std::size_t report_nr_ = 0;
  std::vector<std::vector<Row>> rows_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace hwave
