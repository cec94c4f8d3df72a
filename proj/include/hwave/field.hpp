#pragma once

#include <cstddef>
#include <vector>

#include "hwave/profile.hpp"

namespace hwave {

/// u(t, r) on a rectangular grid, row-major in t.
struct SpaceTimeField {
  std::vector<double> t_grid;
  std::vector<double> r_grid;
  std::vector<double> values;

  SpaceTimeField() = default;
  SpaceTimeField(std::vector<double> t, std::vector<double> r, double fill = 0.0);

  std::size_t nt() const { return t_grid.size(); }
  std::size_t nr() const { return r_grid.size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * r_grid.size() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * r_grid.size() + j]; }
  const double* row(std::size_t i) const { return values.data() + i * r_grid.size(); }
  double* row(std::size_t i) { return values.data() + i * r_grid.size(); }

  /// Throws DomainError on inconsistent sizes, non-monotone grids or
  /// non-finite values.
  void validate() const;

  /// The t-slice at row i as a radial profile (cubic, even at r = 0).
  RadialProfile slice(std::size_t i) const;

  /// Bicubic-in-r, linear-in-t interpolation; throws outside the grid.
  double interpolate(double t, double r) const;
};

/// n + 1 equispaced points lo, lo + h, ..., hi with h = (hi - lo) / n.
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace hwave
