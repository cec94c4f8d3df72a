#include "hwave/field.hpp"

#include <algorithm>
#include <cmath>

#include "hwave/errors.hpp"

namespace hwave {

SpaceTimeField::SpaceTimeField(std::vector<double> t, std::vector<double> r, double fill)
    : t_grid(std::move(t)), r_grid(std::move(r)), values(t_grid.size() * r_grid.size(), fill) {}

void SpaceTimeField::validate() const {
  if (t_grid.empty() || r_grid.empty()) throw DomainError("field grids must be non-empty");
  if (values.size() != t_grid.size() * r_grid.size())
    throw DomainError("field value count does not match its grids");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("field t_grid must be increasing");
  for (std::size_t j = 1; j < r_grid.size(); ++j)
    if (!(r_grid[j] > r_grid[j - 1])) throw DomainError("field r_grid must be increasing");
  if (!(t_grid.front() >= 0.0) || !(r_grid.front() >= 0.0))
    throw DomainError("field grids must be nonnegative");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("field contains non-finite values");
}

RadialProfile SpaceTimeField::slice(std::size_t i) const {
  std::vector<double> v(row(i), row(i) + nr());
  return RadialProfile::sampled(r_grid, std::move(v), RadialProfile::Interp::cubic);
}

double SpaceTimeField::interpolate(double t, double r) const {
  const double tol_t = 1e-12 * std::max(1.0, t_grid.back());
  const double tol_r = 1e-12 * std::max(1.0, r_grid.back());
  if (t < t_grid.front() - tol_t || t > t_grid.back() + tol_t || r < r_grid.front() - tol_r ||
      r > r_grid.back() + tol_r)
    throw DomainError("field interpolation outside its grid");
  t = std::clamp(t, t_grid.front(), t_grid.back());
  r = std::clamp(r, r_grid.front(), r_grid.back());
  auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
  std::size_t i1 = static_cast<std::size_t>(it - t_grid.begin());
  if (nt() == 1) return Pchip(r_grid, std::vector<double>(row(0), row(0) + nr()), true)(r);
  i1 = std::clamp<std::size_t>(i1, 1, nt() - 1);
  const std::size_t i0 = i1 - 1;
  const double w = (t - t_grid[i0]) / (t_grid[i1] - t_grid[i0]);
  const bool even = r_grid.front() == 0.0;
  auto at_row = [&](std::size_t i) {
    if (nr() == 1) return at(i, 0);
    return Pchip(r_grid, std::vector<double>(row(i), row(i) + nr()), even)(r);
  };
  const double a = w < 1.0 ? at_row(i0) : 0.0;
  const double b = w > 0.0 ? at_row(i1) : 0.0;
  return (1.0 - w) * a + w * b;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("uniform_grid needs step > 0, hi >= lo");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = lo + static_cast<double>(i) * step;
  return g;
}

}  // namespace hwave
