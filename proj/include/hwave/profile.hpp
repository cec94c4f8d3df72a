#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hwave {

/// A radial function lambda -> f(lambda) on [0, inf). Either a named closed
/// form (with the points where it is not smooth, used to split quadrature)
/// or samples plus an interpolation rule. Cheap to copy.
class RadialProfile {
 public:
  enum class Kind { closed_form, sampled };
  enum class Interp { linear, cubic };

  RadialProfile();  // identically zero

  static RadialProfile closed_form(std::string tag, std::function<double(double)> f,
                                   std::vector<double> breakpoints = {},
                                   std::optional<double> support_radius = std::nullopt);
  /// Samples at strictly increasing lambda >= 0. Cubic is monotone
  /// (Fritsch-Carlson); when the first sample sits at lambda = 0 its slope is
  /// forced to 0 so the profile is C^1 as a function on the plane.
  static RadialProfile sampled(std::vector<double> lambda, std::vector<double> values,
                               Interp interp = Interp::cubic,
                               std::optional<double> support_radius = std::nullopt);

  static RadialProfile zero();
  static RadialProfile constant(double c);
  /// (cosh lambda)^(-k-1/2)
  static RadialProfile theta(double k);
  /// height on [lo, hi], smoothstep ramps of width `ramp` on both sides,
  /// zero outside [lo - ramp, hi + ramp].
  static RadialProfile plateau(double lo, double hi, double ramp, double height = 1.0);

  double operator()(double lambda) const;

  Kind kind() const noexcept;
  const std::string& tag() const noexcept;
  std::span<const double> breakpoints() const noexcept;
  std::optional<double> support_radius() const noexcept;
  /// Largest lambda at which the profile can be evaluated (inf if unbounded).
  double domain_end() const noexcept;
  bool is_zero() const noexcept;

  /// s * f, sharing nothing mutable with *this.
  RadialProfile scaled(double s) const;

 private:
  struct Impl;
  explicit RadialProfile(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Monotone piecewise-cubic interpolation on a fixed node set. Shared by the
/// sampled profile and the field-to-profile conversions.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y, bool even_at_zero);
  double operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::size_t locate(double x) const;
  std::vector<double> x_, y_, d_;
  bool uniform_ = false;
  double h_ = 0.0;
};

}  // namespace hwave
