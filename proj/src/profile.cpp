#include "hwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hwave/errors.hpp"
#include "hwave/hypgeo.hpp"

namespace hwave {

struct RadialProfile::Impl {
  Kind kind = Kind::closed_form;
  std::string tag = "zero";
  std::function<double(double)> f;
  std::vector<double> breakpoints;
  std::optional<double> support;
  bool zero = true;

  Pchip cubic;
  std::vector<double> x, y;  // linear
  Interp interp = Interp::cubic;
};

RadialProfile::RadialProfile() : impl_(zero().impl_) {}

RadialProfile::RadialProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

RadialProfile RadialProfile::zero() {
  static const auto z = [] {
    auto impl = std::make_shared<Impl>();
    impl->f = [](double) { return 0.0; };
    return std::shared_ptr<const Impl>(impl);
  }();
  return RadialProfile(z);
}

RadialProfile RadialProfile::closed_form(std::string tag, std::function<double(double)> f,
                                         std::vector<double> breakpoints,
                                         std::optional<double> support_radius) {
  if (!f) throw DomainError("closed-form profile needs a callable");
  if (support_radius && !(*support_radius >= 0.0))
    throw DomainError("support radius must be nonnegative");
  std::sort(breakpoints.begin(), breakpoints.end());
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->tag = std::move(tag);
  impl->f = std::move(f);
  impl->breakpoints = std::move(breakpoints);
  impl->support = support_radius;
  impl->zero = false;
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::sampled(std::vector<double> lambda, std::vector<double> values,
                                     Interp interp, std::optional<double> support_radius) {
  if (lambda.size() < 2) throw DomainError("sampled profile needs at least 2 points");
  if (lambda.size() != values.size())
    throw DomainError("sampled profile: abscissa and value counts differ");
  if (!(lambda.front() >= 0.0)) throw DomainError("sampled profile: abscissae must be >= 0");
  for (std::size_t i = 1; i < lambda.size(); ++i)
    if (!(lambda[i] > lambda[i - 1]))
      throw DomainError("sampled profile: abscissae must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("sampled profile: non-finite value");
  if (support_radius && !(*support_radius >= 0.0))
    throw DomainError("support radius must be nonnegative");

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::sampled;
  impl->tag = "sampled";
  impl->support = support_radius;
  impl->interp = interp;
  impl->zero = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  if (interp == Interp::cubic)
    impl->cubic = Pchip(lambda, values, lambda.front() == 0.0);
  impl->x = std::move(lambda);
  impl->y = std::move(values);
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant profile: non-finite value");
  if (c == 0.0) return zero();
  std::ostringstream os;
  os << "constant:" << c;
  return closed_form(os.str(), [c](double) { return c; });
}

RadialProfile RadialProfile::theta(double k) {
  EnvelopeParams params{k};
  params.validate();
  std::ostringstream os;
  os << "theta:" << k;
  return closed_form(os.str(), [params](double lam) { return theta_k(std::abs(lam), params); });
}

RadialProfile RadialProfile::plateau(double lo, double hi, double ramp, double height) {
  if (!(ramp > 0.0) || !(lo >= ramp) || !(hi > lo))
    throw DomainError("plateau needs ramp > 0, lo >= ramp and hi > lo");
  auto smooth = [](double x) {  // C^2 quintic smoothstep on [0, 1]
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
  };
  auto f = [=](double lam) {
    if (lam <= lo - ramp || lam >= hi + ramp) return 0.0;
    if (lam < lo) return height * smooth((lam - (lo - ramp)) / ramp);
    if (lam > hi) return height * smooth((hi + ramp - lam) / ramp);
    return height;
  };
  std::ostringstream os;
  os << "plateau:" << lo << ',' << hi << ',' << ramp;
  return closed_form(os.str(), f, {lo - ramp, lo, hi, hi + ramp}, hi + ramp);
}

double RadialProfile::operator()(double lambda) const {
  const Impl& m = *impl_;
  if (m.zero) return 0.0;
  if (m.support && lambda > *m.support) return 0.0;
  if (m.kind == Kind::closed_form) return m.f(lambda);
  const double end = m.x.back();
  if (lambda > end) {
    if (lambda > end * (1.0 + 1e-12) + 1e-300)
      throw DomainError("sampled profile evaluated beyond its last sample");
    lambda = end;
  }
  if (lambda < m.x.front()) {
    if (m.x.front() > 0.0) throw DomainError("sampled profile evaluated below its first sample");
    lambda = m.x.front();
  }
  if (m.interp == Interp::cubic) return m.cubic(lambda);
  auto it = std::upper_bound(m.x.begin(), m.x.end(), lambda);
  std::size_t i = static_cast<std::size_t>(it - m.x.begin());
  i = std::clamp<std::size_t>(i, 1, m.x.size() - 1);
  const double w = (lambda - m.x[i - 1]) / (m.x[i] - m.x[i - 1]);
  return (1.0 - w) * m.y[i - 1] + w * m.y[i];
}

RadialProfile::Kind RadialProfile::kind() const noexcept { return impl_->kind; }
const std::string& RadialProfile::tag() const noexcept { return impl_->tag; }
std::span<const double> RadialProfile::breakpoints() const noexcept {
  return impl_->breakpoints;
}
std::optional<double> RadialProfile::support_radius() const noexcept { return impl_->support; }
bool RadialProfile::is_zero() const noexcept { return impl_->zero; }

double RadialProfile::domain_end() const noexcept {
  if (impl_->support || impl_->kind == Kind::closed_form)
    return std::numeric_limits<double>::infinity();
  return impl_->x.back();
}

RadialProfile RadialProfile::scaled(double s) const {
  if (s == 0.0 || is_zero()) return zero();
  if (impl_->kind == Kind::sampled) {
    std::vector<double> y = impl_->y;
    for (double& v : y) v *= s;
    return sampled(impl_->x, std::move(y), impl_->interp, impl_->support);
  }
  auto base = impl_;
  return closed_form(impl_->tag, [base, s](double lam) { return s * base->f(lam); },
                     impl_->breakpoints, impl_->support);
}

// ---- Pchip ----------------------------------------------------------------

Pchip::Pchip(std::vector<double> x, std::vector<double> y, bool even_at_zero)
    : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0) {
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0.0) return 0.0;
      if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
      return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  if (even_at_zero) d_[0] = 0.0;

  h_ = h[0];
  uniform_ = true;
  for (double hi : h)
    if (std::abs(hi - h_) > 1e-12 * h_) {
      uniform_ = false;
      break;
    }
}

std::size_t Pchip::locate(double x) const {
  const std::size_t last = x_.size() - 2;
  if (uniform_) {
    const double f = (x - x_.front()) / h_;
    if (f <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(f), last);
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - x_.begin()) - 1, last);
}

double Pchip::operator()(double x) const {
  const std::size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

}  // namespace hwave
