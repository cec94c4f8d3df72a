#include "hwave/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hwave {

const char* to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::none: return "none";
    case NonlinearityKind::canonical_sinh_inverse: return "canonical_sinh_inverse";
    case NonlinearityKind::piecewise_generic: return "piecewise_generic";
  }
  return "?";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
  if (name == "none" || name == "zero") return NonlinearityKind::none;
  if (name == "canonical_sinh_inverse" || name == "canonical")
    return NonlinearityKind::canonical_sinh_inverse;
  if (name == "piecewise_generic" || name == "generic") return NonlinearityKind::piecewise_generic;
  throw ConfigError("unknown nonlinearity kind '" + name + "'");
}

namespace {

struct Blend {
  double x0, x1;      // ln delta0, -ln delta0
  double y0, y1;      // ln F at the ends
  double s0, s1;      // d ln F / d ln|u| at the ends
};

Blend blend_of(const NonlinearitySpec& s) {
  Blend b;
  b.x0 = std::log(s.delta0);
  b.x1 = -b.x0;
  b.y0 = (1.0 - s.p) * std::log(-b.x0) + b.x0;
  b.s0 = 1.0 + (1.0 - s.p) / b.x0;
  b.y1 = s.q * b.x1;
  b.s1 = s.q;
  return b;
}

// Cubic Hermite value and slope at x in [x0, x1].
void hermite(const Blend& b, double x, double& y, double& dy) {
  const double h = b.x1 - b.x0;
  const double s = (x - b.x0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  y = (2 * s3 - 3 * s2 + 1) * b.y0 + (s3 - 2 * s2 + s) * h * b.s0 + (-2 * s3 + 3 * s2) * b.y1 +
      (s3 - s2) * h * b.s1;
  dy = ((6 * s2 - 6 * s) * b.y0 + (3 * s2 - 4 * s + 1) * h * b.s0 + (-6 * s2 + 6 * s) * b.y1 +
        (3 * s2 - 2 * s) * h * b.s1) /
       h;
}

}  // namespace

void NonlinearitySpec::validate() const {
  if (kind == NonlinearityKind::none) return;
  std::ostringstream os;
  if (!(p > 1.0) || !std::isfinite(p)) os << "nonlinearity: p must exceed 1 (got " << p << ")";
  else if (!(q > 1.0) || !std::isfinite(q)) os << "nonlinearity: q must exceed 1 (got " << q << ")";
  else if (!(delta0 > 0.0 && delta0 < 1.0))
    os << "nonlinearity: delta0 must lie in (0, 1) (got " << delta0 << ")";
  else if (!(A > 0.0) || !std::isfinite(A)) os << "nonlinearity: A must be positive (got " << A << ")";
  if (!os.str().empty()) throw ConfigError(os.str());
  if (kind == NonlinearityKind::piecewise_generic) {
    const Blend b = blend_of(*this);
    for (int i = 0; i <= 400; ++i) {
      double y, dy;
      hermite(b, b.x0 + (b.x1 - b.x0) * i / 400.0, y, dy);
      if (!(dy > 0.0))
        throw ConfigError("nonlinearity: generic blend is not increasing for these p, q, delta0");
    }
  }
}

double F_canonical(double u, double p) {
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  return std::pow(std::asinh(1.0 / a), 1.0 - p) * a;
}

double F_canonical_prime(double u, double p) {
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  const double s = std::asinh(1.0 / a);
  const double d = std::pow(s, 1.0 - p) + (p - 1.0) * std::pow(s, -p) / std::sqrt(1.0 + a * a);
  return u < 0 ? -d : d;
}

double F_generic(double u, const NonlinearitySpec& spec) {
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  if (a < spec.delta0) return std::pow(std::log(1.0 / a), 1.0 - spec.p) * a;
  if (a > 1.0 / spec.delta0) return std::pow(a, spec.q);
  double y, dy;
  hermite(blend_of(spec), std::log(a), y, dy);
  return std::exp(y);
}

double F_generic_prime(double u, const NonlinearitySpec& spec) {
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  double d;
  if (a < spec.delta0) {
    const double L = std::log(1.0 / a);
    d = std::pow(L, 1.0 - spec.p) + (spec.p - 1.0) * std::pow(L, -spec.p);
  } else if (a > 1.0 / spec.delta0) {
    d = spec.q * std::pow(a, spec.q - 1.0);
  } else {
    double y, dy;
    hermite(blend_of(spec), std::log(a), y, dy);
    d = std::exp(y) * dy / a;
  }
  return u < 0 ? -d : d;
}

double F_eval(double u, const NonlinearitySpec& spec) {
  switch (spec.kind) {
    case NonlinearityKind::none: return 0.0;
    case NonlinearityKind::canonical_sinh_inverse: return F_canonical(u, spec.p);
    case NonlinearityKind::piecewise_generic: return F_generic(u, spec);
  }
  return 0.0;
}

double F_prime(double u, const NonlinearitySpec& spec) {
  switch (spec.kind) {
    case NonlinearityKind::none: return 0.0;
    case NonlinearityKind::canonical_sinh_inverse: return F_canonical_prime(u, spec.p);
    case NonlinearityKind::piecewise_generic: return F_generic_prime(u, spec);
  }
  return 0.0;
}

double G_envelope(double u_abs, double p, double A) {
  if (!(p > 1.0)) throw DomainError("G_envelope requires p > 1");
  if (!(A > 0.0)) throw DomainError("G_envelope requires A > 0");
  if (!(u_abs > 0.0) || u_abs > 1.0 / A || !(u_abs < 1.0)) {
    std::ostringstream os;
    os << "G_envelope: |u| = " << u_abs << " outside (0, min(1/A, 1)) with A = " << A;
    throw DomainError(os.str());
  }
  return A * std::pow(std::log(1.0 / u_abs), 1.0 - p);
}

DiffBound lipschitz_diff_bound(double u, double v, const NonlinearitySpec& spec) {
  if (spec.kind == NonlinearityKind::none) return {0.0, 0.0};
  const double m = std::max(std::abs(u), std::abs(v));
  if (m > 1.0 / spec.A || m >= 1.0) {
    std::ostringstream os;
    os << "lipschitz_diff_bound: max(|u|,|v|) = " << m << " exceeds 1/A = " << 1.0 / spec.A;
    throw DomainError(os.str());
  }
  DiffBound out;
  out.diff = std::abs(F_eval(u, spec) - F_eval(v, spec));
  out.bound = m == 0.0 ? 0.0 : G_envelope(m, spec.p, spec.A) * std::abs(u - v);
  return out;
}

EnvelopeFit fit_envelope_constant(const NonlinearitySpec& spec, double N_h) {
  if (spec.kind == NonlinearityKind::none)
    return {std::max(1.0 + 1e-3, 2.0 * N_h * (1.0 + 1e-2)), 0.0, 0.0};
  NonlinearitySpec s = spec;
  s.A = 1.0;
  s.validate();
  auto ratio = [&](double x) {  // x = ln(1/u) > 0
    const double u = std::exp(-x);
    return std::abs(F_prime(u, s)) * std::pow(x, s.p - 1.0);
  };
  // log grid in x = ln(1/u) over [1e-8, 700]
  double best = 0.0, best_x = 1.0;
  const int n = 4000;
  const double lx0 = std::log(1e-8), lx1 = std::log(700.0);
  for (int i = 0; i <= n; ++i) {
    const double x = std::exp(lx0 + (lx1 - lx0) * i / n);
    const double v = ratio(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // golden-section refinement around the grid maximiser
  const double step = std::exp((lx1 - lx0) / n);
  double a = best_x / step, b = best_x * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (ratio(c) > ratio(d)) b = d;
    else a = c;
  }
  const double xm = 0.5 * (a + b);
  if (ratio(xm) > best) {
    best = ratio(xm);
    best_x = xm;
  }
  EnvelopeFit fit;
  fit.sup_ratio = best;
  fit.u_at_sup = std::exp(-best_x);
  fit.A = std::max({best * (1.0 + 1e-6), 1.0 + 1e-3, 2.0 * N_h * (1.0 + 1e-2)});
  return fit;
}

double lipschitz_bound_on(const NonlinearitySpec& spec, double bound) {
  if (!(bound > 0.0)) throw DomainError("lipschitz_bound_on requires a positive bound");
  double best = 0.0;
  const int n = 20000;
  for (int i = 1; i <= n; ++i) best = std::max(best, std::abs(F_prime(bound * i / n, spec)));
  return best;
}

}  // namespace hwave
