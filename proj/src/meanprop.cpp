#include "hwave/meanprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hwave {

// ---- MonotoneWeight ---------------------------------------------------------

MonotoneWeight::MonotoneWeight(std::string name, Form form, Fn a, Fn da)
    : name_(std::move(name)), form_(form), a_(std::move(a)), da_(std::move(da)) {}

MonotoneWeight MonotoneWeight::two_cosh() {
  return MonotoneWeight("2cosh", Form::two_cosh, nullptr, nullptr);
}

MonotoneWeight MonotoneWeight::square() {
  return MonotoneWeight("square", Form::square, nullptr, nullptr);
}

MonotoneWeight MonotoneWeight::custom(std::string name, Fn a, Fn da, double check_to) {
  if (!a || !da) throw DomainError("custom weight needs a and a'");
  MonotoneWeight w(std::move(name), Form::custom, std::move(a), std::move(da));
  w.validate(check_to);
  return w;
}

double MonotoneWeight::value(double s) const {
  switch (form_) {
    case Form::two_cosh: return 2.0 * std::cosh(s);
    case Form::square: return s * s;
    case Form::custom: return a_(s);
  }
  return 0.0;
}

double MonotoneWeight::derivative(double s) const {
  switch (form_) {
    case Form::two_cosh: return 2.0 * std::sinh(s);
    case Form::square: return 2.0 * s;
    case Form::custom: return da_(s);
  }
  return 0.0;
}

double MonotoneWeight::difference(double x, double y, double x_minus_y) const {
  switch (form_) {
    case Form::two_cosh:
      return 4.0 * std::sinh(0.5 * (x + y)) * std::sinh(0.5 * x_minus_y);
    case Form::square: return (x + y) * x_minus_y;
    case Form::custom:
      // Short offsets: a(x) - a(y) = int_0^1 a'(y + u d) d du, free of cancellation.
      if (std::abs(x_minus_y) <= 0.5)
        return x_minus_y * integrate_gl([&](double u) { return da_(y + u * x_minus_y); }, 0.0,
                                        1.0, 16);
      return a_(x) - a_(y);
  }
  return 0.0;
}

void MonotoneWeight::validate(double check_to) const {
  if (!(check_to > 0.0)) throw DomainError("weight validation range must be positive");
  constexpr int nt = 24;
  constexpr int ns = 48;
  for (int i = 1; i <= nt; ++i) {
    const double t = check_to * i / nt;
    if (!(derivative(t) > 0.0)) {
      std::ostringstream os;
      os << "weight " << name_ << ": a'(" << t << ") is not positive";
      throw DomainError(os.str());
    }
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ns; ++j) {
      const double s = t * j / ns;
      const double g = (derivative(t) - derivative(s)) / std::sqrt(difference(t, s, t - s));
      if (g > prev + 1e-9 * std::abs(prev) + 1e-12) {
        std::ostringstream os;
        os << "weight " << name_ << ": (a'(t)-a'(s))/sqrt(a(t)-a(s)) increases in s at t=" << t
           << ", s=" << s;
        throw DomainError(os.str());
      }
      prev = g;
    }
  }
}

// ---- quadrature engines -----------------------------------------------------

namespace {

void check_nonneg(double t, double r, const char* op) {
  if (!(t >= 0.0) || !(r >= 0.0) || !std::isfinite(t) || !std::isfinite(r)) {
    std::ostringstream os;
    os << op << ": requires finite t, r >= 0 (got t=" << t << ", r=" << r << ")";
    throw DomainError(os.str());
  }
}

// Nodes of the mean over the circle of radius s about a point at distance r:
//   M = (1/pi) int_lo^hi f(lambda) sinh(lambda) dlambda
//             / sqrt((cosh hi - cosh lambda)(cosh lambda - cosh lo)),
// lo = |r - s|, hi = r + s. Within distance 1 of each end the substitutions
// v^2 = cosh lambda - cosh lo and w^2 = cosh hi - cosh lambda remove the
// inverse square roots exactly; the middle is integrated in lambda, where
// the profiles have their natural O(1) scale. (Integrating in the angle
// instead resolves badly when r and s are both large: the part of the circle
// near the origin then shrinks to an angular window of width ~e^{-(r+s)/2}.)
template <class Visit>
void visit_mean(double s, double r, int n, std::span<const double> cuts, double scale,
                Visit&& visit) {
  if (s == 0.0) {
    visit(r, scale);
    return;
  }
  if (r == 0.0) {
    visit(s, scale);
    return;
  }
  if (std::min(r, s) <= 1e-3) {
    // the window [|r - s|, r + s] is too thin for the lambda substitutions;
    // integrate in the angle, cosh d - 1 = 2 sinh^2((r - s)/2) + 2 sinh r sinh s sin^2(th/2)
    const double sh = std::sinh(0.5 * (r - s));
    const double base = 2.0 * sh * sh, amp = 2.0 * std::sinh(r) * std::sinh(s);
    const auto& unit = gauss_legendre_unit(16);
    for (const auto& nd : unit) {
      const double half = 0.25 * std::numbers::pi * (1.0 + nd.x);
      const double sn = std::sin(half);
      visit(acosh1p(base + amp * sn * sn), 0.5 * scale * nd.w);
    }
    return;
  }
  const double lo = std::abs(r - s);
  const double hi = r + s;
  const double sl = std::sinh(0.5 * lo);
  const double lo_m1 = 2.0 * sl * sl;              // cosh lo - 1
  const double span = 2.0 * std::sinh(r) * std::sinh(s);  // cosh hi - cosh lo
  // each end region covers at most half of the cosh range, which keeps the
  // opposite singularity well away from it in the substituted variable
  const double half_point = acosh1p(lo_m1 + 0.5 * span);
  const double la = std::min(lo + 1.0, half_point);
  const double lb = std::max(hi - 1.0, half_point);

  // cosh x - cosh y for x >= y without cancellation
  auto cdiff = [](double x, double y) {
    return 2.0 * std::sinh(0.5 * (x + y)) * std::sinh(0.5 * (x - y));
  };
  const double inv_pi = scale / std::numbers::pi;

  double pts[20];
  int np = 0;
  pts[np++] = lo;
  pts[np++] = la;
  pts[np++] = lb;
  pts[np++] = hi;
  for (double beta : cuts) {
    if (np == 20) break;
    if (beta > lo && beta < hi) pts[np++] = beta;
  }
  std::sort(pts, pts + np);

  const int n_edge = std::max(12, n / 4);
  for (int k = 0; k + 1 < np; ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    if (!(b > a)) continue;
    if (b <= la) {
      const double va = a == lo ? 0.0 : std::sqrt(cdiff(a, lo));
      const double vb = std::sqrt(cdiff(b, lo));
      const auto& unit = gauss_legendre_unit(n_edge);
      const double mid = 0.5 * (va + vb), hw = 0.5 * (vb - va);
      for (const auto& nd : unit) {
        const double v = mid + hw * nd.x;
        const double v2 = v * v;
        visit(acosh1p(lo_m1 + v2), inv_pi * nd.w * hw * 2.0 / std::sqrt(span - v2));
      }
    } else if (a >= lb) {
      const double wa = std::sqrt(cdiff(hi, a));
      const double wb = b == hi ? 0.0 : std::sqrt(cdiff(hi, b));
      const auto& unit = gauss_legendre_unit(n_edge);
      const double mid = 0.5 * (wa + wb), hw = 0.5 * (wa - wb);
      for (const auto& nd : unit) {
        const double w = mid + hw * nd.x;
        const double w2 = w * w;
        visit(acosh1p(lo_m1 + (span - w2)), inv_pi * nd.w * hw * 2.0 / std::sqrt(span - w2));
      }
    } else {
      const int m = std::max(8, static_cast<int>(std::ceil(0.5 * n * std::max(1.0, (b - a) / 4.0))));
      const auto& unit = gauss_legendre_unit(m);
      const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
      for (const auto& nd : unit) {
        const double lam = mid + hw * nd.x;
        const double k = std::sinh(lam) / std::sqrt(cdiff(hi, lam) * cdiff(lam, lo));
        visit(lam, inv_pi * nd.w * hw * k);
      }
    }
  }
}

// I(t, r, phi) = int_0^{sigma_max} M^{s(sigma)} phi(r) dsigma with
// sigma^2 = 2cosh t - 2cosh s, which absorbs the endpoint singularity at s = t.
template <class Visit>
void visit_propagator(double t, double r, const QuadratureConfig& q,
                      std::span<const double> cuts, Visit&& visit) {
  if (t <= 0.0) return;
  // I = int_0^t M^s phi(r) sinh s / sqrt(2 cosh t - 2 cosh s) ds. Near s = t
  // the substitution w^2 = cosh t - cosh s gives weight sqrt(2) dw; elsewhere
  // s itself is used so that data concentrated at small s stays resolved.
  const double edge = std::min(1.0, t);
  const double st = t - edge;
  const double amax = std::sqrt(2.0) * std::sinh(0.5 * t);  // sqrt(cosh t - 1)
  std::vector<double> pts{0.0, st, t};
  for (double beta : cuts)
    for (double s : {beta - r, r - beta, r + beta})
      if (s > 0.0 && s < t) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto wof = [&](double s) { return std::sqrt(2.0 * std::sinh(0.5 * (t + s)) * std::sinh(0.5 * (t - s))); };
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    if (!(b > a)) continue;
    if (a >= st) {
      const int n = std::max(8, static_cast<int>(std::ceil(0.25 * q.nodes_outer * (b - a) / edge)));
      const double wa = wof(a);
      const double wb = b >= t ? 0.0 : wof(b);
      const auto& unit = gauss_legendre_unit(n);
      const double mid = 0.5 * (wa + wb), hw = 0.5 * (wa - wb);
      for (const auto& nd : unit) {
        const double w = mid + hw * nd.x;
        const double s = acosh1p((amax - w) * (amax + w));
        visit_mean(s, r, q.nodes_inner, cuts, std::sqrt(2.0) * nd.w * hw, visit);
      }
    } else {
      const int n = std::max(8, static_cast<int>(std::ceil(q.nodes_outer * std::max(b - a, 0.5) / 8.0)));
      const auto& unit = gauss_legendre_unit(n);
      const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
      for (const auto& nd : unit) {
        const double s = mid + hw * nd.x;
        const double w = wof(s);
        visit_mean(s, r, q.nodes_inner, cuts, nd.w * hw * std::sinh(s) / (std::sqrt(2.0) * w), visit);
      }
    }
  }
}

double mean_with(const RadialProfile& f, double t, double r, int n) {
  double sum = 0.0;
  visit_mean(t, r, n, f.breakpoints(), 1.0, [&](double lam, double w) { sum += w * f(lam); });
  return sum;
}

double propagate_with(const RadialProfile& phi, double t, double r, const QuadratureConfig& q) {
  double sum = 0.0;
  visit_propagator(t, r, q, phi.breakpoints(), [&](double lam, double w) { sum += w * phi(lam); });
  return sum;
}

void check_result(double v, double coarse, const QuadratureConfig& q, const char* op, double t,
                  double r) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << op << ": non-finite result at t=" << t << ", r=" << r;
    throw NumericError(os.str());
  }
  if (q.strict && std::abs(v - coarse) > q.abs_tol + q.rel_tol * std::abs(v)) {
    std::ostringstream os;
    os.precision(17);
    os << op << ": quadrature not converged at t=" << t << ", r=" << r << " (value " << v
       << ", half-resolution " << coarse << ")";
    throw NumericError(os.str());
  }
}

QuadratureConfig halved(const QuadratureConfig& q) {
  QuadratureConfig h = q;
  h.nodes_inner = std::max(4, q.nodes_inner / 2);
  h.nodes_outer = std::max(4, q.nodes_outer / 2);
  return h;
}

}  // namespace

double spherical_mean(const RadialProfile& f, double t, double r, const QuadratureConfig& q) {
  check_nonneg(t, r, "spherical_mean");
  q.validate();
  if (t == 0.0) return f(r);
  const double v = mean_with(f, t, r, q.nodes_inner);
  const double coarse = q.strict ? mean_with(f, t, r, halved(q).nodes_inner) : v;
  check_result(v, coarse, q, "spherical_mean", t, r);
  return v;
}

double sine_propagator(const RadialProfile& phi, double t, double r, const QuadratureConfig& q) {
  if (t < 0.0) return -sine_propagator(phi, -t, r, q);
  check_nonneg(t, r, "sine_propagator");
  q.validate();
  if (t == 0.0 || phi.is_zero()) return 0.0;
  const double v = propagate_with(phi, t, r, q);
  const double coarse = q.strict ? propagate_with(phi, t, r, halved(q)) : v;
  check_result(v, coarse, q, "sine_propagator", t, r);
  return v;
}

double sine_propagator_dt(const RadialProfile& u0, double t, double r, const QuadratureConfig& q) {
  check_nonneg(t, r, "sine_propagator_dt");
  if (u0.is_zero()) return 0.0;
  if (t == 0.0) return u0(r);
  constexpr double h = 1e-2;
  auto I = [&](double s) { return sine_propagator(u0, s, r, q); };
  return (-I(t + 2 * h) + 8.0 * I(t + h) - 8.0 * I(t - h) + I(t - 2 * h)) / (12.0 * h);
}

double linear_solution(const RadialProfile& u0, const RadialProfile& u1, double t, double r,
                       const QuadratureConfig& q) {
  return sine_propagator_dt(u0, t, r, q) + sine_propagator(u1, t, r, q);
}

void propagator_nodes(double t, double r, const QuadratureConfig& q,
                      std::span<const double> breakpoints, std::vector<Node>& out) {
  check_nonneg(t, r, "propagator_nodes");
  visit_propagator(t, r, q, breakpoints, [&](double lam, double w) { out.push_back({lam, w}); });
}

// ---- W and the Beta-type integrals -------------------------------------------

namespace {

// int over s in (|r-lambda|, min(t, r+lambda)) of
//   a'(s) / sqrt((a(t)-a(s)) (a(r+lambda)-a(s)) (a(s)-a(r-lambda))),
// rewritten in y = a(s) as int dy / sqrt((a(C)-y)(y-a(b))(a(D)-y)).
double w_inner(double t, double r, double lam, const MonotoneWeight& a, int n) {
  const double b = std::abs(r - lam);
  const double C = std::min(t, r + lam);
  const double D = std::max(t, r + lam);
  const double gapD = a.difference(D, b, D - b);
  if (!(gapD > 0.0)) return 0.0;
  const double gapC = C > b ? a.difference(C, b, C - b) : 0.0;
  const double m = gapC / gapD;
  if (m < 0.5) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta = (2.0 * i + 1.0) * std::numbers::pi / (2.0 * n);
      const double y = gapC * 0.5 * (1.0 + std::cos(theta));
      sum += 1.0 / std::sqrt(gapD - y);
    }
    return sum * std::numbers::pi / n;
  }
  double m1 = a.difference(D, C, std::abs(t - r - lam)) / gapD;
  m1 = std::max(m1, std::numeric_limits<double>::min());
  return 2.0 * ellint_K_complement(m1) / std::sqrt(gapD);
}

std::vector<double> piece_points(double lo, double hi, std::span<const double> cuts,
                                 std::optional<double> special) {
  std::vector<double> pts{lo};
  for (double c : cuts)
    if (c > lo && c < hi) pts.push_back(c);
  if (special && *special > lo && *special < hi) pts.push_back(*special);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double W_evaluator(double t, double r, const RadialProfile& f, const MonotoneWeight& a,
                   const QuadratureConfig& q) {
  check_nonneg(t, r, "W_evaluator");
  q.validate();
  if (t == 0.0 || f.is_zero()) return 0.0;
  const double lo = r >= t ? r - t : 0.0;
  const double hi = r + t;
  // The s-integral has a logarithmic singularity where r + lambda = t.
  const std::optional<double> star = t >= r ? std::optional<double>(t - r) : std::nullopt;
  const auto pts = piece_points(lo, hi, f.breakpoints(), star);
  const int n_graded = std::max(8, q.nodes_inner / 4);
  auto g = [&](double lam) { return f(lam) * w_inner(t, r, lam, a, q.nodes_inner); };

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double pa = pts[i];
    const double pb = pts[i + 1];
    const bool sing_a = star && pa == *star;
    const bool sing_b = star && pb == *star;
    if (sing_a || sing_b) {
      sum += integrate_graded(g, pa, pb, sing_a, n_graded, 0.2, 48);
    } else {
      sum += integrate_gl(g, pa, pb, q.nodes_outer);
    }
  }
  if (!std::isfinite(sum)) {
    std::ostringstream os;
    os << "W_evaluator: non-finite result at t=" << t << ", r=" << r;
    throw NumericError(os.str());
  }
  return sum;
}

double W_majorant(double t, double r, const RadialProfile& f, const MonotoneWeight& a,
                  const QuadratureConfig& q) {
  check_nonneg(t, r, "W_majorant");
  q.validate();
  if (t == 0.0 || f.is_zero()) return 0.0;
  const double lo = r >= t ? r - t : 0.0;
  const double hi = r + t;
  const std::optional<double> star = t >= r ? std::optional<double>(t - r) : std::nullopt;
  const auto pts = piece_points(lo, hi, f.breakpoints(), star);
  auto g = [&](double lam) {
    const double d = std::abs(a.difference(r + lam, t, r + lam - t));
    return std::abs(f(lam)) / std::sqrt(d);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double pa = pts[i];
    const double pb = pts[i + 1];
    const bool sing_a = star && pa == *star;
    const bool sing_b = star && pb == *star;
    if (!sing_a && !sing_b) {
      sum += integrate_gl(g, pa, pb, q.nodes_outer);
      continue;
    }
    // lambda = star +- w^2 turns the inverse square root into a smooth integrand.
    const double len = std::sqrt(pb - pa);
    if (sing_a)
      sum += integrate_gl([&](double w) { return 2.0 * w * g(pa + w * w); }, 0.0, len,
                          q.nodes_outer);
    else
      sum += integrate_gl([&](double w) { return 2.0 * w * g(pb - w * w); }, 0.0, len,
                          q.nodes_outer);
  }
  return std::numbers::pi * sum;
}

double beta_identity_check(double b, double c, const MonotoneWeight& a,
                           const QuadratureConfig& q) {
  if (!(b >= 0.0) || !(c > b) || !std::isfinite(c))
    throw DomainError("beta_identity_check requires 0 <= b < c");
  q.validate();
  auto g = [&](double s, double from_b, double to_c) {
    const double up = a.difference(c, s, to_c);
    const double down = a.difference(s, b, from_b);
    if (!(up > 0.0) || !(down > 0.0)) return 0.0;
    return a.derivative(s) / std::sqrt(up * down);
  };
  const auto res = tanh_sinh(g, b, c, std::min(q.abs_tol, 1e-13), 12);
  if (!std::isfinite(res.value)) throw NumericError("beta_identity_check: non-finite result");
  return res.value;
}

double r_operator(const TimeProfile& v, double t, const MonotoneWeight& a,
                  const QuadratureConfig& q) {
  if (!(t >= 0.0)) throw DomainError("r_operator requires t >= 0");
  q.validate();
  if (t == 0.0) return 0.0;
  auto g = [&](double s, double from_0, double to_t) {
    const double gap = a.difference(t, s, to_t);
    if (!(gap > 0.0)) return 0.0;
    (void)from_0;
    return 0.5 * a.derivative(s) * v(s) / std::sqrt(gap);
  };
  const auto res = tanh_sinh(g, 0.0, t, std::min(q.abs_tol, 1e-13), 12);
  if (!std::isfinite(res.value)) throw NumericError("r_operator: non-finite result");
  return res.value;
}

RBoundCheck dt_r_bound_check(const TimeProfile& v, const TimeProfile& dv, double t,
                             const MonotoneWeight& a, const QuadratureConfig& q) {
  constexpr double h = 1e-3;
  if (!(t > 2.0 * h)) throw DomainError("dt_r_bound_check: t too small for the difference stencil");
  auto R = [&](double s) { return r_operator(v, s, a, q); };
  auto stencil = [&](double k) {
    return (-R(t + 2 * k) + 8.0 * R(t + k) - 8.0 * R(t - k) + R(t - 2 * k)) / (12.0 * k);
  };
  RBoundCheck out;
  const double d1 = stencil(h);
  const double d2 = t > 4.0 * h ? stencil(2.0 * h) : d1;
  out.lhs = std::abs(d1);
  out.diff_error = std::abs(d1 - d2) + 1e-9 * std::abs(d1);
  const double gap0 = a.difference(t, 0.0, t);
  out.rhs = 0.5 * a.derivative(t) / std::sqrt(gap0) * std::abs(v(t)) +
            r_operator([&](double s) { return std::abs(dv(s)); }, t, a, q);
  return out;
}

// ---- Duhamel ----------------------------------------------------------------------

std::vector<double> simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (n % 2 == 1) {
    const std::size_t s = simpson_end;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double duhamel(const SpaceTimeField& F, double t, double r, const QuadratureConfig& q) {
  check_nonneg(t, r, "duhamel");
  F.validate();
  q.validate();
  const auto& tg = F.t_grid;
  const double tol = 1e-9 * std::max(1.0, t);
  if (std::abs(tg.front()) > tol || F.r_grid.front() != 0.0 || F.r_grid.back() < r + t - tol)
    throw DomainError("duhamel: source grid does not cover the backward light cone");
  auto it = std::lower_bound(tg.begin(), tg.end(), t - tol);
  if (it == tg.end() || std::abs(*it - t) > tol)
    throw DomainError("duhamel: t must be a node of the source t_grid");
  const auto i = static_cast<std::size_t>(it - tg.begin());
  if (i == 0) return 0.0;

  std::vector<double> w;
  const double h = tg[1] - tg[0];
  bool uniform = true;
  for (std::size_t k = 1; k <= i; ++k)
    if (std::abs(tg[k] - tg[k - 1] - h) > 1e-9 * h) uniform = false;
  if (uniform) {
    w = simpson_weights(i, h);
  } else {
    w.assign(i + 1, 0.0);
    for (std::size_t k = 1; k <= i; ++k) {
      w[k - 1] += 0.5 * (tg[k] - tg[k - 1]);
      w[k] += 0.5 * (tg[k] - tg[k - 1]);
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < i; ++k) {  // lag zero contributes nothing
    const RadialProfile slice = F.slice(k);
    sum += w[k] * sine_propagator(slice, t - tg[k], r, q);
  }
  return sum;
}

// ---- lower bounds -------------------------------------------------------------------

double lower_bound_C0(double tau0) {
  if (!(tau0 > 0.0)) throw DomainError("tau0 must be positive");
  const double c = 0.5 * std::sqrt(std::tanh(tau0 / 8.0) * std::tanh(tau0 / 2.0));
  return std::clamp(c, std::numeric_limits<double>::min(), 1.0);
}

namespace {

double integrate_profile(const RadialProfile& phi, double lo, double hi, int n,
                         const std::function<double(double)>& weight) {
  if (!(hi > lo)) return 0.0;
  return integrate_gl_pieces([&](double lam) { return phi(lam) * weight(lam); }, lo, hi,
                             phi.breakpoints(), n);
}

}  // namespace

LowerBoundI lower_bound_I(const RadialProfile& phi, double t, double r, double tau0, double C0,
                          const QuadratureConfig& q) {
  check_nonneg(t, r, "lower_bound_I");
  if (!(tau0 > 0.0)) throw DomainError("lower_bound_I: tau0 must be positive");
  if (!(C0 > 0.0 && C0 <= 1.0)) throw DomainError("lower_bound_I: C0 must lie in (0, 1]");
  if (!(r > 0.5 * tau0)) throw DomainError("lower_bound_I: requires r > tau0/2");
  q.validate();
  auto sqrt_sinh = [](double lam) { return std::sqrt(std::sinh(lam)); };
  const double pre = C0 / std::sqrt(std::sinh(r));
  LowerBoundI out;
  out.bound_large = pre * integrate_profile(phi, std::max(t, r), t + r, q.nodes_outer, sqrt_sinh);
  if (std::abs(t - r) > tau0 / 8.0)
    out.bound_small = pre * integrate_profile(phi, std::abs(t - r), t + r, q.nodes_outer, sqrt_sinh);
  return out;
}

double lowerbd_integral(const RadialProfile& phi, double t, double r, const QuadratureConfig& q) {
  check_nonneg(t, r, "lowerbd_integral");
  q.validate();
  return integrate_profile(phi, std::abs(r - t), r + t, q.nodes_outer, [r](double lam) {
    return std::sinh(lam) / std::sqrt(2.0 * std::cosh(r + lam));
  });
}

}  // namespace hwave
