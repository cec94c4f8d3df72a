#include "hwave/hypgeo.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace hwave {

void EnvelopeParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) {
    std::ostringstream os;
    os << "envelope index k must be positive, got " << k;
    throw DomainError(os.str());
  }
}

void WeightParams::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("weight exponent h must be positive");
  if (!(N_h > 0.0) || !std::isfinite(N_h)) throw DomainError("N_h must be positive");
}

void QuadratureConfig::validate() const {
  if (nodes_inner < 4 || nodes_outer < 4)
    throw ConfigError("quadrature node counts must be at least 4");
  if (!(abs_tol > 0.0 && abs_tol < 1.0) || !(rel_tol > 0.0 && rel_tol < 1.0))
    throw ConfigError("quadrature tolerances must lie in (0, 1)");
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_sinh(double x) {
  if (!(x > 0.0)) throw DomainError("log_sinh requires x > 0");
  if (x < 1.0) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

double acosh1p(double d) {
  if (d < 0.0) d = 0.0;
  return std::log1p(d + std::sqrt(d * (2.0 + d)));
}

double theta_k(double r, const EnvelopeParams& params) {
  return std::exp(log_theta_k(r, params));
}

double log_theta_k(double r, const EnvelopeParams& params) {
  if (!(r >= 0.0)) throw DomainError("theta_k requires r >= 0");
  params.validate();
  return -(params.k + EnvelopeParams::rho) * log_cosh(r);
}

double K_factor(double s, double k) { return std::exp(log_K_factor(s, k)); }

double log_K_factor(double s, double k) {
  if (!(k > 0.0)) throw DomainError("K_factor requires k > 0");
  if (k < 0.5) return (0.5 - k) * log_cosh(s);
  if (k == 0.5) return 0.5 * std::log1p(s * s);
  return 0.0;
}

double phi_weight(double t, double r, const WeightParams& params) {
  return std::exp(log_phi_weight(t, r, params));
}

double log_phi_weight(double t, double r, const WeightParams& params) {
  if (!(r >= 0.0)) throw DomainError("phi_weight requires r >= 0");
  const double d = t - r;
  return 0.5 * r + 0.5 * params.h * std::log1p(d * d);
}

std::vector<Node> cg_nodes(int n, double lo, double hi) {
  if (n < 1) throw DomainError("cg_nodes requires n >= 1");
  if (!(lo < hi)) throw DomainError("cg_nodes requires lo < hi");
  std::vector<Node> out(static_cast<std::size_t>(n));
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double w = std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const double theta = (2.0 * i + 1.0) * std::numbers::pi / (2.0 * n);
    out[static_cast<std::size_t>(i)] = {mid + half * std::cos(theta), w};
  }
  return out;
}

namespace {

std::vector<Node> compute_gauss_legendre(int n) {
  std::vector<Node> nodes(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = {-x, w};
    nodes[static_cast<std::size_t>(n - 1 - i)] = {x, w};
  }
  if (n == 1) nodes[0] = {0.0, 2.0};
  return nodes;
}

}  // namespace

const std::vector<Node>& gauss_legendre_unit(int n) {
  if (n < 1) throw DomainError("gauss_legendre requires n >= 1");
  static std::mutex mu;
  static std::map<int, std::vector<Node>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<Node> gauss_legendre(int n, double lo, double hi) {
  const auto& unit = gauss_legendre_unit(n);
  std::vector<Node> out;
  out.reserve(unit.size());
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (const auto& nd : unit) out.push_back({mid + half * nd.x, half * nd.w});
  return out;
}

double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    a = an;
    b = bn;
    if (std::abs(a - b) <= 1e-16 * a) break;
  }
  return 0.5 * (a + b);
}

double ellint_K_complement(double m1) {
  if (!(m1 > 0.0)) throw DomainError("ellint_K: complementary parameter must be positive");
  return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(m1)));
}

}  // namespace hwave
