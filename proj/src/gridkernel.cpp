#include "hwave/gridkernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hwave/errors.hpp"
#include "hwave/meanprop.hpp"
#include "hwave/parallel.hpp"

namespace hwave {

void SolverGrid::validate() const {
  std::ostringstream os;
  if (!(dt > 0.0) || !(dr > 0.0)) os << "grid: dt and dr must be positive";
  else if (!(t_max >= dt)) os << "grid: t_max must be at least dt";
  else if (!(r_max > 0.0)) os << "grid: r_max must be positive";
  else if ((t_max / dt) > 4000 || (r_max + t_max) / dr > 20000) os << "grid: too many nodes";
  if (!os.str().empty()) throw ConfigError(os.str());
}

namespace {

std::size_t index_floor(double x, double h) {
  return static_cast<std::size_t>(std::floor(x / h + 1e-9));
}

}  // namespace

GridPropagator::GridPropagator(const SolverGrid& grid, const QuadratureConfig& q) : grid_(grid) {
  grid_.validate();
  q.validate();
  t_ = uniform_grid(0.0, grid_.t_max, grid_.dt);
  // the last time node is t_max rounded to the grid
  R_ = grid_.r_max + t_.back();
  const std::size_t jmax = index_floor(R_ + 2.0 * grid_.dt, grid_.dr) + 1;
  r_.resize(jmax + 1);
  for (std::size_t j = 0; j <= jmax; ++j) r_[j] = static_cast<double>(j) * grid_.dr;
  valid_.resize(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) valid_[i] = index_floor(R_ - t_[i], grid_.dr) + 1;
  report_nr_ = index_floor(grid_.r_max, grid_.dr) + 1;

  const std::size_t lags = t_.size() + 2;  // two extra for the centred t-derivative
  rows_.resize(lags);
  weights_.resize(lags);
  for (std::size_t d = 1; d < lags; ++d) build_lag(d, q);
}

void GridPropagator::build_lag(std::size_t lag, const QuadratureConfig& q) {
  const double tl = static_cast<double>(lag) * grid_.dt;
  const double h = grid_.dr;
  const double reach = R_ - (static_cast<double>(lag) - 2.0) * grid_.dt;
  const std::size_t rows = std::min(r_.size(), index_floor(reach, h) + 1);
  const std::size_t top = r_.size() - 1;

  std::vector<std::vector<double>> dense(rows);
  std::vector<std::uint32_t> first(rows);
  parallel_for(0, rows, [&](std::size_t j) {
    std::vector<Node> nodes;
    propagator_nodes(tl, r_[j], q, {}, nodes);
    // stencil indices never exceed the node at the far end of the cone
    const std::size_t cap = std::max<std::size_t>(3, std::min(top, index_floor(r_[j] + tl, h)));
    const std::size_t lo_idx = r_[j] > tl ? index_floor(r_[j] - tl, h) : 0;
    const std::size_t lo = std::min(lo_idx >= 2 ? lo_idx - 2 : 0, cap - 3);
    const std::size_t hi = cap;
    std::vector<double> w(hi - lo + 1, 0.0);
    for (const auto& nd : nodes) {
      const double x = nd.x / h;
      auto k = static_cast<long>(std::floor(x));
      long base = k - 1;
      if (base + 3 > static_cast<long>(cap)) base = static_cast<long>(cap) - 3;
      const double s = x - static_cast<double>(base);  // in [0, 3] for the 4 nodes base..base+3
      const double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
      const double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
      const double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
      const double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
      const double ls[4] = {l0, l1, l2, l3};
      for (int m = 0; m < 4; ++m) {
        long idx = base + m;
        if (idx < 0) idx = -idx;  // even reflection at r = 0
        const auto u = static_cast<std::size_t>(idx);
        if (u < lo || u > hi) throw NumericError("grid propagator: stencil outside its band");
        w[u - lo] += nd.w * ls[m];
      }
    }
    first[j] = static_cast<std::uint32_t>(lo);
    dense[j] = std::move(w);
  }, 1);

  auto& rws = rows_[lag];
  auto& ws = weights_[lag];
  rws.resize(rows);
  std::size_t total = 0;
  for (const auto& v : dense) total += v.size();
  ws.reserve(total);
  for (std::size_t j = 0; j < rows; ++j) {
    rws[j] = {first[j], static_cast<std::uint32_t>(dense[j].size()), ws.size()};
    ws.insert(ws.end(), dense[j].begin(), dense[j].end());
  }
}

void GridPropagator::propagate(std::size_t lag, std::span<const double> g, std::span<double> out,
                               std::size_t rows) const {
  if (lag == 0) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(rows), 0.0);
    return;
  }
  if (lag >= rows_.size() || rows > rows_[lag].size())
    throw DomainError("grid propagator: lag or row count beyond the precomputed cone");
  const auto& rws = rows_[lag];
  const double* w = weights_[lag].data();
  for (std::size_t j = 0; j < rows; ++j) {
    const Row& rw = rws[j];
    const double* gw = g.data() + rw.first;
    const double* ww = w + rw.offset;
    double s = 0.0;
    for (std::uint32_t m = 0; m < rw.count; ++m) s += ww[m] * gw[m];
    out[j] = s;
  }
}

SpaceTimeField GridPropagator::zero_field() const { return SpaceTimeField(t_, r_, 0.0); }

std::vector<double> GridPropagator::sample(const RadialProfile& f) const {
  std::vector<double> v(r_.size(), 0.0);
  const double end = f.domain_end();
  for (std::size_t j = 0; j < r_.size(); ++j)
    if (r_[j] <= end) v[j] = f(r_[j]);
  return v;
}

SpaceTimeField GridPropagator::duhamel(const SpaceTimeField& source) const {
  if (source.nt() != t_.size() || source.nr() != r_.size())
    throw DomainError("grid propagator: source field is not on the solver grid");
  SpaceTimeField out = zero_field();
  const std::size_t nt = t_.size();
  parallel_for(1, nt, [&](std::size_t i) {
    const auto w = simpson_weights(i, grid_.dt);
    const std::size_t rows = valid_[i];
    std::vector<double> tmp(rows);
    double* dst = out.row(i);
    for (std::size_t m = 0; m < i; ++m) {
      if (w[m] == 0.0) continue;
      propagate(i - m, std::span<const double>(source.row(m), r_.size()), tmp, rows);
      for (std::size_t j = 0; j < rows; ++j) dst[j] += w[m] * tmp[j];
    }
  }, 1);
  return out;
}

SpaceTimeField GridPropagator::linear_part(const RadialProfile& u0, const RadialProfile& u1) const {
  SpaceTimeField out = zero_field();
  const std::size_t nt = t_.size();
  if (!u1.is_zero()) {
    const auto g = sample(u1);
    parallel_for(1, nt, [&](std::size_t i) {
      propagate(i, g, std::span<double>(out.row(i), r_.size()), valid_[i]);
    }, 1);
  }
  if (!u0.is_zero()) {
    const auto g = sample(u0);
    for (std::size_t j = 0; j < valid_[0]; ++j) out.at(0, j) += g[j];
    const double inv = 1.0 / (12.0 * grid_.dt);
    parallel_for(1, nt, [&](std::size_t i) {
      const std::size_t rows = valid_[i];
      std::vector<double> acc(rows, 0.0), tmp(rows);
      // I is odd in t, so a negative lag contributes with the opposite sign
      const long lags[4] = {static_cast<long>(i) - 2, static_cast<long>(i) - 1,
                            static_cast<long>(i) + 1, static_cast<long>(i) + 2};
      const double coef[4] = {1.0, -8.0, 8.0, -1.0};
      for (int k = 0; k < 4; ++k) {
        const long l = lags[k];
        const double sign = l < 0 ? -1.0 : 1.0;
        propagate(static_cast<std::size_t>(std::abs(l)), g, tmp, rows);
        for (std::size_t j = 0; j < rows; ++j) acc[j] += sign * coef[k] * tmp[j];
      }
      double* dst = out.row(i);
      for (std::size_t j = 0; j < rows; ++j) dst[j] += acc[j] * inv;
    }, 1);
  }
  return out;
}

SpaceTimeField GridPropagator::restrict_to_report(const SpaceTimeField& f) const {
  std::vector<double> rr(r_.begin(), r_.begin() + static_cast<std::ptrdiff_t>(report_nr_));
  SpaceTimeField out(f.t_grid, rr, 0.0);
  for (std::size_t i = 0; i < f.nt(); ++i)
    std::copy(f.row(i), f.row(i) + report_nr_, out.row(i));
  return out;
}

std::size_t GridPropagator::stored_weights() const {
  std::size_t n = 0;
  for (const auto& w : weights_) n += w.size();
  return n;
}

}  // namespace hwave
