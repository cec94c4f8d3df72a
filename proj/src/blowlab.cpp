#include "hwave/blowlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hwave/meanprop.hpp"

namespace hwave {

void BlowupParams::validate() const {
  std::ostringstream os;
  if (!(p > 1.0 && p < 3.0)) os << "blowup: p must lie in (1, 3) (got " << p << ")";
  else if (!(q > 1.0) || !std::isfinite(q)) os << "blowup: q must exceed 1";
  else if (!(tau0 > 0.0) || !std::isfinite(tau0)) os << "blowup: tau0 must be positive";
  else if (!(epsilon > 0.0) || !std::isfinite(epsilon)) os << "blowup: epsilon must be positive";
  else if (!(delta0 > 0.0 && delta0 < 1.0)) os << "blowup: delta0 must lie in (0, 1)";
  else if (!(C0 > 0.0 && C0 <= 1.0)) os << "blowup: C0 must lie in (0, 1]";
  else if (!(c0 > 0.0) || !std::isfinite(c0)) os << "blowup: c0 must be positive";
  else if (!(c0 * epsilon < delta0 * std::sqrt(std::sinh(tau0 / 2.0))))
    os << "blowup: c0 epsilon must stay below delta0 sinh(tau0/2)^{1/2}";
  if (!os.str().empty()) throw ConfigError(os.str());
}

RadialProfile blowup_data(double tau0) {
  if (!(tau0 > 0.0)) throw DomainError("blowup data: tau0 must be positive");
  return RadialProfile::plateau(tau0, 3.0 * tau0, 0.5 * tau0);
}

const char* to_string(Region region) {
  switch (region) {
    case Region::S: return "S";
    case Region::Sigma: return "Sigma";
    case Region::R: return "R";
    case Region::T: return "T";
    case Region::Y: return "Y";
  }
  return "?";
}

namespace {

template <class T>
T need(const std::optional<T>& v, const char* what, Region region) {
  if (!v) {
    std::ostringstream os;
    os << "region " << to_string(region) << " needs " << what;
    throw DomainError(os.str());
  }
  return *v;
}

bool in_R(double lambda, double tau, double tau0, double r, double t) {
  return tau >= 0.0 && tau - lambda <= t - r && tau + lambda >= t && tau + lambda <= t + r &&
         std::abs(t - r - tau) >= tau0 / 8.0;
}

bool in_Sigma(double lambda, double tau, double tau0, int l) {
  return tau - lambda > 6.0 * l * tau0 && lambda > tau0 / 2.0;
}

}  // namespace

bool region_membership(double lambda, double tau, double tau0, Region which,
                       const RegionArgs& args) {
  if (!(tau0 > 0.0)) throw DomainError("region: tau0 must be positive");
  switch (which) {
    case Region::S:
      return tau - lambda > tau0 && tau - lambda < 2.0 * tau0 && tau + lambda > 3.0 * tau0;
    case Region::Sigma: {
      const int l = need(args.l, "l", which);
      if (l < 1) throw DomainError("region Sigma needs l >= 1");
      return in_Sigma(lambda, tau, tau0, l);
    }
    case Region::R:
      return in_R(lambda, tau, tau0, need(args.r, "r", which), need(args.t, "t", which));
    case Region::T: {
      const int l = need(args.l, "l", which);
      const double r = need(args.r, "r", which), t = need(args.t, "t", which);
      if (l < 1) throw DomainError("region T needs l >= 1");
      const double gap = tau - lambda;
      return in_R(lambda, tau, tau0, r, t) && in_Sigma(lambda, tau, tau0, l) &&
             gap >= 0.5 * (6.0 * l * tau0 + t - r) && gap <= t - r;
    }
    case Region::Y: {
      const double T = need(args.T, "T", which);
      return lambda > tau0 / 2.0 && tau > T && tau + lambda <= T + tau0;
    }
  }
  return false;
}

// ---- first iterate -----------------------------------------------------------

double FirstIterateBound::operator()(double, double r) const {
  if (!(r > 0.0)) throw DomainError("first iterate bound needs r > 0");
  return c0 * epsilon * std::exp(-0.5 * log_sinh(r));
}

FirstIterateBound first_iterate_bound(const RadialProfile& u1, double tau0, double C0,
                                      double epsilon, const SSample& sample) {
  if (!(tau0 > 0.0) || !(C0 > 0.0) || !(epsilon > 0.0))
    throw DomainError("first iterate bound: tau0, C0 and epsilon must be positive");
  if (sample.n_gap < 1 || sample.n_r < 1) throw ConfigError("first iterate bound: empty sample");
  FirstIterateBound out;
  out.epsilon = epsilon;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= sample.n_gap; ++k) {
    const double d = tau0 * (1.0 + static_cast<double>(k) / (sample.n_gap + 1));
    const double r_lo = 0.5 * (3.0 * tau0 - d);
    if (!(sample.r_hi > r_lo)) continue;
    for (int m = 1; m <= sample.n_r; ++m) {
      // clustered towards the corner t + r = 3 tau0
      const double s = static_cast<double>(m) / sample.n_r;
      const double r = r_lo + (sample.r_hi - r_lo) * s * s;
      const LowerBoundI lb = lower_bound_I(u1, r + d, r, tau0, C0);
      const double v = std::max(lb.bound_large, lb.bound_small.value_or(0.0));
      best = std::min(best, std::exp(0.5 * log_sinh(r)) * v);
      ++out.samples;
    }
  }
  if (out.samples == 0) throw DomainError("first iterate bound: no sample points in S");
  out.c0 = best;
  return out;
}

BlowupParams make_blowup_params(double p, double q, double tau0, double epsilon, double delta0,
                                const RadialProfile& u1, const SSample& sample) {
  BlowupParams bp;
  bp.p = p;
  bp.q = q;
  bp.tau0 = tau0;
  bp.epsilon = epsilon;
  bp.delta0 = delta0;
  bp.C0 = lower_bound_C0(tau0);
  const FirstIterateBound fib = first_iterate_bound(u1, tau0, bp.C0, epsilon, sample);
  if (!(fib.c0 > 0.0)) throw DomainError("u1 gives no positive lower bound on S");
  bp.c0 = std::min(fib.c0, 0.99 * delta0 * std::sqrt(std::sinh(tau0 / 2.0)) / epsilon);
  bp.validate();
  return bp;
}

// ---- boost ---------------------------------------------------------------------

int boost_l0(double p) {
  if (!(p > 1.0 && p < 3.0)) throw DomainError("boost: p must lie in (1, 3)");
  return static_cast<int>(std::floor(2.0 / (3.0 - p))) + 1;
}

BoostSequence boost_sequence(const BlowupParams& params) {
  params.validate();
  BoostSequence out;
  out.l0 = boost_l0(params.p);
  out.A0 = out.l0 * (3.0 - params.p) - 2.0;
  const double tau0 = params.tau0, C0 = params.C0, d0 = params.delta0;
  double log_c = std::log(params.c0) + std::min(0.0, std::log(tau0 * C0 * d0 / 4.0));
  {
    std::ostringstream os;
    os << "c_1 = min(c0, tau0 C0 delta0 c0 / 4) = c0 * " << std::min(1.0, tau0 * C0 * d0 / 4.0);
    out.factor_log.push_back(os.str());
  }
  const double step = std::log(C0 * d0 / 32.0);
  for (int l = 1; l <= out.l0; ++l) {
    BoostEntry e;
    e.l = l;
    e.a = 2.0 * l - 2.0;
    e.b = (params.p - 1.0) * l;
    e.log_c = log_c;
    e.c = std::exp(log_c);
    out.entries.push_back(e);
    if (l < out.l0) {
      std::ostringstream os;
      os << "c_" << l + 1 << " = c_" << l << " * C0 delta0 / 32 = c_" << l << " * "
         << std::exp(step);
      out.factor_log.push_back(os.str());
      log_c += step;
    }
  }
  return out;
}

namespace {

double log_boost_bound(const BoostEntry& e, double epsilon, double t, double r) {
  const double base = t + r - e.log_c - std::log(epsilon);
  if (!(base > 0.0)) throw NumericError("boost bound: t + r + ln(1/(c eps)) is not positive");
  const double gap = t - r;
  double log_gap = 0.0;
  if (e.a != 0.0) {
    if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
    log_gap = e.a * std::log(gap);
  }
  return e.log_c + std::log(epsilon) + std::log(r) - 0.5 * log_sinh(r) - e.b * std::log(base) +
         log_gap;
}

}  // namespace

double boost_bound(const BoostEntry& entry, double epsilon, double t, double r) {
  if (!(r > 0.0)) return 0.0;
  return std::exp(log_boost_bound(entry, epsilon, t, r));
}

double area_lower_bound(int l, double r, double t, double tau0) {
  if (l < 1 || !(tau0 > 0.0) || r < 0.0) throw DomainError("area bound: needs l >= 1, tau0 > 0, r >= 0");
  const double x = 0.5 * (t - r - 6.0 * l * tau0 - 3.0 * tau0);
  if (x <= 0.0) return 0.0;
  return 0.5 * x * x * r;
}

// ---- John iteration -------------------------------------------------------------

JohnSequence john_recursion(double A0, double D0, double q, double C0, double delta0, int m_max) {
  if (!(q > 1.0) || !(D0 > 0.0) || !(C0 > 0.0 && C0 <= 1.0) || !(delta0 > 0.0 && delta0 < 1.0) ||
      m_max < 0)
    throw DomainError("john recursion: needs q > 1, D0 > 0, C0 in (0, 1], delta0 in (0, 1)");
  JohnSequence out;
  out.q = q;
  const auto ab = john_AB<double>(A0, q, m_max);
  double logD = std::log(D0);
  const double lcd = std::log(C0 * delta0);
  for (int m = 0; m <= m_max; ++m) {
    out.entries.push_back({m, ab[m].first, ab[m].second, logD});
    if (m < m_max) logD = lcd + q * logD - 2.0 * std::log(ab[m + 1].second);
  }

  // 2 ln(j+1) <= 2j, so the tail from J on is below
  // sum_{j>=J} (alpha j + kappa) x^{j+1}, x = 1/q.
  const double lq = std::log(q), x = 1.0 / q;
  const double kappa = -std::log(C0 * delta0 / 4.0);
  const double alpha = 2.0 + 2.0 * lq;
  auto tail = [&](int J) {
    const double xj = std::pow(x, J + 1);
    const double g = 1.0 - x;
    return xj * (kappa / g + alpha * (J / g + x / (g * g)));
  };
  double sum = 0.0;
  int J = 0;
  const int J_max = 2000000;
  while (J < J_max) {
    sum += (2.0 * std::log1p(J) + 2.0 * J * lq + kappa) * std::pow(x, J + 1);
    ++J;
    if (tail(J) <= 1e-14 * std::max(1.0, sum)) break;
  }
  out.series_terms = J;
  out.E = std::log(D0) - sum;
  out.E_tail_bound = tail(J);
  return out;
}

namespace {

BlowupTime time_from_logs(double A0, double E, double q, double tau0, double log_c,
                          double log_eps, double log_delta0, double log_tilde_c) {
  if (!(A0 > 0.0) || !(q > 1.0) || !(tau0 > 0.0))
    throw DomainError("blow-up time: needs A0 > 0, q > 1, tau0 > 0");
  auto ex = [](double lg) {
    return lg > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(lg);
  };
  BlowupTime bt;
  bt.T_series = ex((-E - 2.0 / (q - 1.0) * std::log(tau0 / 2.0)) / A0);
  bt.T_form = ex(-(log_c + log_eps) / A0);
  bt.T_power = ex(-(log_delta0 + log_tilde_c + log_eps) / A0);
  bt.T = std::max({bt.T_series, bt.T_form, bt.T_power});
  return bt;
}

}  // namespace

BlowupTime blowup_time_bound(double A0, double E, double q, double tau0, double c, double epsilon,
                             double delta0, double tilde_c) {
  if (!(c > 0.0) || !(epsilon > 0.0) || !(delta0 > 0.0) || !(tilde_c > 0.0))
    throw DomainError("blow-up time: c, epsilon, delta0 and tilde_c must be positive");
  return time_from_logs(A0, E, q, tau0, std::log(c), std::log(epsilon), std::log(delta0),
                        std::log(tilde_c));
}

// ---- certificates ----------------------------------------------------------------

namespace {

double log_tilde_c_on_Y(const BoostSequence& boost, const BlowupParams& params, double T) {
  const BoostEntry& e = boost.entries.back();
  const double tau0 = params.tau0;
  double best = std::numeric_limits<double>::infinity();
  const int n_lam = 16, n_tau = 8;
  for (int i = 1; i <= n_lam; ++i) {
    const double lam = tau0 * (0.5 + 0.5 * i / (n_lam + 1.0));
    const double span = tau0 - lam;  // tau in (T, T + span]
    for (int k = 1; k <= n_tau; ++k) {
      const double tau = T + span * k / n_tau;
      const double v = log_boost_bound(e, params.epsilon, tau, lam) - std::log(params.epsilon) -
                       boost.A0 * std::log(tau);
      best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace

double tilde_c_on_Y(const BoostSequence& boost, const BlowupParams& params, double T) {
  if (boost.entries.empty()) throw DomainError("tilde_c: empty boost sequence");
  if (!(T >= (6.0 * boost.l0 + 1.0) * params.tau0))
    throw DomainError("tilde_c: T must be at least (6 l0 + 1) tau0 so that Y lies in Sigma_l0");
  return std::exp(log_tilde_c_on_Y(boost, params, T));
}

BlowupCertificate build_certificate(const BlowupParams& params, int m_max) {
  BlowupCertificate cert;
  cert.params = params;
  cert.boost = boost_sequence(params);
  if (!(cert.boost.A0 > 0.0)) throw NumericError("blow-up certificate: A0 is not positive");
  const double T_geom = (6.0 * cert.boost.l0 + 1.0) * params.tau0;
  const double log_c = cert.boost.entries.back().log_c;
  const double log_eps = std::log(params.epsilon);

  struct Eval {
    double log_tc = 0.0;
    JohnSequence john;
    BlowupTime bt;
  };
  auto eval = [&](double T) {
    Eval ev;
    ev.log_tc = log_tilde_c_on_Y(cert.boost, params, T);
    if (!(ev.log_tc > -700.0)) throw NumericError("blow-up certificate: tilde_c underflows");
    ev.john = john_recursion(cert.boost.A0, std::exp(ev.log_tc + log_eps), params.q, params.C0,
                             params.delta0, m_max);
    ev.bt = time_from_logs(cert.boost.A0, ev.john.E - ev.john.E_tail_bound, params.q, params.tau0,
                           log_c, log_eps, std::log(params.delta0), ev.log_tc);
    if (!std::isfinite(ev.bt.T)) throw NumericError("blow-up certificate: time bound overflows");
    return ev;
  };
  auto finish = [&](double T, Eval ev) {
    cert.john = std::move(ev.john);
    cert.tilde_c = std::exp(ev.log_tc);
    cert.time = ev.bt;
    cert.time.T = T;
    return cert;
  };

  // tilde_c(T) grows with T, so the thresholds fall and T - threshold(T) is
  // increasing: find a consistent T, then bisect (in ln T) towards the
  // smallest one.
  Eval lo_ev = eval(T_geom);
  if (T_geom >= lo_ev.bt.T) return finish(T_geom, std::move(lo_ev));
  double lo = T_geom, hi = lo_ev.bt.T;
  Eval hi_ev = eval(hi);
  for (int it = 0; hi < hi_ev.bt.T; ++it) {
    if (it > 100) throw NumericError("blow-up certificate: no consistent time bound found");
    lo = hi;
    hi = hi_ev.bt.T * 2.0;
    hi_ev = eval(hi);
  }
  for (int it = 0; it < 200 && hi > lo * (1.0 + 1e-12); ++it) {
    const double mid = std::sqrt(lo * hi);
    Eval ev = eval(mid);
    if (mid >= ev.bt.T) {
      hi = mid;
      hi_ev = std::move(ev);
    } else {
      lo = mid;
    }
  }
  return finish(hi, std::move(hi_ev));
}

CertificateReport certificate_verify(const BlowupCertificate& cert, const SpaceTimeField& u) {
  u.validate();
  const BlowupParams& bp = cert.params;
  if (cert.boost.entries.empty()) throw DomainError("certificate: empty boost sequence");
  const BoostEntry& top = cert.boost.entries.back();
  const int l0 = cert.boost.l0;
  CertificateReport rep;
  RegionArgs sig;
  sig.l = l0;
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const double t = u.t_grid[i];
    for (std::size_t j = 0; j < u.nr(); ++j) {
      const double r = u.r_grid[j];
      if (!(r > 0.0)) continue;
      VerificationPoint pt{t, r, 0.0, u.at(i, j), Region::S};
      if (region_membership(r, t, bp.tau0, Region::S)) {
        pt.bound = bp.c0 * bp.epsilon * std::exp(-0.5 * log_sinh(r));
        ++rep.checked_S;
        rep.min_margin_S = std::min(rep.min_margin_S, pt.simulated - pt.bound);
      } else if (region_membership(r, t, bp.tau0, Region::Sigma, sig)) {
        pt.region = Region::Sigma;
        pt.bound = boost_bound(top, bp.epsilon, t, r);
        ++rep.checked_Sigma;
        rep.min_margin_Sigma = std::min(rep.min_margin_Sigma, pt.simulated - pt.bound);
      } else {
        continue;
      }
      if (!(pt.simulated >= pt.bound)) rep.violations.push_back(pt);
      rep.points.push_back(pt);
    }
  }
  std::ostringstream os;
  if (rep.checked_S == 0) os << "no grid points in S; ";
  if (rep.checked_Sigma == 0)
    os << "no grid points in Sigma_" << l0 << " (needs t - r > " << 6.0 * l0 * bp.tau0
       << " and r > " << bp.tau0 / 2.0 << ")";
  rep.coverage_message = os.str();
  rep.coverage_warning = !rep.coverage_message.empty();
  return rep;
}

Forcing dependence_truncated_forcing(const NonlinearitySpec& spec, double offset, double cap) {
  spec.validate();
  if (!(cap > 0.0) || !std::isfinite(offset)) throw DomainError("truncated forcing: cap must be positive");
  return [spec, offset, cap](double t, std::span<const double> r, std::span<const double> u,
                             std::span<double> out) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double v = r[j] >= t - offset ? u[j] : std::clamp(u[j], -cap, cap);
      out[j] = F_eval(v, spec);
    }
  };
}

// ---- escape ------------------------------------------------------------------------

double default_escape_threshold(const RadialProfile& u0, const RadialProfile& u1, double epsilon,
                                const FDConfig& cfg) {
  double s0 = 0.0, s1 = 0.0;
  const auto r = uniform_grid(0.0, cfg.r_max, cfg.dr);
  for (double x : r) {
    s0 = std::max(s0, std::abs(epsilon * u0(x)));
    s1 = std::max(s1, std::abs(epsilon * u1(x)));
  }
  return 10.0 * (s0 + s1);
}

EscapeReport escape_detector(const RadialProfile& u0, const RadialProfile& u1,
                             const NonlinearitySpec& spec, const FDConfig& cfg, double epsilon,
                             double threshold, int record_every) {
  if (!(threshold > 0.0)) throw DomainError("escape detector: threshold must be positive");
  if (record_every < 1) throw DomainError("escape detector: record_every must be positive");
  cfg.validate(0.0);
  EscapeReport rep;
  rep.threshold = threshold;
  LeapfrogStepper st(cfg, u0, u1, nonlinear_forcing(spec), epsilon);
  auto sup = [&] {
    double s = 0.0;
    for (double v : st.current()) s = std::max(s, std::abs(v));
    return s;
  };
  rep.sup_history.emplace_back(st.t(), sup());
  const auto n = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      st.step();
    } catch (const InstabilityError& e) {
      rep.t_escape = e.t();
      rep.instability = true;
      return rep;
    }
    const double s = sup();
    if (k % static_cast<std::size_t>(record_every) == 0 || k == n)
      rep.sup_history.emplace_back(st.t(), s);
    if (s > threshold) {
      if (rep.sup_history.back().first != st.t()) rep.sup_history.emplace_back(st.t(), s);
      rep.t_escape = st.t();
      return rep;
    }
  }
  return rep;
}

}  // namespace hwave
