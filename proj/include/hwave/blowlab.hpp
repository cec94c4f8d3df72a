#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hwave/errors.hpp"
#include "hwave/fdoracle.hpp"
#include "hwave/field.hpp"
#include "hwave/hypgeo.hpp"
#include "hwave/nonlin.hpp"
#include "hwave/profile.hpp"

namespace hwave {

struct BlowupParams {
  double p = 2.0;
  double q = 2.0;
  double tau0 = 1.0;
  double epsilon = 0.5;
  double delta0 = 0.1;
  double C0 = 0.0;
  double c0 = 0.0;

  /// 1 < p < 3, q > 1, tau0 > 0, epsilon > 0, 0 < delta0 < 1, 0 < C0 <= 1,
  /// c0 > 0 and c0 epsilon < delta0 sinh(tau0 / 2)^{1/2}.
  void validate() const;
};

/// Default blow-up data: u1 = 1 on [tau0, 3 tau0] with quintic ramps of width
/// tau0 / 2 on either side, u0 = 0.
RadialProfile blowup_data(double tau0);

// ---- regions in the (lambda, tau) plane ----------------------------------------

enum class Region { S, Sigma, R, T, Y };

const char* to_string(Region region);

struct RegionArgs {
  std::optional<int> l;     // Sigma, T
  std::optional<double> r;  // R, T
  std::optional<double> t;  // R, T
  std::optional<double> T;  // Y
};

/// Evaluates the defining inequalities of the region; throws DomainError when
/// a parameter the region needs is missing.
bool region_membership(double lambda, double tau, double tau0, Region which,
                       const RegionArgs& args = {});

// ---- first iterate --------------------------------------------------------------

struct FirstIterateBound {
  double c0 = 0.0;
  std::size_t samples = 0;
  double epsilon = 0.0;
  /// c0 epsilon (sinh r)^{-1/2}
  double operator()(double t, double r) const;
};

struct SSample {
  int n_gap = 12;        // interior points of tau0 < t - r < 2 tau0
  int n_r = 40;          // radii per gap value
  double r_hi = 12.0;    // sample r up to this
};

/// c0 = inf over a sample of S of (sinh r)^{1/2} times the lower bound of
/// I(t, r, u1) given by lower_bound_I (the larger of its two forms).
FirstIterateBound first_iterate_bound(const RadialProfile& u1, double tau0, double C0,
                                      double epsilon, const SSample& sample = {});

/// Params with C0 = lower_bound_C0(tau0) and c0 from first_iterate_bound,
/// reduced when needed so that c0 epsilon < delta0 sinh(tau0/2)^{1/2}.
BlowupParams make_blowup_params(double p, double q, double tau0, double epsilon, double delta0,
                                const RadialProfile& u1, const SSample& sample = {});

// ---- polynomial boost -----------------------------------------------------------

struct BoostEntry {
  int l = 0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double log_c = 0.0;  // c itself underflows for p close to 3
};

struct BoostSequence {
  std::vector<BoostEntry> entries;  // l = 1 .. l0
  int l0 = 0;
  double A0 = 0.0;
  std::vector<std::string> factor_log;
};

/// l0 = floor(2 / (3 - p)) + 1.
int boost_l0(double p);

/// a_1 = 0, b_1 = p - 1, a_{l+1} = a_l + 2, b_{l+1} = b_l + p - 1 up to l0;
/// c_1 = min(c0, tau0 C0 delta0 c0 / 4), c_{l+1} = c_l C0 delta0 / 32.
BoostSequence boost_sequence(const BlowupParams& params);

/// u >= c eps r (sinh r)^{-1/2} (t + r + ln(1/(c eps)))^{-b} (t - r)^a, the
/// bound of boost level `entry` on Sigma_l.
double boost_bound(const BoostEntry& entry, double epsilon, double t, double r);

/// (1/2) ((t - r - 6 l tau0 - 3 tau0) / 2)^2 r, clamped at 0.
double area_lower_bound(int l, double r, double t, double tau0);

// ---- John iteration ------------------------------------------------------------

/// A_{m+1} = A_m q, B_{m+1} = B_m q + 2 from (A0, B_0 = 0), m = 0 .. m_max.
template <class Real>
std::vector<std::pair<Real, Real>> john_AB(const Real& A0, const Real& q, int m_max) {
  std::vector<std::pair<Real, Real>> out;
  out.reserve(static_cast<std::size_t>(m_max) + 1);
  Real A = A0, B = Real(0);
  out.emplace_back(A, B);
  for (int m = 0; m < m_max; ++m) {
    A = A * q;
    B = B * q + Real(2);
    out.emplace_back(A, B);
  }
  return out;
}

/// q^m by repeated multiplication.
template <class Real>
Real int_power(const Real& q, int m) {
  Real x = Real(1);
  for (int i = 0; i < m; ++i) x = x * q;
  return x;
}

template <class Real>
Real john_A_closed(const Real& A0, const Real& q, int m) {
  return A0 * int_power(q, m);
}

template <class Real>
Real john_B_closed(const Real& q, int m) {
  return Real(2) * (int_power(q, m) - Real(1)) / (q - Real(1));
}

struct JohnEntry {
  int m = 0;
  double A = 0.0;
  double B = 0.0;
  double log_D = 0.0;
};

struct JohnSequence {
  double q = 0.0;
  std::vector<JohnEntry> entries;
  double E = 0.0;             // ln D0 minus the truncated series
  double E_tail_bound = 0.0;  // bound on the omitted series tail
  int series_terms = 0;
};

/// Entries up to m_max with log D_{m+1} = ln(C0 delta0) + q log D_m - 2 ln B_{m+1},
/// and E = ln D0 - sum_j (2 ln(j+1) + 2 j ln q - ln(C0 delta0 / 4)) / q^{j+1}.
JohnSequence john_recursion(double A0, double D0, double q, double C0, double delta0, int m_max);

struct BlowupTime {
  double T = 0.0;
  double T_series = 0.0;  // E + A0 ln T + (2/(q-1)) ln(tau0/2) > 0
  double T_form = 0.0;    // T > (1/(c eps))^{1/A0}
  double T_power = 0.0;   // tilde_c eps T^{A0} > 1/delta0
};

/// Infimum of the T satisfying all three conditions (maximum of the explicit
/// thresholds; each may be +inf when it overflows).
BlowupTime blowup_time_bound(double A0, double E, double q, double tau0, double c, double epsilon,
                             double delta0, double tilde_c);

// ---- certificates ----------------------------------------------------------------

struct VerificationPoint {
  double t = 0.0;
  double r = 0.0;
  double bound = 0.0;
  double simulated = 0.0;
  Region region = Region::S;
};

struct BlowupCertificate {
  BlowupParams params;
  BoostSequence boost;
  JohnSequence john;
  double tilde_c = 0.0;
  BlowupTime time;
  std::vector<VerificationPoint> verification_points;
};

/// tilde_c(T) = inf over a sample of Y(T) of boost_bound(l0) / (eps t^{A0}).
double tilde_c_on_Y(const BoostSequence& boost, const BlowupParams& params, double T);

/// Boost and John constants with T, tilde_c and E made mutually consistent
/// (T is raised until it satisfies the conditions for the tilde_c and E it
/// implies), also enforcing Y inside Sigma_{l0} (T >= (6 l0 + 1) tau0).
BlowupCertificate build_certificate(const BlowupParams& params, int m_max = 20);

struct CertificateReport {
  std::size_t checked_S = 0;
  std::size_t checked_Sigma = 0;
  std::vector<VerificationPoint> violations;
  std::vector<VerificationPoint> points;
  double min_margin_S = INFINITY;      // min (simulated - bound) on S
  double min_margin_Sigma = INFINITY;  // on Sigma_{l0}
  bool coverage_warning = false;
  std::string coverage_message;
};

/// Checks u_sim >= c0 eps (sinh r)^{-1/2} at grid points of S, and the
/// boosted bound at grid points of Sigma_{l0}; grid points outside both are
/// ignored. r = 0 is skipped (the bounds are singular there).
CertificateReport certificate_verify(const BlowupCertificate& cert, const SpaceTimeField& u_sim);

/// F(u) on r >= t - offset and F(clamp(u, -cap, cap)) elsewhere. The set
/// r >= t - offset contains the backward light cones of its points, so on it
/// the solution is the one driven by F; the clamp only keeps the run finite
/// where the solution blows up outside that set (for S, offset > 2 tau0).
Forcing dependence_truncated_forcing(const NonlinearitySpec& spec, double offset, double cap);

// ---- escape ----------------------------------------------------------------------

struct EscapeReport {
  std::optional<double> t_escape;
  bool instability = false;
  double threshold = 0.0;
  std::vector<std::pair<double, double>> sup_history;  // (t, sup_r |u|), every record_every steps
};

/// Steps the FD solver forward and returns the first time sup_r |u| exceeds
/// the threshold. Non-finite values count as an escape at that time with the
/// instability flag set.
EscapeReport escape_detector(const RadialProfile& u0, const RadialProfile& u1,
                             const NonlinearitySpec& spec, const FDConfig& cfg, double epsilon,
                             double threshold, int record_every = 10);

/// 10 (sup |eps u0| + sup |eps u1|) over the FD grid.
double default_escape_threshold(const RadialProfile& u0, const RadialProfile& u1, double epsilon,
                                const FDConfig& cfg);

}  // namespace hwave
