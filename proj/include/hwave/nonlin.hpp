#pragma once

#include <string>

#include "hwave/errors.hpp"

namespace hwave {

enum class NonlinearityKind { none, canonical_sinh_inverse, piecewise_generic };

const char* to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

/// Parameters of an admissible nonlinearity.
///   canonical_sinh_inverse:  F(u) = asinh(1/|u|)^{1-p} |u|
///   piecewise_generic:       F(u) = (ln 1/|u|)^{1-p} |u|       for |u| < delta0
///                            F(u) = |u|^q                       for |u| > 1/delta0
///                            ln F = cubic Hermite in ln|u|      in between
/// A is the constant of the Lipschitz envelope G(u) = A (ln 1/u)^{1-p}.
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::canonical_sinh_inverse;
  double p = 3.5;
  double q = 2.0;
  double delta0 = 0.1;
  double A = 1.0;

  void validate() const;
};

double F_canonical(double u, double p);
double F_canonical_prime(double u, double p);

double F_generic(double u, const NonlinearitySpec& spec);
double F_generic_prime(double u, const NonlinearitySpec& spec);

/// Dispatch on spec.kind (none gives 0).
double F_eval(double u, const NonlinearitySpec& spec);
double F_prime(double u, const NonlinearitySpec& spec);

/// A (ln 1/u)^{1-p} for 0 < u <= 1/A, u < 1.
double G_envelope(double u_abs, double p, double A);

struct DiffBound {
  double diff = 0.0;
  double bound = 0.0;
};

/// |F(u) - F(v)| and G(max(|u|, |v|)) |u - v|.
DiffBound lipschitz_diff_bound(double u, double v, const NonlinearitySpec& spec);

struct EnvelopeFit {
  double A = 0.0;         // final constant
  double sup_ratio = 0.0; // sup over 0 < |u| < 1 of |F'(u)| (ln 1/|u|)^{p-1}
  double u_at_sup = 0.0;
};

/// Computes sup_{0<|u|<1} |F'(u)| (ln 1/|u|)^{p-1} on a log grid (refined
/// around the maximiser), then A = max(sup, 1 + 1e-3, 2 N_h (1 + 1e-2)) so
/// that G bounds F' on the whole domain |u| <= 1/A and A > 2 N_h.
EnvelopeFit fit_envelope_constant(const NonlinearitySpec& spec, double N_h);

/// sup |F'| on [-bound, bound], sampled densely (the local Lipschitz bound M).
double lipschitz_bound_on(const NonlinearitySpec& spec, double bound);

}  // namespace hwave
