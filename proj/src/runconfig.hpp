#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "hwave/blowlab.hpp"
#include "hwave/fdoracle.hpp"
#include "hwave/globalsolver.hpp"
#include "hwave/hypgeo.hpp"
#include "hwave/nonlin.hpp"
#include "hwave/profile.hpp"

namespace hwave::cli {

/// Data profile as written in the [data] section.
struct ProfileSpec {
  std::string kind = "zero";  // zero | constant | theta | plateau | file
  double value = 1.0;
  double k = 1.0;
  double lo = 1.0, hi = 3.0, ramp = 0.5;
  std::string file;

  RadialProfile build() const;
};

struct BlowupSection {
  double p = 2.0;
  double q = 2.0;
  double tau0 = 1.0;
  double epsilon = 0.5;
  double delta0 = 0.1;
  int m_max = 20;
  NonlinearityKind kind = NonlinearityKind::piecewise_generic;
  bool escape = true;
  double escape_threshold = 0.0;  // <= 0: 10 x initial sup
  double escape_t_max = 40.0;
};

struct CertifySection {
  std::string field;  // CSV with columns t, r, u; empty: run the FD solver
  double scale = 1.0;
  bool tune = false;  // c0 for the S check taken from the simulated field itself
};

struct RunConfig {
  std::set<std::string> sections;  // sections present in the file

  ProfileSpec u0, u1;
  NonlinearitySpec nonlinearity;
  QuadratureConfig quadrature;
  SolverGrid grid;
  SolverConfig solver;
  std::string engine = "integral";  // integral | fd | both
  FDConfig fd;
  bool fd_r_max_given = false;
  bool fd_t_max_given = false;
  double decay_k = 1.0;
  bool decay_halving = false;
  int pairs = 20;
  double target = 0.5;
  double contraction_epsilon = 0.0;  // > 0: probe at this epsilon only
  std::uint64_t seed = 12345;
  BlowupSection blowup;
  CertifySection certify;

  bool has(const std::string& section) const { return sections.count(section) > 0; }
};

/// Parses the key = value file with [section] headers. Unknown sections or
/// keys and malformed values raise ConfigError.
RunConfig load_config(const std::string& path);

/// Validates every record the command uses, and every section present in the
/// file, before any computation.
void validate_for(const RunConfig& cfg, const std::string& command);

}  // namespace hwave::cli
