#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "hwave/blowlab.hpp"
#include "hwave/fdoracle.hpp"
#include "hwave/globalsolver.hpp"
#include "hwave/meanprop.hpp"
#include "hwave/parallel.hpp"
#include "runconfig.hpp"

namespace hwave::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCertificate = 4;

struct Context {
  const RunConfig& cfg;
  fs::path out;
  std::ostream& log;

  std::string path(const std::string& name) const { return (out / name).string(); }
};

SpaceTimeField integral_field(const RadialProfile& u0, const RadialProfile& u1,
                              const SolverGrid& grid, const QuadratureConfig& q) {
  SpaceTimeField f(uniform_grid(0.0, grid.t_max, grid.dt), uniform_grid(0.0, grid.r_max, grid.dr),
                   0.0);
  const std::size_t nr = f.nr();
  parallel_for(0, f.nt() * nr, [&](std::size_t k) {
    const std::size_t i = k / nr, j = k % nr;
    f.values[k] = linear_solution(u0, u1, f.t_grid[i], f.r_grid[j], q);
  }, 16);
  return f;
}

double data_support(const RadialProfile& u0, const RadialProfile& u1) {
  return std::max(u0.is_zero() ? 0.0 : effective_support(u0),
                  u1.is_zero() ? 0.0 : effective_support(u1));
}

/// [fd] with t_max replaced when given, and r_max = t_max + data support
/// unless the file sets it.
FDConfig fd_config(const RunConfig& cfg, const RadialProfile& u0, const RadialProfile& u1,
                   std::optional<double> t_max) {
  FDConfig fd = cfg.fd;
  if (t_max) fd.t_max = *t_max;
  if (!cfg.fd_r_max_given) fd.r_max = fd.t_max + std::max(data_support(u0, u1), 1.0);
  fd.validate(data_support(u0, u1));
  return fd;
}

double relative_error(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

// ---- propagate --------------------------------------------------------------------

int cmd_propagate(const Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const RadialProfile u0 = cfg.u0.build(), u1 = cfg.u1.build();
  std::optional<SpaceTimeField> integral, fd;
  if (cfg.engine != "fd") integral = integral_field(u0, u1, cfg.grid, cfg.quadrature);
  if (cfg.engine != "integral") {
    const FDConfig fc = fd_config(cfg, u0, u1, std::nullopt);
    fd = fd_solve(u0, u1, no_forcing(), fc);
  }
  if (integral) write_field(cx.path("field.csv"), *integral);
  if (fd) write_field(cx.path(integral ? "fd_field.csv" : "field.csv"), *fd);
  if (integral && fd) {
    CsvWriter w(cx.path("diff.csv"), {"t", "r", "integral", "fd", "rel_err"});
    double worst = 0.0;
    const double t_end = fd->t_grid.back(), r_end = fd->r_grid.back();
    for (std::size_t i = 0; i < integral->nt(); ++i) {
      const double t = integral->t_grid[i];
      if (t > t_end) break;
      for (std::size_t j = 0; j < integral->nr(); ++j) {
        const double r = integral->r_grid[j];
        // the reflection at r_max has not reached (t, r) yet
        if (r > r_end - t) break;
        const double a = integral->at(i, j), b = fd->interpolate(t, r);
        const double e = relative_error(a, b);
        worst = std::max(worst, e);
        w.row({t, r, a, b, e});
      }
    }
    w.close();
    cx.log << "propagate: max relative difference integral vs fd = " << format_double(worst) << '\n';
  }
  cx.log << "propagate: engine " << cfg.engine << ", wrote " << cx.out.string() << '\n';
  return 0;
}

// ---- solve ---------------------------------------------------------------------------

void write_history(const Context& cx, const std::vector<double>& h) {
  CsvWriter w(cx.path("history.csv"), {"iteration", "diff_norm"});
  for (std::size_t n = 0; n < h.size(); ++n) w.row({static_cast<long long>(n + 1), h[n]});
  w.close();
}

int cmd_solve(const Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const SolverContext ctx(cfg.u0.build(), cfg.u1.build(), cfg.nonlinearity, cfg.solver);
  PicardResult res;
  try {
    res = picard_solve(ctx, cfg.solver.epsilon);
  } catch (const ConvergenceError& e) {
    write_history(cx, e.history());
    throw;
  } catch (const DomainEscapeError& e) {
    write_history(cx, e.history());
    throw;
  }
  write_field(cx.path("field.csv"), res.field);
  write_history(cx, res.history);
  CsvWriter w(cx.path("report.csv"), {"epsilon", "converged", "iterations", "weighted_norm",
                                      "residual", "N_h", "A", "epsilon_cap"});
  w.row({res.epsilon, static_cast<long long>(res.converged), static_cast<long long>(res.iterations),
         res.weighted, res.residual, res.N_h, res.A, ctx.epsilon_cap()});
  w.close();
  cx.log << "solve: converged in " << res.iterations << " iterations, weighted norm "
         << format_double(res.weighted) << '\n';
  return 0;
}

// ---- decay -----------------------------------------------------------------------------

int cmd_decay(const Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const RadialProfile u0 = cfg.u0.build(), u1 = cfg.u1.build();
  CsvWriter w(cx.path("decay.csv"), {"dt", "dr", "slope_r", "slope_tr", "sup_weighted",
                                     "points_r", "points_tr", "fit_window"});
  std::vector<SolverGrid> grids{cfg.grid};
  if (cfg.decay_halving) {
    SolverGrid g = cfg.grid;
    g.dt /= 2.0;
    g.dr /= 2.0;
    g.validate();
    grids.push_back(g);
  }
  std::vector<double> sups;
  for (std::size_t n = 0; n < grids.size(); ++n) {
    const SpaceTimeField u = integral_field(u0, u1, grids[n], cfg.quadrature);
    if (n == 0) write_field(cx.path("field.csv"), u);
    const DecayFitReport rep = decay_fit(u, cfg.decay_k);
    sups.push_back(rep.sup_weighted);
    w.row({grids[n].dt, grids[n].dr, rep.slope_r, rep.slope_tr, rep.sup_weighted,
           static_cast<long long>(rep.points_r), static_cast<long long>(rep.points_tr),
           rep.fit_window});
    cx.log << "decay: dt " << grids[n].dt << " slope_r " << format_double(rep.slope_r)
           << " sup " << format_double(rep.sup_weighted) << '\n';
  }
  w.close();
  return 0;
}

// ---- contraction -------------------------------------------------------------------------

void write_ratios(CsvWriter& w, const ContractionReport& rep) {
  for (std::size_t n = 0; n < rep.ratios.size(); ++n)
    w.row({rep.epsilon, static_cast<long long>(n), rep.ratios[n]});
}

int cmd_contraction(const Context& cx, std::uint64_t seed) {
  const RunConfig& cfg = cx.cfg;
  const SolverContext ctx(cfg.u0.build(), cfg.u1.build(), cfg.nonlinearity, cfg.solver);
  CsvWriter pairs(cx.path("contraction.csv"), {"epsilon", "pair", "ratio"});
  CsvWriter summary(cx.path("summary.csv"),
                    {"epsilon0", "upper", "max_ratio", "epsilon_tenth", "max_ratio_tenth",
                     "target", "pairs", "seed", "N_h", "A", "epsilon_cap"});
  double eps0, upper;
  if (cfg.contraction_epsilon > 0.0) {
    eps0 = upper = cfg.contraction_epsilon;
  } else {
    const EpsilonSearch s = epsilon_threshold(ctx, cfg.target, cfg.pairs, seed);
    CsvWriter probes(cx.path("search.csv"), {"step", "epsilon", "max_ratio"});
    for (std::size_t n = 0; n < s.probes.size(); ++n)
      probes.row({static_cast<long long>(n), s.probes[n].first, s.probes[n].second});
    probes.close();
    eps0 = s.epsilon;
    upper = s.upper;
  }
  const ContractionReport at = contraction_probe(ctx, eps0, cfg.pairs, seed);
  const ContractionReport tenth = contraction_probe(ctx, eps0 / 10.0, cfg.pairs, seed);
  write_ratios(pairs, at);
  write_ratios(pairs, tenth);
  pairs.close();
  summary.row({eps0, upper, at.max_ratio, eps0 / 10.0, tenth.max_ratio, cfg.target,
               static_cast<long long>(cfg.pairs), static_cast<long long>(seed), ctx.N_h(), ctx.A(),
               ctx.epsilon_cap()});
  summary.close();
  cx.log << "contraction: epsilon0 " << format_double(eps0) << " max_ratio "
         << format_double(at.max_ratio) << " (at epsilon0/10: " << format_double(tenth.max_ratio)
         << ")\n";
  return 0;
}

// ---- blowup / certify -----------------------------------------------------------------------

std::pair<RadialProfile, RadialProfile> blowup_profiles(const RunConfig& cfg) {
  if (cfg.has("data")) return {cfg.u0.build(), cfg.u1.build()};
  return {RadialProfile::zero(), blowup_data(cfg.blowup.tau0)};
}

NonlinearitySpec blowup_spec(const BlowupSection& b) {
  NonlinearitySpec s;
  s.kind = b.kind;
  s.p = b.p;
  s.q = b.q;
  s.delta0 = b.delta0;
  s.validate();
  return s;
}

const char* regime(double p) {
  if (p < 3.0) return "blow-up";
  if (p == 3.0) return "critical, no theory";
  return "small-data global existence";
}

int cmd_blowup(const Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const BlowupSection& b = cfg.blowup;
  const auto [u0, u1] = blowup_profiles(cfg);
  const NonlinearitySpec spec = blowup_spec(b);

  std::vector<std::string> header{"regime", "p", "q", "tau0", "epsilon", "delta0"};
  std::vector<CsvWriter::Cell> row{std::string(regime(b.p)), b.p, b.q, b.tau0, b.epsilon, b.delta0};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (b.p < 3.0) {
    const BlowupParams params = make_blowup_params(b.p, b.q, b.tau0, b.epsilon, b.delta0, u1);
    const BlowupCertificate cert = build_certificate(params, b.m_max);
    CsvWriter seq(cx.path("sequences.csv"), {"sequence", "index", "value"});
    seq.row({std::string("l0"), 0LL, static_cast<double>(cert.boost.l0)});
    seq.row({std::string("A0"), 0LL, cert.boost.A0});
    for (const auto& e : cert.boost.entries) {
      seq.row({std::string("a"), static_cast<long long>(e.l), e.a});
      seq.row({std::string("b"), static_cast<long long>(e.l), e.b});
      seq.row({std::string("c"), static_cast<long long>(e.l), e.c});
      seq.row({std::string("log_c"), static_cast<long long>(e.l), e.log_c});
    }
    for (const auto& e : cert.john.entries) {
      seq.row({std::string("A"), static_cast<long long>(e.m), e.A});
      seq.row({std::string("B"), static_cast<long long>(e.m), e.B});
      seq.row({std::string("log_D"), static_cast<long long>(e.m), e.log_D});
    }
    seq.close();
    CsvWriter fac(cx.path("factors.csv"), {"step", "description"});
    for (std::size_t n = 0; n < cert.boost.factor_log.size(); ++n)
      fac.row({static_cast<long long>(n), cert.boost.factor_log[n]});
    fac.close();
    for (const char* h : {"C0", "c0", "l0", "A0", "tilde_c", "E", "E_tail_bound", "series_terms",
                          "T", "T_series", "T_form", "T_power"})
      header.emplace_back(h);
    for (double v : {params.C0, params.c0, static_cast<double>(cert.boost.l0), cert.boost.A0,
                     cert.tilde_c, cert.john.E, cert.john.E_tail_bound,
                     static_cast<double>(cert.john.series_terms), cert.time.T, cert.time.T_series,
                     cert.time.T_form, cert.time.T_power})
      row.emplace_back(v);
    cx.log << "blowup: l0 = " << cert.boost.l0 << ", A0 = " << format_double(cert.boost.A0)
           << ", T = " << format_double(cert.time.T) << '\n';
  } else {
    cx.log << "blowup: p = " << b.p << " (" << regime(b.p) << "): no boost sequence, escape run only\n";
  }

  for (const char* h : {"escape_run", "escaped", "t_escape", "instability", "threshold"})
    header.emplace_back(h);
  if (b.escape) {
    const FDConfig run = fd_config(cfg, u0, u1, b.escape_t_max);
    const double thr = b.escape_threshold > 0.0 ? b.escape_threshold
                                                : default_escape_threshold(u0, u1, b.epsilon, run);
    const EscapeReport er = escape_detector(u0, u1, spec, run, b.epsilon, thr);
    CsvWriter esc(cx.path("escape.csv"), {"t", "sup_abs_u"});
    for (const auto& [t, s] : er.sup_history) esc.row({t, s});
    esc.close();
    row.insert(row.end(), {1LL, static_cast<long long>(er.t_escape.has_value()),
                           er.t_escape.value_or(nan), static_cast<long long>(er.instability), thr});
    cx.log << "blowup: escape " << (er.t_escape ? "at t = " + format_double(*er.t_escape) : "none")
           << " (threshold " << format_double(thr) << ")\n";
  } else {
    row.insert(row.end(), {0LL, 0LL, nan, 0LL, nan});
  }
  CsvWriter c(cx.path("constants.csv"), header);
  c.row(row);
  c.close();
  return 0;
}

int cmd_certify(const Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const BlowupSection& b = cfg.blowup;
  const auto [u0, u1] = blowup_profiles(cfg);
  const BlowupParams params = make_blowup_params(b.p, b.q, b.tau0, b.epsilon, b.delta0, u1);
  BlowupCertificate cert = build_certificate(params, b.m_max);

  SpaceTimeField u;
  std::optional<double> breakdown;
  if (!cfg.certify.field.empty()) {
    u = read_field(cfg.certify.field);
  } else {
    const FDConfig fc =
        fd_config(cfg, u0, u1, cfg.fd_t_max_given ? std::nullopt : std::optional<double>(12.0));
    PartialSolve ps = fd_solve_until_breakdown(u0, u1, nonlinear_forcing(blowup_spec(b)), fc, b.epsilon);
    u = std::move(ps.field);
    breakdown = ps.t_breakdown;
  }
  if (cfg.certify.tune) {
    // tightest c0 the field itself supports on S
    double c0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.nt(); ++i)
      for (std::size_t j = 0; j < u.nr(); ++j) {
        const double r = u.r_grid[j];
        if (r > 0.0 && region_membership(r, u.t_grid[i], b.tau0, Region::S))
          c0 = std::min(c0, u.at(i, j) * std::exp(0.5 * log_sinh(r)) / b.epsilon);
      }
    if (!std::isfinite(c0) || !(c0 > 0.0))
      throw NumericError("certify: tuning needs a positive field on grid points of S");
    cert.params.c0 = c0;
  }
  for (double& v : u.values) v *= cfg.certify.scale;

  const CertificateReport rep = certificate_verify(cert, u);
  const std::vector<std::string> cols{"t", "r", "region", "bound", "simulated", "margin"};
  auto dump = [&](const std::string& name, const std::vector<VerificationPoint>& pts) {
    CsvWriter w(cx.path(name), cols);
    for (const auto& p : pts)
      w.row({p.t, p.r, std::string(to_string(p.region)), p.bound, p.simulated, p.simulated - p.bound});
    w.close();
  };
  dump("points.csv", rep.points);
  dump("violations.csv", rep.violations);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvWriter s(cx.path("certificate.csv"),
              {"c0", "epsilon", "tau0", "l0", "T", "t_last", "t_breakdown", "checked_S",
               "checked_Sigma", "violations", "min_margin_S", "min_margin_Sigma",
               "coverage_warning", "coverage_message"});
  s.row({cert.params.c0, b.epsilon, b.tau0, static_cast<long long>(cert.boost.l0), cert.time.T,
         u.t_grid.back(), breakdown.value_or(nan), static_cast<long long>(rep.checked_S),
         static_cast<long long>(rep.checked_Sigma), static_cast<long long>(rep.violations.size()),
         rep.min_margin_S, rep.min_margin_Sigma, static_cast<long long>(rep.coverage_warning),
         rep.coverage_message});
  s.close();
  if (breakdown)
    cx.log << "certify: the simulated solution breaks down at t = " << format_double(*breakdown)
           << "; points beyond are not covered\n";
  if (rep.coverage_warning) cx.log << "certify: coverage warning: " << rep.coverage_message << '\n';
  cx.log << "certify: " << rep.checked_S << " points in S, " << rep.checked_Sigma
         << " in Sigma, " << rep.violations.size() << " violations\n";
  return rep.violations.empty() ? 0 : kExitCertificate;
}

}  // namespace

int run_command(const Request& req, std::ostream& out, std::ostream& err) {
  const std::string& c = req.command;
  try {
    RunConfig cfg = load_config(req.config_path);
    if (req.seed) cfg.seed = *req.seed;
    validate_for(cfg, c);
    fs::path dir = req.out_dir.empty() ? fs::path(".") : fs::path(req.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    Context cx{cfg, dir, out};
    if (c == "propagate") return cmd_propagate(cx);
    if (c == "solve") return cmd_solve(cx);
    if (c == "decay") return cmd_decay(cx);
    if (c == "contraction") return cmd_contraction(cx, cfg.seed);
    if (c == "blowup") return cmd_blowup(cx);
    return cmd_certify(cx);
  } catch (const ConfigError& e) {
    err << c << ": configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << c << ": invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << c << ": numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace hwave::cli
