#include "runconfig.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "csv.hpp"

namespace hwave::cli {

namespace pt = boost::property_tree;

RadialProfile ProfileSpec::build() const {
  if (kind == "zero") return RadialProfile::zero();
  if (kind == "constant") return RadialProfile::constant(value);
  if (kind == "theta") return RadialProfile::theta(k);
  if (kind == "plateau") return RadialProfile::plateau(lo, hi, ramp, value);
  if (kind == "file") {
    const Table tab = read_csv(file);
    if (tab.columns.size() < 2) throw ConfigError("data file " + file + ": needs two columns");
    std::vector<double> x, y;
    for (const auto& row : tab.rows) {
      x.push_back(row[0]);
      y.push_back(row[1]);
    }
    return RadialProfile::sampled(std::move(x), std::move(y));
  }
  throw ConfigError("data: unknown profile kind '" + kind + "'");
}

namespace {

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!tree_) return;
    const auto v = tree_->get_optional<std::string>(key);
    if (!v) return;
    out = parse<T>(key, *v);
  }

  bool given(const std::string& key) const { return tree_ && tree_->count(key) > 0; }

  void finish() const {
    if (!tree_) return;
    for (const auto& kv : *tree_)
      if (!used_.count(kv.first))
        throw ConfigError("config: unknown key '" + kv.first + "' in [" + name_ + "]");
  }

 private:
  template <class T>
  T parse(const std::string& key, const std::string& text) const {
    auto fail = [&]() -> T {
      throw ConfigError("config: [" + name_ + "] " + key + " = '" + text + "' is not a valid " +
                        kind_name<T>());
    };
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
      if (text == "false" || text == "0" || text == "no" || text == "off") return false;
      return fail();
    } else {
      std::istringstream is(text);
      T v{};
      is >> v;
      if (is.fail() || !(is >> std::ws).eof()) return fail();
      if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) return fail();
      return v;
    }
  }

  template <class T>
  static const char* kind_name() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_integral_v<T>) return "integer";
    else return "number";
  }

  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

void read_profile(Section& s, const std::string& prefix, ProfileSpec& p) {
  s.get(prefix, p.kind);
  s.get(prefix + "_value", p.value);
  s.get(prefix + "_k", p.k);
  s.get(prefix + "_lo", p.lo);
  s.get(prefix + "_hi", p.hi);
  s.get(prefix + "_ramp", p.ramp);
  s.get(prefix + "_file", p.file);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  static const std::set<std::string> known = {"data",   "nonlinearity", "quadrature", "grid",
                                              "solver", "propagate",    "fd",         "decay",
                                              "contraction", "blowup",  "certify"};
  RunConfig cfg;
  cfg.u1.kind = "theta";
  for (const auto& kv : tree) {
    if (kv.second.data().size() && kv.second.empty())
      throw ConfigError("config: key '" + kv.first + "' outside any section");
    if (!known.count(kv.first)) throw ConfigError("config: unknown section [" + kv.first + "]");
    cfg.sections.insert(kv.first);
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  {
    Section s = section("data");
    read_profile(s, "u0", cfg.u0);
    read_profile(s, "u1", cfg.u1);
    s.finish();
  }
  {
    Section s = section("nonlinearity");
    std::string kind = to_string(cfg.nonlinearity.kind);
    s.get("kind", kind);
    cfg.nonlinearity.kind = nonlinearity_kind_from_string(kind);
    s.get("p", cfg.nonlinearity.p);
    s.get("q", cfg.nonlinearity.q);
    s.get("delta0", cfg.nonlinearity.delta0);
    s.get("A", cfg.nonlinearity.A);
    s.finish();
  }
  {
    Section s = section("quadrature");
    s.get("nodes_inner", cfg.quadrature.nodes_inner);
    s.get("nodes_outer", cfg.quadrature.nodes_outer);
    s.get("abs_tol", cfg.quadrature.abs_tol);
    s.get("rel_tol", cfg.quadrature.rel_tol);
    s.get("strict", cfg.quadrature.strict);
    s.finish();
  }
  {
    Section s = section("grid");
    s.get("t_max", cfg.grid.t_max);
    s.get("r_max", cfg.grid.r_max);
    s.get("dt", cfg.grid.dt);
    s.get("dr", cfg.grid.dr);
    s.finish();
  }
  {
    Section s = section("solver");
    SolverConfig& sc = cfg.solver;
    s.get("h", sc.h);
    s.get("epsilon", sc.epsilon);
    s.get("max_iters", sc.max_iters);
    s.get("fixed_point_tol", sc.fixed_point_tol);
    s.get("k", sc.k);
    s.get("enforce_envelope", sc.enforce_envelope);
    s.get("N_h", sc.N_h);
    s.get("kernel_nodes_inner", sc.quadrature.nodes_inner);
    s.get("kernel_nodes_outer", sc.quadrature.nodes_outer);
    s.finish();
    sc.grid = cfg.grid;
  }
  {
    Section s = section("propagate");
    s.get("engine", cfg.engine);
    s.finish();
  }
  {
    Section s = section("fd");
    cfg.fd_r_max_given = s.given("r_max");
    cfg.fd_t_max_given = s.given("t_max");
    s.get("dr", cfg.fd.dr);
    s.get("dt", cfg.fd.dt);
    s.get("r_max", cfg.fd.r_max);
    s.get("t_max", cfg.fd.t_max);
    s.get("stride_t", cfg.fd.stride_t);
    s.get("stride_r", cfg.fd.stride_r);
    s.finish();
  }
  {
    Section s = section("decay");
    s.get("k", cfg.decay_k);
    s.get("halving", cfg.decay_halving);
    s.finish();
  }
  {
    Section s = section("contraction");
    s.get("pairs", cfg.pairs);
    s.get("target", cfg.target);
    s.get("epsilon", cfg.contraction_epsilon);
    s.get("seed", cfg.seed);
    s.finish();
  }
  {
    Section s = section("blowup");
    BlowupSection& b = cfg.blowup;
    s.get("p", b.p);
    s.get("q", b.q);
    s.get("tau0", b.tau0);
    s.get("epsilon", b.epsilon);
    s.get("delta0", b.delta0);
    s.get("m_max", b.m_max);
    std::string kind = to_string(b.kind);
    s.get("kind", kind);
    b.kind = nonlinearity_kind_from_string(kind);
    s.get("escape", b.escape);
    s.get("escape_threshold", b.escape_threshold);
    s.get("escape_t_max", b.escape_t_max);
    s.finish();
  }
  {
    Section s = section("certify");
    s.get("field", cfg.certify.field);
    s.get("scale", cfg.certify.scale);
    s.get("tune", cfg.certify.tune);
    s.finish();
  }
  return cfg;
}

namespace {

void validate_profile(const ProfileSpec& p, const char* name) {
  static const std::set<std::string> kinds = {"zero", "constant", "theta", "plateau", "file"};
  if (!kinds.count(p.kind))
    throw ConfigError(std::string("data: ") + name + " kind '" + p.kind +
                      "' is not one of zero, constant, theta, plateau, file");
  if (p.kind == "file" && p.file.empty())
    throw ConfigError(std::string("data: ") + name + "_file is required for kind file");
  if (p.kind == "theta" && !(p.k > 0.0)) throw ConfigError(std::string("data: ") + name + "_k must be positive");
  if (p.kind == "plateau" && (!(p.ramp > 0.0) || !(p.lo >= p.ramp) || !(p.hi > p.lo)))
    throw ConfigError(std::string("data: ") + name + " plateau needs ramp > 0, lo >= ramp, hi > lo");
}

void validate_blowup(const BlowupSection& b) {
  std::ostringstream os;
  if (!(b.p > 1.0)) os << "blowup: p must exceed 1";
  else if (!(b.q > 1.0)) os << "blowup: q must exceed 1";
  else if (!(b.tau0 > 0.0)) os << "blowup: tau0 must be positive";
  else if (!(b.epsilon > 0.0)) os << "blowup: epsilon must be positive";
  else if (!(b.delta0 > 0.0 && b.delta0 < 1.0)) os << "blowup: delta0 must lie in (0, 1)";
  else if (b.m_max < 0 || b.m_max > 60) os << "blowup: m_max must lie in [0, 60]";
  else if (!(b.escape_t_max > 0.0)) os << "blowup: escape_t_max must be positive";
  if (!os.str().empty()) throw ConfigError(os.str());
}

}  // namespace

void validate_for(const RunConfig& cfg, const std::string& command) {
  static const std::set<std::string> commands = {"propagate", "solve",  "decay",
                                                 "contraction", "blowup", "certify"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  validate_profile(cfg.u0, "u0");
  validate_profile(cfg.u1, "u1");
  if (cfg.nonlinearity.kind != NonlinearityKind::none) cfg.nonlinearity.validate();
  cfg.quadrature.validate();
  cfg.grid.validate();
  if (command == "solve" || command == "contraction" || cfg.has("solver"))
    cfg.solver.validate(cfg.nonlinearity);
  if (cfg.engine != "integral" && cfg.engine != "fd" && cfg.engine != "both")
    throw ConfigError("propagate: engine must be integral, fd or both");
  if (!(cfg.fd.dr > 0.0) || !(cfg.fd.dt > 0.0) || cfg.fd.cfl() > 0.9 || cfg.fd.stride_t < 1 ||
      cfg.fd.stride_r < 1)
    throw ConfigError("fd: need positive spacings with dt/dr <= 0.9 and strides >= 1");
  if (!(cfg.decay_k > 0.0)) throw ConfigError("decay: k must be positive");
  if (cfg.pairs < 1) throw ConfigError("contraction: pairs must be positive");
  if (!(cfg.target > 0.0 && cfg.target < 1.0)) throw ConfigError("contraction: target must lie in (0, 1)");
  if (cfg.contraction_epsilon < 0.0) throw ConfigError("contraction: epsilon must be nonnegative");
  if (command == "blowup" || command == "certify" || cfg.has("blowup")) validate_blowup(cfg.blowup);
  if (command == "certify") {
    if (!(cfg.blowup.p < 3.0)) throw ConfigError("certify: needs 1 < p < 3 (the blow-up regime)");
    if (!(cfg.certify.scale > 0.0)) throw ConfigError("certify: scale must be positive");
  }
}

}  // namespace hwave::cli
