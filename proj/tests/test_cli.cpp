#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("wavecli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / (name + ".ini");
  std::ofstream(p) << body;
  return p;
}

struct Run {
  int code;
  std::string err;
};

Run wavecli(const std::string& command, const fs::path& config, const fs::path& out,
            const std::string& extra = "") {
  const fs::path err = out.string() + ".stderr";
  const std::string cmd = std::string("\"") + WAVECLI_PATH + "\" " + command + " --config \"" +
                          config.string() + "\" --out \"" + out.string() + "\" " + extra +
                          " > /dev/null 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

void check_csv_format(const fs::path& p, const std::vector<std::string>& header) {
  const std::string text = slurp(p);
  CAPTURE(p.string());
  CHECK(text.find('\r') == std::string::npos);
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');
  const auto r = rows(p);
  REQUIRE(!r.empty());
  CHECK(r.front() == header);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].size() == header.size());
}

const char* kBlowup = R"(
[blowup]
p = 2
q = 2
tau0 = 1
epsilon = 1
escape = true
escape_t_max = 40
)";

}  // namespace

TEST_CASE("propagate with zero data writes a zero field") {
  const auto cfg = write_config("zero", R"(
[data]
u0 = zero
u1 = zero
[grid]
t_max = 1
r_max = 1
dt = 0.5
dr = 0.5
)");
  const fs::path out = scratch() / "zero";
  REQUIRE(wavecli("propagate", cfg, out).code == 0);
  check_csv_format(out / "field.csv", {"t", "r", "u"});
  const auto r = rows(out / "field.csv");
  CHECK(r.size() == 10);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::stod(r[i][2]) == 0.0);
}

TEST_CASE("propagate with constant data follows 2 sinh(t/2)") {
  const auto cfg = write_config("constant", R"(
[data]
u0 = zero
u1 = constant
u1_value = 1
[grid]
t_max = 1
r_max = 2
dt = 0.25
dr = 0.5
[propagate]
engine = both
[fd]
dr = 0.05
dt = 0.04
)");
  const fs::path out = scratch() / "constant";
  const Run run = wavecli("propagate", cfg, out);
  REQUIRE_MESSAGE(run.code == 0, run.err);
  const auto r = rows(out / "field.csv");
  REQUIRE(r.size() > 1);
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double t = std::stod(r[i][0]);
    CHECK(std::stod(r[i][2]) == doctest::Approx(2.0 * std::sinh(t / 2.0)).epsilon(1e-6));
  }
  check_csv_format(out / "diff.csv", {"t", "r", "integral", "fd", "rel_err"});
  for (const auto& row : rows(out / "diff.csv"))
    if (row[0] != "t" && std::stod(row[1]) <= 5.0) CHECK(std::stod(row[4]) <= 1e-3);
}

TEST_CASE("floats carry 17 significant digits") {
  const auto cfg = write_config("digits", R"(
[data]
u1 = constant
[grid]
t_max = 0.5
r_max = 0.5
dt = 0.5
dr = 0.5
)");
  const fs::path out = scratch() / "digits";
  REQUIRE(wavecli("propagate", cfg, out).code == 0);
  const auto r = rows(out / "field.csv");
  const std::string& v = r.back()[2];
  CHECK(std::stod(v) == doctest::Approx(2.0 * std::sinh(0.25)).epsilon(1e-10));
  std::size_t digits = 0;
  for (char ch : v.substr(0, v.find_first_of("eE")))
    if (ch >= '0' && ch <= '9') ++digits;
  CHECK(digits >= 16);
}

TEST_CASE("configuration errors exit with 2") {
  const fs::path out = scratch() / "bad";
  const auto h = write_config("bad_h", R"(
[nonlinearity]
p = 3.5
[solver]
h = 1.6
)");
  Run run = wavecli("solve", h, out);
  CHECK(run.code == 2);
  CHECK(run.err.find("p - 2") != std::string::npos);

  const auto p3 = write_config("bad_p", R"(
[nonlinearity]
p = 3
[solver]
h = 1.2
)");
  CHECK(wavecli("contraction", p3, out).code == 2);

  CHECK(wavecli("propagate", write_config("unknown_section", "[nope]\nx = 1\n"), out).code == 2);
  CHECK(wavecli("propagate", write_config("unknown_key", "[grid]\nspeed = 1\n"), out).code == 2);
  CHECK(wavecli("propagate", write_config("bad_value", "[grid]\nt_max = fast\n"), out).code == 2);
  CHECK(wavecli("propagate", scratch() / "missing.ini", out).code == 2);
  CHECK(wavecli("launch", h, out).code == 2);
}

TEST_CASE("solve: zero epsilon converges at once, huge epsilon escapes") {
  const std::string base = R"(
[data]
u1 = theta
[nonlinearity]
p = 3.5
[grid]
t_max = 4
r_max = 4
dt = 0.1
dr = 0.1
[solver]
h = 1.2
)";
  const fs::path out0 = scratch() / "solve0";
  const Run run = wavecli("solve", write_config("solve0", base + "epsilon = 0\n"), out0);
  REQUIRE_MESSAGE(run.code == 0, run.err);
  check_csv_format(out0 / "history.csv", {"iteration", "diff_norm"});
  check_csv_format(out0 / "report.csv", {"epsilon", "converged", "iterations", "weighted_norm",
                                         "residual", "N_h", "A", "epsilon_cap"});
  const auto rep = rows(out0 / "report.csv");
  CHECK(rep[1][1] == "1");
  CHECK(rep[1][2] == "1");

  const fs::path out1 = scratch() / "solve_huge";
  const Run big = wavecli("solve", write_config("solve_huge", base + "epsilon = 1000\n"), out1);
  CHECK(big.code == 3);
  CHECK(big.err.find("solve") != std::string::npos);
}

TEST_CASE("blowup writes the boost sequences for p = q = 2") {
  const auto cfg = write_config("blowup", kBlowup);
  const fs::path out = scratch() / "blowup";
  REQUIRE(wavecli("blowup", cfg, out).code == 0);
  check_csv_format(out / "sequences.csv", {"sequence", "index", "value"});
  const auto r = rows(out / "sequences.csv");
  auto find = [&](const std::string& name, const std::string& index) {
    for (const auto& row : r)
      if (row[0] == name && row[1] == index) return std::stod(row[2]);
    FAIL("missing row " << name << "," << index);
    return std::nan("");
  };
  CHECK(find("l0", "0") == 3.0);
  CHECK(find("A0", "0") == 1.0);
  CHECK(find("a", "1") == 0.0);
  CHECK(find("a", "2") == 2.0);
  CHECK(find("a", "3") == 4.0);
  CHECK(find("b", "1") == 1.0);
  CHECK(find("b", "2") == 2.0);
  CHECK(find("b", "3") == 3.0);
  const auto esc = rows(out / "constants.csv");
  REQUIRE(esc.size() == 2);
  const auto& head = esc[0];
  const auto col = std::find(head.begin(), head.end(), "escaped") - head.begin();
  REQUIRE(col < static_cast<long>(head.size()));
  CHECK(esc[1][col] == "1");
}

TEST_CASE("certify: simulated field passes, halved field fails with 4") {
  const std::string base = R"(
[blowup]
p = 2
q = 2
tau0 = 1
epsilon = 0.5
escape = false
[fd]
dr = 0.02
dt = 0.016
)";
  const fs::path ok = scratch() / "certify_ok";
  const Run pass = wavecli("certify", write_config("certify_ok", base), ok);
  CHECK_MESSAGE(pass.code == 0, pass.err);
  check_csv_format(ok / "violations.csv", {"t", "r", "region", "bound", "simulated", "margin"});
  CHECK(rows(ok / "violations.csv").size() == 1);

  const fs::path bad = scratch() / "certify_half";
  const Run fail =
      wavecli("certify", write_config("certify_half", base + "[certify]\nscale = 0.5\ntune = true\n"), bad);
  CHECK(fail.code == 4);
  CHECK(rows(bad / "violations.csv").size() > 1);
}

TEST_CASE("same config and seed give byte-identical output") {
  const auto cfg = write_config("contraction", R"(
[data]
u1 = theta
[nonlinearity]
p = 3.5
[grid]
t_max = 3
r_max = 3
dt = 0.1
dr = 0.1
[solver]
h = 1.2
[contraction]
pairs = 5
)");
  const fs::path a = scratch() / "det_a", b = scratch() / "det_b", c = scratch() / "det_c";
  REQUIRE(wavecli("contraction", cfg, a, "--seed 7").code == 0);
  REQUIRE(wavecli("contraction", cfg, b, "--seed 7").code == 0);
  REQUIRE(wavecli("contraction", cfg, c, "--seed 8").code == 0);
  for (const char* f : {"contraction.csv", "summary.csv", "search.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "contraction.csv") != slurp(c / "contraction.csv"));

  const auto bl = write_config("blowup_det", kBlowup);
  REQUIRE(wavecli("blowup", bl, scratch() / "bl_a").code == 0);
  REQUIRE(wavecli("blowup", bl, scratch() / "bl_b").code == 0);
  for (const char* f : {"sequences.csv", "constants.csv", "factors.csv", "escape.csv"})
    CHECK(slurp(scratch() / "bl_a" / f) == slurp(scratch() / "bl_b" / f));
}
