// Drives the built CLI binary end to end: exit codes, CSV shape, and
// byte-level determinism of repeated runs.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

const std::string kCli = VALDIST_CLI_PATH;
const std::string kDir = VALDIST_TEST_DIR;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& tag) {
  const std::string out_path = kDir + "/cli_" + tag + ".out";
  const std::string cmd = kCli + " " + args + " > " + out_path + " 2> " + out_path + ".err";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  r.output = read_file(out_path);
  return r;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("density subcommand: free collapse and determinism") {
  const std::string cfg_path = kDir + "/density_half.json";
  write_file(cfg_path, R"({
    "potential": {"kind": "inverse_square", "nu": 0.5, "a": 1.0},
    "lambda_values": [1.0, 4.0, 9.0]
  })");

  const RunResult first = run("density --config " + cfg_path, "density1");
  REQUIRE(first.exit_code == 0);
  CHECK(first.output.rfind("lambda,a_tilde,b_tilde,c_tilde,f_numeric,f_closed_form,rel_error",
                           0) == 0);
  CHECK(count_lines(first.output) == 4);

  // every rel_error field at most 1e-6
  std::istringstream lines(first.output);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto pos = line.rfind(',');
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(line.substr(pos + 1)) <= 1e-6);
  }

  const RunResult second = run("density --config " + cfg_path + " --threads 2", "density2");
  REQUIRE(second.exit_code == 0);
  CHECK(first.output == second.output);  // byte identical
}

TEST_CASE("density reports numerical failures with exit code 3") {
  const std::string cfg_path = kDir + "/density_bad_match.json";
  write_file(cfg_path, R"({
    "potential": {"kind": "inverse_square", "nu": 3.0, "a": 1.0},
    "lambda_values": [1.0],
    "match_points": [5.0, 10.0, 20.0]
  })");
  CHECK(run("density --config " + cfg_path, "density3").exit_code == 3);
}

TEST_CASE("config errors exit with code 2") {
  CHECK(run("density --config " + kDir + "/does_not_exist.json", "nofile").exit_code == 2);

  const std::string bad_json = kDir + "/bad.json";
  write_file(bad_json, "{ not json");
  CHECK(run("density --config " + bad_json, "badjson").exit_code == 2);

  const std::string missing = kDir + "/missing_keys.json";
  write_file(missing, R"({"potential": {"kind": "zero", "a": 0.0}})");
  CHECK(run("density --config " + missing, "missing").exit_code == 2);

  const std::string bad_band = kDir + "/bad_band.json";
  write_file(bad_band, R"({
    "potential": {"kind": "zero", "a": 0.0},
    "lambda": {"lo": 1.0, "hi": 4.0, "n": 100},
    "x_list": [10.0],
    "band": {"c": 2.0, "d": 1.0}
  })");
  CHECK(run("distcheck --config " + bad_band, "badband").exit_code == 2);
}

TEST_CASE("distcheck emits one row per x") {
  const std::string cfg_path = kDir + "/distcheck.json";
  write_file(cfg_path, R"({
    "potential": {"kind": "zero", "a": 0.0},
    "lambda": {"lo": 1.0, "hi": 4.0, "n": 2000},
    "x_list": [10.0, 25.0],
    "band": {"c": 0.785398163397448, "d": 2.35619449019234}
  })");
  const RunResult r = run("distcheck --config " + cfg_path, "distcheck");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("x,empirical,limit,abs_error", 0) == 0);
  CHECK(count_lines(r.output) == 3);
}

TEST_CASE("theorem2 with an empty set gives all-zero empirical column") {
  const std::string cfg_path = kDir + "/theorem2_empty.json";
  write_file(cfg_path, R"({
    "potential": {"kind": "zero", "a": 0.0},
    "lambda": {"lo": 1.0, "hi": 4.0, "n": 500},
    "x_list": [5.0, 10.0],
    "set": []
  })");
  const RunResult r = run("theorem2 --config " + cfg_path, "theorem2");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,empirical,limit,abs_error");
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string x, empirical;
    std::getline(fields, x, ',');
    std::getline(fields, empirical, ',');
    CHECK(empirical == "0");
  }
}

TEST_CASE("herglotz subcommand emits the gap table") {
  const std::string cfg_path = kDir + "/herglotz.json";
  write_file(cfg_path, R"({
    "function": {"type": "rational", "poles": [{"location": 1.0, "weight": 1.0}]},
    "set": [[0.0, 2.0]],
    "window": {"lo": -1.0, "hi": 3.0},
    "grid_n": 20000,
    "eps_list": [1.0, 0.1, 0.01]
  })");
  const RunResult r = run("herglotz --config " + cfg_path, "herglotz");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "eps,lhs,rhs,lhs_le_rhs");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.back() == '1');  // lhs <= rhs on every row
  }
  CHECK(rows == 3);
}

TEST_CASE("condition-a subcommand") {
  const std::string cfg_path = kDir + "/conda.json";
  write_file(cfg_path, R"({
    "potential": {"kind": "zero", "a": 0.0},
    "lambda_value": 1.0,
    "M": {"re": 0.0, "im": 1.0},
    "N_list": [10.0, 100.0]
  })");
  const RunResult r = run("condition-a --config " + cfg_path, "conda");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "N,ratio_re,ratio_im,ratio_abs");
  std::getline(lines, line);
  const auto pos = line.rfind(',');
  CHECK(std::stod(line.substr(pos + 1)) <= 0.1);
}

TEST_CASE("bessel oracle dump") {
  const std::string cfg_path = kDir + "/bessel.json";
  write_file(cfg_path, R"({
    "nu": 0.0,
    "x_grid": {"lo": 0.1, "hi": 1000.0, "n": 25, "spacing": "log"}
  })");
  const RunResult r = run("bessel --config " + cfg_path, "bessel");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("x,J,Y,Jprime,Yprime,wronskian_rel_err", 0) == 0);
  CHECK(count_lines(r.output) == 26);
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto pos = line.rfind(',');
    CHECK(std::abs(std::stod(line.substr(pos + 1))) <= 1e-10);
  }
}

TEST_CASE("output lands in --out file byte-identically to stdout") {
  const std::string cfg_path = kDir + "/bessel_small.json";
  write_file(cfg_path, R"({"nu": 1.0, "x_values": [0.5, 5.0, 50.0]})");
  const RunResult to_stdout = run("bessel --config " + cfg_path, "bessel_stdout");
  const std::string out_csv = kDir + "/bessel_file.csv";
  const RunResult to_file =
      run("bessel --config " + cfg_path + " --out " + out_csv, "bessel_file");
  REQUIRE(to_stdout.exit_code == 0);
  REQUIRE(to_file.exit_code == 0);
  CHECK(read_file(out_csv) == to_stdout.output);
}
