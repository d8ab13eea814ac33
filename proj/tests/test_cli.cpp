#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* env = std::getenv("COMPOLS_CLI");
  REQUIRE_MESSAGE(env != nullptr, "COMPOLS_CLI must point at the binary");
  return env;
}

CliResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<double> csv_fields(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
  return vals;
}

const char* kEacInstance = R"({
  "type": "eac", "L": 1.0, "U": 20.0, "weight_cap": 0.01, "horizon": 4,
  "requests": [
    {"a": 0, "d": 1, "e": 0.01, "v": 0.15},
    {"a": 1, "d": 3, "e": 0.005, "v": 0.02},
    {"a": 2, "d": 3, "e": 0.008, "v": 0.1}
  ]
})";

}  // namespace

TEST_CASE("okp df prints the closed form and exits 0") {
  auto res = run_cli("okp df --gamma 20 --alpha 1");
  CHECK(res.exit_code == 0);
  CHECK(res.out == "1\n");
}

TEST_CASE("invalid arguments exit with code 1") {
  CHECK(run_cli("okp df --gamma 20 --alpha -1").exit_code == 1);
  CHECK(run_cli("okp df --gamma 20").exit_code == 1);  // missing required flag
  CHECK(run_cli("nonsense").exit_code == 1);
}

TEST_CASE("missing instance file exits with code 1") {
  auto res = run_cli("osc run --theta 2 --instance definitely_missing.json");
  CHECK(res.exit_code == 1);
}

TEST_CASE("unwritable output path exits with code 2") {
  auto res = run_cli("ski curve --p 5 --out /nonexistent_dir_zz/x.csv");
  CHECK(res.exit_code == 2);
}

TEST_CASE("repeated runs with the same seed are byte-identical") {
  const std::string cmd = "--seed 3 learn --problem ski --phi 1.5 --rounds 5";
  auto a = run_cli(cmd);
  auto b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  auto c = run_cli("--seed 4 learn --problem ski --phi 1.5 --rounds 5");
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("sweeps emit one header line plus one row per grid point") {
  const std::string path = "cli_eac_inst_tmp.json";
  {
    std::ofstream f(path);
    f << kEacInstance;
  }
  auto csv = run_cli("eac sweep --alphas 1:2:3 --instance " + path);
  REQUIRE(csv.exit_code == 0);
  auto rows = lines_of(csv.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "alpha,alg_value,opt_value,ratio");

  auto json = run_cli("--format json eac sweep --alphas 1:2:3 --instance " + path);
  REQUIRE(json.exit_code == 0);
  auto parsed = nlohmann::json::parse(json.out);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 3);

  // The CSV's 12-significant-digit values round-trip against the JSON.
  for (int i = 0; i < 3; ++i) {
    auto fields = csv_fields(rows[i + 1]);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == doctest::Approx(parsed[i]["alpha"].get<double>()).epsilon(1e-10));
    CHECK(fields[1] ==
          doctest::Approx(parsed[i]["alg_value"].get<double>()).epsilon(1e-10));
    CHECK(fields[2] ==
          doctest::Approx(parsed[i]["opt_value"].get<double>()).epsilon(1e-10));
    CHECK(fields[3] == doctest::Approx(parsed[i]["ratio"].get<double>()).epsilon(1e-10));
  }
  std::remove(path.c_str());
}

TEST_CASE("run subcommands report decision tallies") {
  const std::string path = "cli_eac_run_tmp.json";
  {
    std::ofstream f(path);
    f << kEacInstance;
  }
  auto res = run_cli("--format json eac run --alpha 1 --instance " + path);
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j["admits"].get<int>() + j["threshold_rejects"].get<int>() +
            j["capacity_rejects"].get<int>() ==
        3);
  CHECK(j["alg_value"].get<double>() >= 0.0);
  CHECK(j["ratio"].get<double>() >= 1.0 - 1e-9);
  std::remove(path.c_str());
}

TEST_CASE("oracle subcommand labels its answer") {
  const std::string path = "cli_oracle_tmp.json";
  {
    std::ofstream f(path);
    f << kEacInstance;
  }
  auto res = run_cli("oracle eac --instance " + path);
  REQUIRE(res.exit_code == 0);
  auto fields = lines_of(res.out);
  REQUIRE(fields.size() == 1);
  CHECK(fields[0].find("fractional_upper_bound") != std::string::npos);
  std::remove(path.c_str());
}
