#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "moutard/eval.hpp"
#include "moutard/parse.hpp"
#include "testutil.hpp"

using namespace moutard;
using testutil::CliResult;
using testutil::run_cli;
using nlohmann::json;

TEST_CASE("transform prints the new potential and verifies the seed") {
  CliResult res =
      run_cli({"transform", "--potential", "0", "--seed", "r^2-2*z^2"});
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j.contains("u_tilde"));
  CHECK(j["verification"]["max_rel"].get<double>() < 1e-12);
  Expr u_tilde = parse(j["u_tilde"].get<std::string>());
  CHECK(evaluate(u_tilde, 1.0, 1.0, {}) == doctest::Approx(37.0));
  CHECK(res.err.find("seed verified") != std::string::npos);
}

TEST_CASE("transform --out text emits a bare expression") {
  CliResult res = run_cli(
      {"transform", "--potential", "0", "--seed", "r^2-2*z^2", "--out", "text"});
  REQUIRE(res.exit_code == 0);
  std::string line = res.out;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
    line.pop_back();
  CHECK(line.find('\n') == std::string::npos);
  CHECK(evaluate(parse(line), 1.0, 1.0, {}) == doctest::Approx(37.0));
}

TEST_CASE("transform with a parameterized pair") {
  CliResult res = run_cli({"transform", "--potential", "-k^2", "--seed",
                           "sin(k*z)", "--param", "k=1"});
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  Expr u_tilde = parse(j["u_tilde"].get<std::string>());
  // -k^2 + 1/r^2 + 2 k^2 / sin(k z)^2 at (1, pi/2): -1 + 1 + 2.
  CHECK(evaluate(u_tilde, 1.0, 1.5707963267948966, {{"k", 1.0}}) ==
        doctest::Approx(2.0));
}

TEST_CASE("exit codes distinguish failure classes") {
  // Non-solution seed: verification failure.
  CliResult bad_seed = run_cli({"transform", "--potential", "0", "--seed", "r"});
  CHECK(bad_seed.exit_code == 1);
  CHECK(bad_seed.err.find("not a solution") != std::string::npos);
  // Malformed expression: usage/parse error.
  CHECK(run_cli({"transform", "--potential", "0", "--seed", "r^^2"}).exit_code ==
        2);
  // Missing required flag.
  CHECK(run_cli({"transform", "--seed", "r"}).exit_code == 2);
  // Unknown subcommand.
  CHECK(run_cli({"frobnicate"}).exit_code == 2);
  // Unbound parameter.
  CHECK(run_cli({"transform", "--potential", "-k^2", "--seed", "sin(k*z)"})
            .exit_code == 2);
  // Unknown catalog entry.
  CHECK(run_cli({"catalog", "show", "missing-entry"}).exit_code == 2);
  // Invalid grid (axis touching r = 0).
  CliResult bad_grid = run_cli(
      {"scan", "--expr", "r", "--grid", "0:1:10,-1:1:10"});
  CHECK(bad_grid.exit_code == 2);
  CHECK(bad_grid.err.find("1/r") != std::string::npos);
  // --help succeeds.
  CHECK(run_cli({"--help"}).exit_code == 0);
}

TEST_CASE("solve emits fixed-format CSV and honors the basepoint") {
  CliResult res =
      run_cli({"solve", "--potential", "0", "--seed", "r^2-2*z^2",
               "--solution", "z", "--base", "1,0", "--at", "1,1"});
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string header, row;
  REQUIRE(std::getline(lines, header));
  CHECK(header == "r,z,value");
  REQUIRE(std::getline(lines, row));
  double r, z, v;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &r, &z, &v) == 3);
  CHECK(r == doctest::Approx(1.0));
  CHECK(z == doctest::Approx(1.0));
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve over a grid is deterministic across thread counts") {
  std::vector<std::string> args{
      "solve",  "--potential", "0",     "--seed", "r^2-2*z^2",
      "--solution", "z",       "--base", "1,0",   "--grid",
      "0.5:2:7,0.1:0.9:5"};
  CliResult serial = run_cli(args, "MOUTARD_THREADS=1");
  CliResult parallel = run_cli(args, "MOUTARD_THREADS=8");
  REQUIRE(serial.exit_code == 0);
  REQUIRE(parallel.exit_code == 0);
  CHECK(serial.out == parallel.out);
  // 17-significant-digit formatting: re-parsing a row reproduces the bytes.
  std::istringstream lines(serial.out);
  std::string header;
  std::getline(lines, header);
  int rows = 0;
  for (std::string row; std::getline(lines, row); ++rows) {
    double r, z, v;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &r, &z, &v) == 3);
    char buffer[128];
    std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g", r, z, v);
    CHECK(row == buffer);
  }
  CHECK(rows == 7 * 5);
}

TEST_CASE("solve refuses an invalid solution and a separated target") {
  // --solution that does not solve the potential: verification failure.
  CliResult bad = run_cli({"solve", "--potential", "0", "--seed", "r^2-2*z^2",
                           "--solution", "r", "--at", "1,1"});
  CHECK(bad.exit_code == 1);
  // Cone-separated target with the second-stage seed: numerical failure.
  CliResult separated = run_cli(
      {"solve", "--potential",
       "(4*z^4 + 13*r^4 + 20*r^2*z^2)/((r^2-2*z^2)^2*r^2)", "--seed",
       "(4*r^2*z^2 + r^4 + C1)/(r*(r^2-2*z^2))", "--solution",
       "r*z/((r^2-2*z^2)*sqrt(r^2+z^2))", "--param", "C1=1", "--base",
       "1,0.1", "--at", "1,1"});
  CHECK(separated.exit_code == 3);
  CHECK(separated.err.find("path") != std::string::npos);
}

TEST_CASE("verify reports pass/fail with a residual report") {
  CliResult ok = run_cli({"verify", "--potential", "-k^2", "--solution",
                          "sin(k*z)", "--param", "k=1.5"});
  REQUIRE(ok.exit_code == 0);
  json j = json::parse(ok.out);
  CHECK(j["passed"].get<bool>());
  CHECK(j["max_rel"].get<double>() < 1e-12);
  CHECK(j["n_evaluated"].get<long>() > 0);

  CliResult fail =
      run_cli({"verify", "--potential", "0", "--solution", "r"});
  CHECK(fail.exit_code == 1);
  CHECK_FALSE(json::parse(fail.out)["passed"].get<bool>());
}

TEST_CASE("scan summarizes an expression over a grid") {
  CliResult res = run_cli(
      {"scan", "--expr",
       "(-8*r^2*((r^2-5*z^2)^2 - 33*z^4) - 8*C1*(5*r^2+2*z^2))"
       "/(4*r^2*z^2+r^4+C1)^2",
       "--param", "C1=1", "--grid", "0.05:5:100,-5:5:100"});
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["all_finite"].get<bool>());
  CHECK(j["n_evaluated"].get<long>() == 10000);
  CHECK(j["n_skipped"].get<long>() == 0);
  CHECK(j["min"].get<double>() < 0.0);
  CHECK(j["sign_changes"].get<long>() > 0);
}

TEST_CASE("chain runs a two-stage config and reports each stage") {
  const char* config = R"json({
    "u0": "0",
    "steps": [
      {"y_h": "r^2 - 2*z^2"},
      {"carry": "point_source"},
      {"y_h": "(4*r^2*z^2 + r^4 + C1)/(r*(r^2-2*z^2))"}
    ],
    "seeds": {"point_source": "1/sqrt(r^2+z^2)"},
    "params": {"C1": 1.0},
    "basepoint": [1.0, 0.0],
    "carried_grid": "0.8:2:10,0.15:0.45:10",
    "tolerances": {"residual": 1e-7, "quadrature": 1e-9, "equality": 1e-9}
  })json";
  std::string path = "/tmp/moutard_test_chain_config.json";
  {
    std::ofstream out(path);
    out << config;
  }
  CliResult res = run_cli({"chain", "--config", path});
  std::remove(path.c_str());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  REQUIRE(j["steps"].size() == 2);
  // Final potential: printed form evaluates to -12 at (1, 0) with C1 = 1.
  Expr final_u = parse(j["steps"][1]["u_tilde"].get<std::string>());
  CHECK(evaluate(final_u, 1.0, 0.0, {{"C1", 1.0}}) == doctest::Approx(-12.0));
  REQUIRE(j["carried"].size() == 1);
  CHECK(j["carried"][0]["name"] == "point_source");
  for (const json& report : j["carried"][0]["stage_reports"])
    CHECK(report["max_rel"].get<double>() < 1e-6);
}

TEST_CASE("chain rejects malformed configs with exit 2") {
  auto write_and_run = [](const std::string& body) {
    std::string path = "/tmp/moutard_test_bad_config.json";
    {
      std::ofstream out(path);
      out << body;
    }
    CliResult res = run_cli({"chain", "--config", path});
    std::remove(path.c_str());
    return res;
  };
  CHECK(write_and_run("not json at all").exit_code == 2);
  CHECK(write_and_run(R"({"steps": [{"y_h": "r"}]})").exit_code == 2);
  CHECK(write_and_run(R"({"u0": "0", "steps": []})").exit_code == 2);
  CHECK(write_and_run(R"({"u0": "0", "steps": [{"carry": "ghost"}]})")
            .exit_code == 2);
  CHECK(write_and_run(R"({"u0": "0", "steps": [{"y_h": "r"}], "zzz": 1})")
            .exit_code == 2);
}

TEST_CASE("catalog list and show expose the fixture data") {
  CliResult list = run_cli({"catalog", "list"});
  REQUIRE(list.exit_code == 0);
  json entries = json::parse(list.out);
  CHECK(entries.size() == 8);
  CHECK(entries[0]["name"] == "trivial-pair");

  CliResult show = run_cli({"catalog", "show", "ex2-second"});
  REQUIRE(show.exit_code == 0);
  json entry = json::parse(show.out);
  CHECK(entry["expected_is_trivial_partner"].get<bool>());
  CHECK(entry["params"]["C2"].get<double>() == 5.0);
}

TEST_CASE("catalog verify --all passes on a correct build") {
  CliResult res = run_cli({"catalog", "verify", "--all"});
  REQUIRE(res.exit_code == 0);
  json reports = json::parse(res.out);
  CHECK(reports.size() == 8);
  for (const json& report : reports) CHECK(report["passed"].get<bool>());
}

TEST_CASE("seed expressions can come from a file") {
  std::string path = "/tmp/moutard_test_seed.txt";
  {
    std::ofstream out(path);
    out << "r^2-2*z^2\n";
  }
  CliResult res =
      run_cli({"transform", "--potential", "0", "--seed-file", path});
  std::remove(path.c_str());
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["y_h"].get<std::string>().find("2*z^2") != std::string::npos);
}
