#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"

using Catch::Matchers::WithinAbs;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + FINSLER_CLI_PATH + "\" " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("series subcommand prints exact coefficients") {
  const Run r = run("series --order 3");
  REQUIRE(r.rc == 0);
  CHECK(r.out == "k,coefficient,value\n1,1,1\n2,0,0\n3,-1/5,-0.2\n");
}

TEST_CASE("cosmo hubble JSON output") {
  const Run r = run("--format json cosmo hubble --xi 0.1,0.5");
  REQUIRE(r.rc == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "cosmo hubble");
  REQUIRE(j["rows"].size() == 2);
  const auto& row = j["rows"][0];
  for (const char* key : {"xi", "r", "H", "H_over_H0", "H_over_H0_quadratic"}) CHECK(row.contains(key));
  CHECK_THAT(row["H_over_H0_quadratic"].get<double>(), WithinAbs(0.998, 1e-12));
  CHECK_THAT(row["H_over_H0"].get<double>(), WithinAbs(0.998, 5e-5));
}

TEST_CASE("cosmo integrate columns") {
  const Run r = run("cosmo integrate --xi-max 0.5 --samples 11");
  REQUIRE(r.rc == 0);
  CHECK(r.out.rfind("xi,phi,dphi_dxi,psi,H_over_H0\n", 0) == 0);
}

TEST_CASE("volume subcommand") {
  const Run r = run("--format json volume --kind conformal --space pseudo --n 4 --kappa 2");
  REQUIRE(r.rc == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK_THAT(j["rows"][0]["volume"].get<double>(), WithinAbs(1.0 / 16.0, 1e-15));
}

TEST_CASE("output and summary files") {
  const Run r = run("-o cli_series.csv --summary cli_series.json series --order 3");
  REQUIRE(r.rc == 0);
  CHECK(r.out.empty());
  CHECK(slurp("cli_series.csv").find("3,-1/5,-0.2") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("cli_series.json"));
  CHECK(j["summary"]["coefficients"] == "1, 0, -1/5");
}

TEST_CASE("invalid input exits with status 2") {
  CHECK(run("").rc == 2);
  CHECK(run("series --order nope").rc == 2);
  CHECK(run("--format xml series").rc == 2);
  CHECK(run("volume --kind regularized --q0 0").rc == 2);
  CHECK(run("geodesic --family nowhere").rc == 2);
}

TEST_CASE("seeded runs are reproducible") {
  const Run a = run("--format json volume --kind ellipsoid --n 4 --count 5 --seed 11");
  const Run b = run("--format json volume --kind ellipsoid --n 4 --count 5 --seed 11");
  const Run c = run("--format json volume --kind ellipsoid --n 4 --count 5 --seed 12");
  REQUIRE(a.rc == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}
