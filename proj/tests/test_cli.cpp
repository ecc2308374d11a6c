// End-to-end checks of the CLI binary: determinism of outputs, header
// embedding, tabulation certification, and the crosscheck exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

std::string cli_path() {
  const char* p = std::getenv("HLPT_CLI");
  return p ? p : "./hlpt";
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate: deterministic files, embedded config, summary") {
  REQUIRE(run("simulate --b 0.5 --rho 1 --nu 4 --t 5 --replicas 8 --seed 42 "
              "--out /tmp/hlpt_sim_a.csv") == 0);
  REQUIRE(run("simulate --b 0.5 --rho 1 --nu 4 --t 5 --replicas 8 --seed 42 "
              "--out /tmp/hlpt_sim_b.csv") == 0);
  const std::string a = slurp("/tmp/hlpt_sim_a.csv");
  CHECK(a == slurp("/tmp/hlpt_sim_b.csv"));  // same seed, identical file
  CHECK(a.find("# version:") != std::string::npos);
  CHECK(a.find("# config:") != std::string::npos);
  CHECK(a.find("seed,t,x,N_x,boundary_touched") != std::string::npos);
  CHECK(a.find("# summary:") != std::string::npos);

  // config line is valid JSON carrying the resolved parameters
  std::istringstream is(a);
  std::string line;
  std::getline(is, line);  // version
  std::getline(is, line);  // config
  const auto cfg = nlohmann::json::parse(line.substr(line.find('{')));
  CHECK(cfg["seed"].get<int>() == 42);
  CHECK(cfg["window"].get<long long>() > 20);
}

TEST_CASE("simulate: zero replicas emits a header-only table") {
  REQUIRE(run("simulate --replicas 0 --t 2 --out /tmp/hlpt_sim0.csv") == 0);
  const std::string s = slurp("/tmp/hlpt_sim0.csv");
  CHECK(s.find("seed,t,x,N_x,boundary_touched") != std::string::npos);
  CHECK(s.find("\n0,") == std::string::npos);  // no data rows
}

TEST_CASE("tabulate gauss: certified monotone column and the median") {
  REQUIRE(run("tabulate --dist gauss --smin -2 --smax 2 --step 0.5 "
              "--out /tmp/hlpt_tab.csv") == 0);
  const std::string s = slurp("/tmp/hlpt_tab.csv");
  CHECK(s.find("s,F,certified") != std::string::npos);
  // F(0) = 0.5 up to quadrature tolerance
  const auto at = s.find("\n0,");
  REQUIRE(at != std::string::npos);
  const double f0 = std::stod(s.substr(at + 3));
  CHECK(std::abs(f0 - 0.5) < 1e-6);
}

TEST_CASE("crosscheck transition exits zero") {
  CHECK(run("crosscheck --kind transition --b 0.5 --t 1") == 0);
}

TEST_CASE("crosscheck qlaplace t=0 exact branch") {
  CHECK(run("crosscheck --kind qlaplace --t 0 --rho 1 --x 4") == 0);
  CHECK(run("crosscheck --kind moment --t 0 --rho 0.5 --x 4") == 0);
}

TEST_CASE("crosscheck moment against Monte Carlo (reduced replicas)") {
  CHECK(run("crosscheck --kind moment --t 1 --rho 1 --x 5 --replicas 200000 "
            "--seed 7") == 0);
}

TEST_CASE("config file provides defaults and flags win") {
  {
    std::ofstream os("/tmp/hlpt_cfg.json");
    os << R"({"replicas": 4, "t": 3.0, "seed": 9})";
  }
  REQUIRE(run("--config /tmp/hlpt_cfg.json simulate --t 5 "
              "--out /tmp/hlpt_sim_cfg.csv") == 0);
  const std::string s = slurp("/tmp/hlpt_sim_cfg.csv");
  const auto cfg = nlohmann::json::parse(
      s.substr(s.find("# config:") + 9, s.find('\n', s.find("# config:")) -
                                            s.find("# config:") - 9));
  CHECK(cfg["replicas"].get<int>() == 4);   // from config file
  CHECK(cfg["seed"].get<int>() == 9);       // from config file
  CHECK(cfg["t"].get<double>() == 5.0);     // flag wins
}

TEST_CASE("unknown kind is a usage error") {
  CHECK(run("crosscheck --kind bogus") != 0);
}
