#include <doctest.h>

#include <sstream>

#include "rumor/io.hpp"

using namespace rumor;

TEST_CASE("config: round-trips exactly through write/parse") {
  RunSetup s;
  s.params.k = 3;
  s.params.nu = 0.123456789012345;
  s.params.delta = 0.05;
  s.params.beta = 0.775;
  s.params.y = 0.9125;
  s.params.c = 0.0375;
  s.params.gamma = 0.25;
  s.xbar = 0.3;
  s.fn = "exp_cap";
  std::istringstream in(write_config(s));
  const RunSetup r = parse_config(in);
  CHECK(r.params.k == s.params.k);
  CHECK(r.params.nu == s.params.nu);
  CHECK(r.params.delta == s.params.delta);
  CHECK(r.params.beta == s.params.beta);
  CHECK(r.params.y == s.params.y);
  CHECK(r.params.c == s.params.c);
  CHECK(r.params.gamma == s.params.gamma);
  CHECK(r.xbar == s.xbar);
  CHECK(r.fn == s.fn);
}

TEST_CASE("config: comments, blanks, and errors") {
  std::istringstream ok("# comment\n\n  y = 0.9  # trailing\nbeta=0.7\n");
  const RunSetup s = parse_config(ok);
  CHECK(s.params.y == 0.9);
  CHECK(s.params.beta == 0.7);

  std::istringstream unknown("zeta = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
  std::istringstream noeq("beta 0.7\n");
  CHECK_THROWS_AS(parse_config(noeq), std::invalid_argument);
  std::istringstream badnum("beta = 0.7x\n");
  CHECK_THROWS_AS(parse_config(badnum), std::invalid_argument);
}

TEST_CASE("config: technology construction") {
  RunSetup s;
  s.xbar = 0.3;
  CHECK(s.technology().cap == 0.3);
  s.fn = "quadratic";
  CHECK_THROWS_AS(s.technology(), std::invalid_argument);
}

TEST_CASE("trajectory csv: schema and LF endings") {
  ModelParams p;
  const auto res = integrate(PrevalenceState{0.01, 0.005, 0.005}, p, 0.0, 0.0, 5.0, 0.1);
  std::ostringstream out;
  write_trajectory_csv(out, res);
  const std::string text = out.str();
  CHECK(text.rfind("t,rho00,rho01,rho11,rho0,rho1,iota\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == res.trajectory.size() + 1);
}

TEST_CASE("solution csv: header and field count") {
  CHECK(std::string(solution_csv_header()) ==
        "y,c,beta,gamma,xbar,l,h,kind,ttr,L,H,cond_y_ok,residual,multiplicity");
  ModelParams p;
  p.y = 0.94;
  p.c = 0.04;
  p.beta = 0.7;
  const auto sol = solve_equilibrium(p, make_exponential_capped(1.0));
  const std::string row = solution_csv_row(sol, p, 1.0);
  size_t commas = 0;
  for (char ch : row) commas += ch == ',';
  CHECK(commas == 13);
  CHECK(row.find("OpposingOnly") != std::string::npos);
}

TEST_CASE("abm csv: seed header comment and summary schema") {
  ModelParams p;
  p.k = 4;
  p.nu = 0.05;
  const auto runs = run_abm_ensemble(p, 0, 0, 1000, 0.25, 5.0, {9, 10});
  std::ostringstream out;
  write_abm_csv(out, runs, p, 1000);
  const std::string text = out.str();
  CHECK(text.rfind("# abm rng=xoshiro256**", 0) == 0);
  CHECK(text.find("seeds=9 10") != std::string::npos);
  CHECK(text.find("t,rho0,rho1,iota,seed\n") != std::string::npos);

  std::ostringstream sum;
  write_abm_summary_csv(sum, summarize(runs));
  CHECK(sum.str().rfind("t,rho0_mean,rho0_sd,rho1_mean,rho1_sd,iota_mean,iota_sd,n_seeds\n",
                        0) == 0);
}

TEST_CASE("ppm: P6 layout") {
  std::ostringstream out;
  write_ppm(out, 2, 2, std::vector<Rgb>{{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {1, 2, 3}});
  const std::string text = out.str();
  CHECK(text.rfind("P6\n2 2\n255\n", 0) == 0);
  CHECK(text.size() == std::string("P6\n2 2\n255\n").size() + 12);
  CHECK_THROWS_AS(write_ppm(out, 3, 2, std::vector<Rgb>(4)), std::invalid_argument);
}

TEST_CASE("case colors: invalid region is white, cases are distinct") {
  CHECK(case_color(ExpCase::Invalid).r == 255);
  CHECK(case_color(ExpCase::Invalid).g == 255);
  CHECK(case_color(ExpCase::Invalid).b == 255);
  const Rgb a = case_color(ExpCase::II);
  const Rgb b = case_color(ExpCase::IV);
  CHECK((a.r != b.r || a.g != b.g || a.b != b.b));
}
