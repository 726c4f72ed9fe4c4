#include <doctest.h>

#include <cmath>

#include "rumor/abm.hpp"
#include "rumor/steady_state.hpp"

using namespace rumor;

namespace {
ModelParams abm_params(double beta = 0.6, double gamma = 0.0) {
  ModelParams p;
  p.k = 4;
  p.nu = 0.05;
  p.delta = 0.1;  // lambda k = 2
  p.beta = beta;
  p.gamma = gamma;
  return p;
}
}  // namespace

TEST_CASE("abm: population bookkeeping") {
  const AgentPopulation pop(1000, 0.25);
  CHECK(pop.partisans_per_group == 125);
  CHECK(pop.group_of(0) == 0);
  CHECK(pop.group_of(499) == 0);
  CHECK(pop.group_of(500) == 1);
  CHECK(pop.is_partisan(0));
  CHECK(pop.is_partisan(500));
  CHECK_FALSE(pop.is_partisan(499));
  CHECK_THROWS_AS(AgentPopulation(999, 0.0), std::invalid_argument);
}

TEST_CASE("abm: preconditions and warnings") {
  const ModelParams p = abm_params();
  CHECK_THROWS_AS(run_abm(p, 0, 0, 2000, 1.0, 10.0, 1), std::invalid_argument);  // k nu dt
  CHECK_THROWS_AS(run_abm(p, 0, 0, 2001, 0.25, 10.0, 1), std::invalid_argument); // odd n
  CHECK_THROWS_AS(run_abm(p, -0.1, 0, 2000, 0.25, 10.0, 1), std::invalid_argument);
  const auto small = run_abm(p, 0, 0, 500, 0.25, 5.0, 1);
  CHECK_FALSE(small.warnings.empty());
}

TEST_CASE("abm: no transmission keeps prevalences at the seed level") {
  ModelParams p = abm_params();
  p.nu = 0.0;
  p.delta = 1e-12;  // effectively no deaths either
  const auto res = run_abm(p, 0, 0, 2000, 0.25, 20.0, 7);
  CHECK(res.terminal.iota == doctest::Approx(res.series.front().iota));
  CHECK(res.terminal.rho0 == doctest::Approx(res.series.front().rho0));
}

TEST_CASE("abm: bit-reproducible given the seed") {
  const ModelParams p = abm_params();
  const auto a = run_abm(p, 0.2, 0.5, 2000, 0.25, 50.0, 42);
  const auto b = run_abm(p, 0.2, 0.5, 2000, 0.25, 50.0, 42);
  CHECK(a.terminal.rho0 == b.terminal.rho0);
  CHECK(a.terminal.rho1 == b.terminal.rho1);
  CHECK(a.final_status == b.final_status);
  const auto c = run_abm(p, 0.2, 0.5, 2000, 0.25, 50.0, 43);
  CHECK(a.final_status != c.final_status);
}

TEST_CASE("abm: group 0 never holds the rumor") {
  const auto res = run_abm(abm_params(0.8), 0.1, 0.3, 4000, 0.25, 200.0, 11);
  for (int i = 0; i < 2000; ++i) CHECK(res.final_status[i] != 2);
}

TEST_CASE("abm: endemic level approaches the mean-field informed share") {
  const ModelParams p = abm_params();
  const std::vector<uint64_t> seeds{1, 2, 3};
  const auto runs = run_abm_ensemble(p, 0.0, 0.0, 4000, 0.25, 1000.0, seeds);
  double mean_iota = 0.0;
  for (const auto& r : runs) mean_iota += r.terminal.iota / runs.size();
  CHECK(std::abs(mean_iota - 0.5) < 0.04);
}

TEST_CASE("abm: mean-field bias shrinks with population size") {
  const ModelParams p = abm_params();
  const std::vector<uint64_t> seeds{5, 6, 7, 8};
  // estimate the stationary level from the tail of each run to keep the
  // comparison out of the step-to-step noise
  auto bias = [&](int n) {
    const auto runs = run_abm_ensemble(p, 0.2, 0.5, n, 0.25, 1000.0, seeds);
    const SteadyState ss = steady_prevalence(0.2, 0.5, p);
    double mean = 0.0;
    for (const auto& r : runs) {
      const size_t tail = r.series.size() / 4;
      double acc = 0.0;
      for (size_t i = r.series.size() - tail; i < r.series.size(); ++i)
        acc += r.series[i].iota;
      mean += acc / tail / runs.size();
    }
    return std::abs(mean - ss.iota);
  };
  const double small_n = bias(2000);
  const double large_n = bias(20000);
  CHECK(large_n <= small_n + 1e-12);
}

TEST_CASE("abm: partisan population matches the partisan closed form") {
  const ModelParams p = abm_params(0.6, 0.4);
  const std::vector<uint64_t> seeds{21, 22};
  const auto runs = run_abm_ensemble(p, 0.3, 0.6, 10000, 0.25, 1000.0, seeds);
  const SteadyState ss = partisan_steady_prevalence(0.3, 0.6, p);
  double rho0 = 0.0, rho1 = 0.0;
  for (const auto& r : runs) {
    rho0 += r.terminal.rho0 / runs.size();
    rho1 += r.terminal.rho1 / runs.size();
  }
  CHECK(std::abs(rho0 - ss.rho0) < 0.04);
  CHECK(std::abs(rho1 - ss.rho1) < 0.04);
}

TEST_CASE("abm: summary aligns replicas and reports dispersion") {
  const ModelParams p = abm_params();
  const auto runs = run_abm_ensemble(p, 0.0, 0.0, 2000, 0.25, 50.0, {1, 2, 3, 4});
  const auto rows = summarize(runs);
  REQUIRE(rows.size() == runs.front().series.size());
  CHECK(rows.front().n_seeds == 4);
  for (const auto& row : rows) {
    CHECK(row.iota_mean >= 0.0);
    CHECK(row.iota_sd >= 0.0);
  }
  auto broken = runs;
  broken.back().series.pop_back();
  CHECK_THROWS_AS(summarize(broken), std::invalid_argument);
}
