#include <doctest.h>

#include <cmath>

#include "rumor/dynamics.hpp"
#include "rumor/steady_state.hpp"

using namespace rumor;

namespace {
ModelParams with_lk(double lk, double beta = 0.6) {
  ModelParams p;
  p.delta = 0.1;
  p.k = 1;
  p.nu = lk * p.delta;
  p.beta = beta;
  return p;
}
}  // namespace

TEST_CASE("information prevalence: endemic threshold") {
  CHECK(information_prevalence(with_lk(2.0)) == doctest::Approx(0.5));
  CHECK(information_prevalence(with_lk(1.0)) == 0.0);
  CHECK(information_prevalence(with_lk(4.0)) == doctest::Approx(0.75));
  CHECK(information_prevalence(with_lk(0.5)) == 0.0);
}

TEST_CASE("steady prevalence: zero verification splits evenly") {
  const SteadyState ss = steady_prevalence(0.0, 0.0, with_lk(2.0));
  CHECK(ss.rho0 == doctest::Approx(0.25));
  CHECK(ss.rho1 == doctest::Approx(0.25));
  CHECK(ss.ttr == doctest::Approx(1.0));
}

TEST_CASE("steady prevalence: pinned interior point") {
  const SteadyState ss = steady_prevalence(0.2, 0.5, with_lk(2.0, 0.6));
  CHECK(ss.rho0 == doctest::Approx(0.347560975609756).epsilon(1e-12));
  CHECK(ss.rho1 == doctest::Approx(0.152439024390244).epsilon(1e-12));
  CHECK(ss.state.rho00 == doctest::Approx(0.5));
  CHECK(ss.state.rho01 == doctest::Approx(2 * ss.rho0 - 0.5).epsilon(1e-12));
  CHECK(ss.state.rho11 == doctest::Approx(2 * ss.rho1).epsilon(1e-12));
}

TEST_CASE("steady prevalence: full verification of opposing messages kills the rumor") {
  const SteadyState ss = steady_prevalence(0.3, 1.0, with_lk(2.0, 0.8));
  CHECK(ss.rho1 == 0.0);
  CHECK(ss.ttr_infinite);
  CHECK(std::isinf(ss.ttr));
}

TEST_CASE("steady prevalence: components sum to the informed share") {
  for (double lk : {1.5, 2.0, 3.7}) {
    for (double l : {0.0, 0.3, 0.8}) {
      for (double h : {0.0, 0.5, 0.9}) {
        for (double beta : {0.5, 0.75, 0.95}) {
          const SteadyState ss = steady_prevalence(l, h, with_lk(lk, beta));
          CHECK(std::abs(ss.rho0 + ss.rho1 - ss.iota) < 1e-12);
          CHECK(ss.rho0 >= ss.rho1 - 1e-15);
          if (l > 0.0 || h > 0.0) CHECK(ss.rho0 > ss.rho1);
        }
      }
    }
  }
}

TEST_CASE("truth-to-rumor ratio: closed form") {
  CHECK(truth_to_rumor(0.0, 0.0, 0.77) == doctest::Approx(1.0));
  CHECK(truth_to_rumor(0.5, 0.5, 0.3) == doctest::Approx(3.0));
  CHECK(truth_to_rumor(0.5, 0.5, 0.9) == doctest::Approx(3.0));
  CHECK(truth_to_rumor(0.2, 0.5, 0.6) == doctest::Approx(2.28).epsilon(1e-12));
  CHECK(std::isinf(truth_to_rumor(0.2, 1.0, 0.6)));
}

TEST_CASE("truth-to-rumor ratio: independent of diffusion intensity") {
  double ref = -1.0;
  for (double lk : {1.2, 2.0, 3.0, 4.8}) {
    for (int k : {1, 2, 5}) {
      ModelParams p = with_lk(lk, 0.7);
      p.k = k;
      p.nu = lk * p.delta / k;
      const SteadyState ss = steady_prevalence(0.1, 0.6, p);
      const double ttr = ss.rho0 / ss.rho1;
      if (ref < 0.0) ref = ttr;
      CHECK(ttr == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("truth-to-rumor ratio: monotone in both verification rates") {
  const ModelParams p = with_lk(2.0, 0.8);
  double prev = 0.0;
  for (double l = 0.0; l <= 0.6001; l += 0.1) {
    const SteadyState ss = steady_prevalence(l, 0.65, p);
    const double r = ss.rho0 / ss.rho1;
    CHECK(r > prev);
    prev = r;
  }
  prev = 0.0;
  for (double h = 0.1; h <= 0.9001; h += 0.1) {
    const SteadyState ss = steady_prevalence(0.05, h, p);
    const double r = ss.rho0 / ss.rho1;
    CHECK(r > prev);
    prev = r;
  }
  // rho0 rises and rho1 falls in each rate
  CHECK(steady_prevalence(0.3, 0.5, p).rho0 > steady_prevalence(0.1, 0.5, p).rho0);
  CHECK(steady_prevalence(0.3, 0.5, p).rho1 < steady_prevalence(0.1, 0.5, p).rho1);
  CHECK(steady_prevalence(0.1, 0.7, p).rho0 > steady_prevalence(0.1, 0.5, p).rho0);
  CHECK(steady_prevalence(0.1, 0.7, p).rho1 < steady_prevalence(0.1, 0.5, p).rho1);
}

TEST_CASE("truth-to-rumor ratio: homophily hurts iff opposing messages are verified more") {
  const double db = 1e-6;
  auto dttr_dbeta = [&](double l, double h, double beta) {
    return (truth_to_rumor(l, h, beta + db) - truth_to_rumor(l, h, beta - db)) / (2 * db);
  };
  CHECK(dttr_dbeta(0.2, 0.5, 0.7) < 0.0);
  CHECK(dttr_dbeta(0.4, 0.4, 0.7) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(dttr_dbeta(0.5, 0.2, 0.7) > 0.0);  // exogenous l > h flips the sign
}

TEST_CASE("stability: numeric eigenvalues match the analytic rule") {
  const StabilityReport endemic = stability_classify(with_lk(2.0));
  CHECK(endemic.kind == StabilityKind::ZeroUnstablePositiveStable);
  CHECK(endemic.agrees_analytic);
  CHECK(endemic.max_re_zero > 0.0);
  CHECK(endemic.max_re_positive < 0.0);

  const StabilityReport dying = stability_classify(with_lk(0.8));
  CHECK(dying.kind == StabilityKind::ZeroStable);
  CHECK(dying.agrees_analytic);
  CHECK(dying.max_re_zero < 0.0);

  const StabilityReport rates = stability_classify(with_lk(2.0), 0.2, 0.5);
  CHECK(rates.kind == StabilityKind::ZeroUnstablePositiveStable);
  CHECK(rates.agrees_analytic);
}

TEST_CASE("integration reaches the closed form on random draws") {
  uint64_t s = 99;
  auto next = [&s] {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  };
  for (int i = 0; i < 10; ++i) {
    const double lk = 1.2 + 3.8 * next();
    const double beta = 0.05 + 0.9 * next();
    const double l = 0.9 * next();
    const double h = 0.9 * next();
    const ModelParams p = with_lk(lk, beta);
    const SteadyState ss = steady_prevalence(l, h, p);
    const auto res = integrate(PrevalenceState{0.01, 0.005, 0.005}, p, l, h, 4000.0, 0.0);
    CHECK(std::abs(res.terminal.rho00 - ss.state.rho00) < 1e-6);
    CHECK(std::abs(res.terminal.rho01 - ss.state.rho01) < 1e-6);
    CHECK(std::abs(res.terminal.rho11 - ss.state.rho11) < 1e-6);
  }
}

TEST_CASE("partisan steady state: reductions and effective-rate identity") {
  ModelParams p = with_lk(2.0, 0.6);
  p.gamma = 0.0;
  const SteadyState base = steady_prevalence(0.2, 0.5, p);
  const SteadyState same = partisan_steady_prevalence(0.2, 0.5, p);
  CHECK(same.rho0 == doctest::Approx(base.rho0).epsilon(1e-14));
  CHECK(same.rho1 == doctest::Approx(base.rho1).epsilon(1e-14));

  p.gamma = 0.5;
  const SteadyState noverif = partisan_steady_prevalence(0.0, 0.0, p);
  CHECK(noverif.rho0 == doctest::Approx(0.25));
  CHECK(noverif.rho1 == doctest::Approx(0.25));

  p.gamma = 0.3;
  const SteadyState part = partisan_steady_prevalence(0.2, 0.5, p);
  ModelParams q = p;
  q.gamma = 0.0;
  const SteadyState eff = steady_prevalence(0.7 * 0.2, 0.7 * 0.5, q);
  CHECK(part.rho0 == doctest::Approx(eff.rho0).epsilon(1e-14));
  CHECK(part.rho1 == doctest::Approx(eff.rho1).epsilon(1e-14));
}

TEST_CASE("steady prevalence: rejects invalid rates") {
  CHECK_THROWS_AS(steady_prevalence(-0.1, 0.5, with_lk(2.0)), std::invalid_argument);
  CHECK_THROWS_AS(steady_prevalence(0.1, 1.5, with_lk(2.0)), std::invalid_argument);
}
