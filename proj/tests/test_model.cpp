#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "rumor/params.hpp"
#include "rumor/verification.hpp"

using namespace rumor;

TEST_CASE("params: validation rejects out-of-range fields") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());

  ModelParams bad = p;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.nu = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.delta = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.beta = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.y = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.y = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.c = -1e-9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("params: effective diffusion rate and step budget") {
  ModelParams p;
  p.nu = 0.2;
  p.delta = 0.1;
  p.k = 1;
  CHECK(p.lambda() == doctest::Approx(2.0));
  CHECK(p.lambda_k() == doctest::Approx(2.0));
  CHECK(p.step_ok(0.1));
  CHECK_FALSE(p.step_ok(10.0));
}

TEST_CASE("params: heterophilous beta is flagged, not rejected") {
  ModelParams p;
  p.beta = 0.3;
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.warnings().empty());
  p.beta = 0.7;
  CHECK(p.warnings().empty());
}

TEST_CASE("exponential technology: construction and inverse marginal corners") {
  CHECK_THROWS_AS(make_exponential_capped(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_exponential_capped(1.2), std::invalid_argument);
  CHECK_THROWS_AS(make_exponential_capped(-0.3), std::invalid_argument);

  const auto nocap = make_exponential_capped(1.0);
  CHECK(nocap.inverse_marginal(0.4) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(nocap.inverse_marginal(1.5) == 0.0);
  CHECK(nocap.origin_marginal == 1.0);

  const auto capped = make_exponential_capped(0.3);
  CHECK(capped.inverse_marginal(0.5) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(capped.inverse_marginal(1.5) == 0.0);
  CHECK(capped.inverse_marginal(capped.origin_marginal) == 0.0);
  CHECK(capped.inverse_marginal(1e-12) == doctest::Approx(0.3));

  // effort below cap evaluates the exponential, above it sticks at the cap
  CHECK(capped.eval(0.1) == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-12));
  CHECK(capped.eval(5.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(capped.eval(-1.0), std::invalid_argument);
}

TEST_CASE("exponential technology: marginal-at-level identity g(1-v) = v") {
  const auto fn = make_exponential_capped(0.85);
  for (double v = 0.01; v < 0.85; v += 0.05)
    CHECK(fn.inverse_marginal(1.0 - v) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("validate_h1: accepts the exponential family") {
  CHECK(validate_h1(make_exponential_capped(0.3), 100).pass());
  CHECK(validate_h1(make_exponential_capped(1.0), 1000).pass());
  CHECK_THROWS_AS(validate_h1(make_exponential_capped(0.3), 2), std::invalid_argument);
}

TEST_CASE("validate_h1: rejects degenerate and non-concave technologies") {
  VerificationFunction flat = make_exponential_capped(0.5);
  flat.eval = [](double) { return 0.0; };
  const auto rep = validate_h1(flat, 64);
  CHECK_FALSE(rep.pass());

  VerificationFunction convex = make_exponential_capped(1.0);
  convex.eval = [](double a) { return std::min(1.0, a * a / 100.0); };
  CHECK_FALSE(validate_h1(convex, 200).pass());

  VerificationFunction nan_fn = make_exponential_capped(1.0);
  nan_fn.eval = [](double a) { return a > 1.0 ? std::nan("") : 1.0 - std::exp(-a); };
  CHECK_FALSE(validate_h1(nan_fn, 64).pass());
}

TEST_CASE("inverse marginal agrees with brute-force payoff maximization") {
  // the response g(c / (1 - P)) must reproduce the argmax of
  // x(a) + (1 - x(a)) P - c a over effort
  const auto nocap = make_exponential_capped(1.0);
  for (double P : {0.60, 0.7759, 0.9489}) {
    for (double c : {0.04, 0.10, 0.30}) {
      const double via_g = nocap.inverse_marginal(c / (1.0 - P));
      const double brute = oracle::best_level_bruteforce(P, c, 1.0);
      CHECK(via_g == doctest::Approx(brute).epsilon(5e-6));
    }
  }
  const auto capped = make_exponential_capped(0.3);
  CHECK(capped.inverse_marginal(0.02 / 0.1) ==
        doctest::Approx(oracle::best_level_bruteforce(0.9, 0.02, 0.3)).epsilon(5e-6));
}
