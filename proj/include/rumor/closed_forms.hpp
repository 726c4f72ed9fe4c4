#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "rumor/equilibrium.hpp"
#include "rumor/params.hpp"
#include "rumor/steady_state.hpp"

namespace rumor {

/// Equilibrium regions of the capped-exponential technology on the (c, y)
/// plane:
///   I   l = h = 0            II  l = 0, 0 < h < cap   III l = 0, h = cap
///   IV  0 < l < h < cap      V   0 < l < cap, h = cap  VI  l = h = cap
/// Invalid: the prior condition fails at the candidate rates.
enum class ExpCase { I, II, III, IV, V, VI, Invalid };

inline const char* to_string(ExpCase c) {
  switch (c) {
    case ExpCase::I: return "I";
    case ExpCase::II: return "II";
    case ExpCase::III: return "III";
    case ExpCase::IV: return "IV";
    case ExpCase::V: return "V";
    case ExpCase::VI: return "VI";
    case ExpCase::Invalid: return "Invalid";
  }
  return "?";
}

/// Region boundaries for the capped-exponential family.  Radical
/// expressions can leave their domain; the *_complex flags mark that.
struct ExpThresholds {
  double c_bar = 0.0;   // no verification at or above this cost
  double c1 = 0.0;      // II/III boundary (h reaches the cap, l = 0)
  double c2 = 0.0;      // printed IV lower bound (see c3)
  double c3 = 0.0;      // IV/V boundary (h reaches the cap, l interior)
  double c4 = 0.0;      // V/VI boundary (l reaches the cap)
  double c_l_on = 0.0;  // III/V boundary (l turns positive at the cap)
  double ybar2 = 0.0;
  double ybar3 = 0.0;
  double ybar4 = 0.0;
  double ybar5 = 0.0;
  double ybar6 = 0.0;
  bool c3_complex = false;
  bool c3_degenerate = false;  // beta = y: the c3 expression divides by zero
  bool ybar4_complex = false;
  bool ybar5_complex = false;
};

/// All closed-form thresholds at one parameter point.  A cap of 1 is
/// admitted as the 1 - 1e-9 limit to keep the cap-dependent formulas
/// finite.
inline ExpThresholds exp_thresholds(double c, double y, double beta, double x_bar) {
  if (!(c >= 0.0) || !(y > 0.5 && y < 1.0) || !(beta >= 0.0 && beta <= 1.0) ||
      !(x_bar > 0.0 && x_bar <= 1.0))
    throw std::invalid_argument("exp_thresholds: parameter out of range");
  const double x = std::min(x_bar, 1.0 - 1e-9);
  ExpThresholds t;
  t.c_bar = 1.0 - y;
  t.c1 = (1.0 - x) * (1.0 - y) / (1.0 - x * y);
  t.c2 = beta * (1.0 - x) * (1.0 - y) / (beta - x * (beta - (1.0 - beta) * y));
  t.c4 = beta * (1.0 - x) * (1.0 - x) * (1.0 - y) / (beta - beta * x + x * y);
  t.c_l_on = beta * (1.0 - x) * (1.0 - y) / (beta * (1.0 - x) + (1.0 - beta) * x * y);

  if (std::abs(beta - y) < 1e-12) {
    t.c3_degenerate = true;
    t.c3 = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double rad = (y + 1.0 - beta * (1.0 - x)) * (y + 1.0 - beta * (1.0 - x)) -
                       4.0 * x * y;
    if (rad < 0.0) {
      t.c3_complex = true;
      t.c3 = std::numeric_limits<double>::quiet_NaN();
    } else {
      t.c3 = 0.5 * (1.0 - y) +
             (1.0 - y) * (1.0 - x * beta - std::sqrt(rad)) / (2.0 * (beta - y));
    }
  }

  t.ybar2 = 1.0 / (1.0 + 2.0 * c);
  t.ybar3 = 1.0 / (2.0 - x);
  {
    const double rad = 4.0 + c - 4.0 * beta + 4.0 * beta * beta * c - 4.0 * beta * c;
    if (c < 0.0 || rad < 0.0) {
      t.ybar4_complex = true;
      t.ybar4 = std::numeric_limits<double>::quiet_NaN();
    } else {
      t.ybar4 = 0.5 * (2.0 + c - std::sqrt(c) * std::sqrt(rad) - 2.0 * beta * c);
    }
  }
  {
    const double den = beta - 2.0 * beta * c + 2.0 * c - beta * x + x - 2.0;
    const double a = 3.0 - beta - c + beta * x - x;
    const double rad = a * a + 4.0 * (1.0 - beta * c) * den;
    if (rad < 0.0 || std::abs(den) < 1e-12) {
      t.ybar5_complex = true;
      t.ybar5 = std::numeric_limits<double>::quiet_NaN();
    } else {
      t.ybar5 = (c - beta * x + x - 3.0 + beta + std::sqrt(rad)) / (2.0 * den);
    }
  }
  t.ybar6 = (1.0 - beta + beta * x) / (2.0 * (1.0 - beta) * (1.0 - x) + x);
  return t;
}

struct RegionClassification {
  ExpCase kase = ExpCase::Invalid;
  std::optional<ExpCase> tie;        // second case valid at a boundary
  ExpCase structural = ExpCase::I;   // underlying candidate when Invalid
  double l = 0.0, h = 0.0;
  double ttr = 1.0;
  bool cond_y_ok = true;
  double residual = 0.0;             // best-response residual of (l, h)
  bool gap = false;                  // no candidate satisfied its conditions
  ExpThresholds thresholds;
};

namespace detail {

inline double exp_g(double d, double x) {
  if (d >= 1.0) return 0.0;
  if (d <= 1.0 - x) return x;
  return 1.0 - d;
}

// Best-response residual of candidate rates under the capped-exponential
// technology; this is the validity test for every case candidate.
inline double exp_residual(double l, double h, double c, double y, double beta, double x) {
  ModelParams q;
  q.beta = beta;
  q.y = y;
  q.c = c;
  const double rl = std::abs(l - exp_g(required_marginal_same(l, h, q), x));
  const double rh = std::abs(h - exp_g(required_marginal_opposing(l, h, q), x));
  return std::max(rl, rh);
}

}  // namespace detail

/// Case classification and closed-form rates for the capped-exponential
/// family.  Each case candidate is accepted iff it satisfies the
/// best-response fixed-point conditions (residual <= 1e-9); boundary ties
/// carry both labels, and a point where no candidate qualifies is flagged
/// as a gap instead of being resolved silently.
inline RegionClassification classify_and_solve(double c, double y, double beta,
                                               double x_bar) {
  RegionClassification out;
  out.thresholds = exp_thresholds(c, y, beta, x_bar);
  const double x = std::min(x_bar, 1.0 - 1e-9);

  struct Candidate {
    ExpCase kase;
    double l, h;
    bool in_box;
  };
  std::array<Candidate, 6> cand{};
  int n = 0;
  cand[n++] = {ExpCase::I, 0.0, 0.0, true};
  {
    const double den = 1.0 - y - c * y;
    const double h2 = den > 1e-14 ? (1.0 - y - c) / den : -1.0;
    cand[n++] = {ExpCase::II, 0.0, h2, h2 > 0.0 && h2 < x};
  }
  cand[n++] = {ExpCase::III, 0.0, x, true};
  {
    const double s = (1.0 - c - y) / (1.0 - y);
    const double den4 = 1.0 - y - c * beta;
    const double l4 = beta > 0.0 ? s * (beta - y) / beta : -1.0;
    const double h4 = std::abs(den4) > 1e-14 ? s * (1.0 - (1.0 - c) * y - c * beta) / den4
                                             : -1.0;
    cand[n++] = {ExpCase::IV, l4, h4, l4 > 0.0 && h4 < x && h4 > 0.0 && l4 < x};
  }
  {
    double l5 = -1.0;
    if (beta > 0.0) {
      const double den5 = beta * (c * y + (1.0 - x) * (1.0 - y));
      if (den5 > 1e-14)
        l5 = 1.0 - c * ((1.0 - beta) * x * y + beta * (1.0 - x + y)) / den5;
    }
    cand[n++] = {ExpCase::V, l5, x, l5 > 0.0 && l5 < x};
  }
  cand[n++] = {ExpCase::VI, x, x, true};

  constexpr double kAccept = 1e-9;
  int first = -1, second = -1;
  double first_res = 0.0;
  double best_res = std::numeric_limits<double>::infinity();
  int best_idx = 0;
  for (int i = 0; i < n; ++i) {
    if (!cand[i].in_box) continue;
    const double r = detail::exp_residual(cand[i].l, cand[i].h, c, y, beta, x);
    if (r < best_res) {
      best_res = r;
      best_idx = i;
    }
    if (r <= kAccept) {
      if (first < 0) {
        first = i;
        first_res = r;
      } else if (second < 0) {
        second = i;
      }
    }
  }

  if (first < 0) {  // no candidate passed: report the nearest one
    out.gap = true;
    first = best_idx;
    first_res = best_res;
  }
  out.structural = cand[first].kase;
  out.l = cand[first].l;
  out.h = cand[first].h;
  out.residual = first_res;
  if (second >= 0) out.tie = cand[second].kase;

  ModelParams q;
  q.beta = beta;
  q.y = y;
  q.c = c;
  out.cond_y_ok = prior_condition_holds(out.l, out.h, q);
  out.kase = out.cond_y_ok ? cand[first].kase : ExpCase::Invalid;
  out.ttr = truth_to_rumor(out.l, out.h, beta);
  return out;
}

struct CaseVRatio {
  double ratio = 0.0;
  int dbeta_sign = 0;  // sign of d(ratio)/d(beta)
};

/// Truth-to-rumor ratio in the cap-bound case V and the sign of its
/// homophily derivative; the sign flips at y = (1 - c - x)/(1 - x).
inline CaseVRatio ttr_case_v(double c, double y, double beta, double x_bar) {
  const RegionClassification rc = classify_and_solve(c, y, beta, x_bar);
  if (rc.structural != ExpCase::V || rc.gap)
    throw std::invalid_argument("ttr_case_v: point does not classify as case V");
  const double x = std::min(x_bar, 1.0 - 1e-9);
  CaseVRatio out;
  const double den = (1.0 - x) * (1.0 - y) + c * y;
  out.ratio = ((1.0 + x) * (1.0 - y) + c * y + 2.0 * beta * ((1.0 - y) * (1.0 - x) - c)) / den;
  const double boundary = (1.0 - c - x) / (1.0 - x);
  const double diff = boundary - y;
  out.dbeta_sign = std::abs(diff) < 1e-12 ? 0 : (diff > 0.0 ? 1 : -1);
  return out;
}

}  // namespace rumor
