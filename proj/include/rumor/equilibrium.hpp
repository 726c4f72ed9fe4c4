#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rumor/params.hpp"
#include "rumor/steady_state.hpp"
#include "rumor/verification.hpp"

namespace rumor {

constexpr double kRateEps = 1e-9;   // corner vs. interior classification
constexpr double kHClamp = 1e-9;    // keep 1 - h away from zero

/// Steady-state belief that one's bias is correct after hearing an aligned
/// message.
inline double posterior_same(double l, double h, double beta, double y) {
  h = std::min(h, 1.0 - kHClamp);
  const double w_true = y * (beta + (1.0 - beta) * h - beta * (h - l));
  const double w_rumor = (1.0 - y) * beta * (1.0 - h);
  const double den = w_true + w_rumor;
  if (!(den > 0.0))
    throw std::domain_error("posterior_same: degenerate message weights");
  return w_true / den;
}

/// Steady-state belief that one's bias is correct after hearing an opposing
/// message.  beta = 1 leaves no cross-group meetings and is rejected.
inline double posterior_opposing(double l, double h, double beta, double y) {
  if (beta >= 1.0)
    throw std::domain_error("posterior_opposing: beta = 1 has no cross-group meetings");
  h = std::min(h, 1.0 - kHClamp);
  const double w_true = y * (1.0 - beta) * (1.0 - h);
  const double w_rumor = (1.0 - y) * (1.0 - beta + beta * l);
  const double den = w_true + w_rumor;
  if (!(den > 0.0))
    throw std::domain_error("posterior_opposing: degenerate message weights");
  return w_true / den;
}

/// Marginal verification value that would make the current aligned-message
/// rate optimal: c / (1 - posterior_same), written to stay finite-friendly.
inline double required_marginal_same(double l, double h, const ModelParams& p) {
  h = std::min(h, 1.0 - kHClamp);
  const double den = p.beta * (1.0 - p.y) * (1.0 - h);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  const double mass = p.beta + (1.0 - p.beta) * h - p.beta * (h - l);
  return p.c * (p.y * mass / den + 1.0);
}

/// Same object for opposing messages: c / (1 - posterior_opposing).
inline double required_marginal_opposing(double l, double h, const ModelParams& p) {
  h = std::min(h, 1.0 - kHClamp);
  const double den = (1.0 - p.y) * (1.0 - p.beta + p.beta * l);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return p.c * (p.y * (1.0 - p.beta) * (1.0 - h) / den + 1.0);
}

/// One application of the best-response map on verification rates.
inline std::pair<double, double> best_response(double l, double h, const ModelParams& p,
                                               const VerificationFunction& fn) {
  if (!(l >= 0.0 && l <= fn.cap + 1e-12 && h >= 0.0 && h <= fn.cap + 1e-12))
    throw std::invalid_argument("best_response: rates must lie in [0, cap]");
  const double lp = fn.inverse_marginal(required_marginal_same(l, h, p));
  const double hp = fn.inverse_marginal(required_marginal_opposing(l, h, p));
  if (!std::isfinite(lp) || !std::isfinite(hp))
    throw std::runtime_error("best_response: non-finite response");
  return {lp, hp};
}

enum class EquilibriumKind { NoVerification, OpposingOnly, Both };

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::NoVerification: return "NoVerification";
    case EquilibriumKind::OpposingOnly: return "OpposingOnly";
    case EquilibriumKind::Both: return "Both";
  }
  return "?";
}

struct EquilibriumSolution {
  double l = 0.0, h = 0.0;             // effective (population) rates
  EquilibriumKind kind = EquilibriumKind::NoVerification;
  double L = 0.0, H = 0.0;             // marginal multipliers at the solution
  double posterior_same = 0.0, posterior_opposing = 0.0;
  double iota = 0.0, rho0 = 0.0, rho1 = 0.0;
  double ttr = 1.0;
  bool ttr_infinite = false;
  bool cond_y_ok = true;               // unverified holders keep their bias
  double residual = 0.0;               // fixed-point residual of (l, h)
  std::vector<std::array<double, 2>> fixed_points;  // canonical first
  bool degenerate_beta = false;
  std::string note;
  // Partisan extension: rates non-partisans must choose so that effective
  // rates stay at the baseline equilibrium.
  double gamma = 0.0;
  double l_individual = 0.0, h_individual = 0.0;
  bool cap_conflict = false;           // required individual rate exceeds the cap
};

namespace detail {

struct FixedPointProblem {
  const ModelParams& p;
  const VerificationFunction& fn;
  double lmax, hmax;

  FixedPointProblem(const ModelParams& params, const VerificationFunction& f)
      : p(params), fn(f), lmax(f.cap), hmax(std::min(f.cap, 1.0 - kHClamp)) {}

  double br_l(double l, double h) const {
    return fn.inverse_marginal(required_marginal_same(l, h, p));
  }
  double br_h(double l, double h) const {
    return fn.inverse_marginal(required_marginal_opposing(l, h, p));
  }
  double residual(double l, double h) const {
    return std::max(std::abs(l - std::min(br_l(l, h), lmax)),
                    std::abs(h - std::min(br_h(l, h), hmax)));
  }

  // h solving h = br_h(l, h); br_h is nondecreasing in h, so the gap
  // function is strictly increasing and plain bisection applies.
  double solve_h(double l, double guess) const {
    auto gap = [&](double h) { return h - std::min(br_h(l, h), hmax); };
    double lo = 0.0, hi = hmax;
    if (gap(lo) >= 0.0) return 0.0;
    if (gap(hi) <= 0.0) return hmax;
    // warm bracket around the guess if it already straddles the root
    if (guess > 0.0 && guess < hmax) {
      double r = 1e-5;
      while (r < hmax) {
        const double a = std::max(0.0, guess - r), b = std::min(hmax, guess + r);
        if (gap(a) <= 0.0 && gap(b) >= 0.0) {
          lo = a;
          hi = b;
          break;
        }
        r *= 16.0;
      }
    }
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Nested-bisection polish: outer gap l - br_l(l, h*(l)) is strictly
  // increasing in l.  The bracket stays local to preserve multiplicity.
  std::array<double, 2> refine(double l0, double h0) const {
    double h_warm = h0;
    auto outer_gap = [&](double l) {
      h_warm = solve_h(l, h_warm);
      return l - std::min(br_l(l, h_warm), lmax);
    };
    double lo = 0.0, hi = lmax;
    if (outer_gap(lo) >= 0.0) {
      hi = lo;
    } else if (outer_gap(hi) <= 0.0) {
      lo = hi;
    } else {
      double r = 1e-4;
      while (r < lmax) {
        const double a = std::max(0.0, l0 - r), b = std::min(lmax, l0 + r);
        if (outer_gap(a) <= 0.0 && outer_gap(b) >= 0.0) {
          lo = a;
          hi = b;
          break;
        }
        r *= 16.0;
      }
    }
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (outer_gap(mid) < 0.0 ? lo : hi) = mid;
    }
    const double l = 0.5 * (lo + hi);
    const double h = solve_h(l, h_warm);
    return {l, h};
  }
};

}  // namespace detail

/// Whether holding one's bias absent verification is optimal at (l, h).
inline bool prior_condition_holds(double l, double h, const ModelParams& p) {
  if (p.beta >= 1.0) return false;
  h = std::min(h, 1.0 - kHClamp);
  const double lhs = p.y / (1.0 - p.y);
  const double rhs = (1.0 - p.beta + p.beta * l) / ((1.0 - p.beta) * (1.0 - h));
  return lhs + 1e-12 >= rhs;
}

/// Equilibrium truth-to-rumor ratio expressed through the aligned-message
/// multiplier L.
inline double ttr_prop5(double L, double y, double c, double beta) {
  if (!(c > 0.0)) throw std::invalid_argument("ttr_prop5 requires c > 0");
  return 1.0 + 2.0 / y * (L * (1.0 - y) / c - 1.0) * beta;
}

/// Opposing-message rate when aligned messages are not verified; solves
/// h = g(c (1 + y (1-h)/(1-y))) by bisection (beta-free).
inline double h_when_l_zero(double c, double y, const VerificationFunction& fn) {
  if (!(y > 0.5 && y < 1.0)) throw std::invalid_argument("y must lie in (0.5,1)");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be nonnegative");
  const double hmax = std::min(fn.cap, 1.0 - kHClamp);
  auto gap = [&](double h) {
    return h - std::min(fn.inverse_marginal(c * (1.0 + y * (1.0 - h) / (1.0 - y))), hmax);
  };
  double lo = 0.0, hi = hmax;
  if (gap(lo) >= 0.0) return 0.0;
  if (gap(hi) <= 0.0) return hmax;
  for (int it = 0; it < 120 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Finds fixed points of the best-response map: damped iteration (factor
/// 0.5) from a 5x5 start grid, deduplication at 1e-6, nested-bisection
/// polish.  All distinct fixed points are reported; the one with the
/// smallest h is canonical.
inline EquilibriumSolution solve_equilibrium(const ModelParams& p,
                                             const VerificationFunction& fn) {
  p.validate();
  const detail::FixedPointProblem fp(p, fn);
  constexpr int kGrid = 5;
  constexpr long kMaxIter = 100000;
  constexpr double kStepTol = 1e-9;
  constexpr double kDedup = 1e-6;

  std::vector<std::array<double, 2>> found;
  double best_failed_residual = std::numeric_limits<double>::infinity();
  bool any_start_failed = false;

  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      double l = fp.lmax * i / (kGrid - 1);
      double h = fp.hmax * j / (kGrid - 1);
      bool assigned = false;  // landed in the basin of a known point
      // The damped map need not contract everywhere (steep responses near
      // h -> 1 make it oscillate), so the iteration budget shrinks once a
      // fixed point is in hand; the bisection polish below converges from
      // any endpoint.
      const long budget = found.empty() ? kMaxIter : 2000;
      for (long it = 0; it < budget; ++it) {
        const double bl = std::min(fp.br_l(l, h), fp.lmax);
        const double bh = std::min(fp.br_h(l, h), fp.hmax);
        const double nl = 0.5 * (l + bl);
        const double nh = 0.5 * (h + bh);
        const double step = std::max(std::abs(nl - l), std::abs(nh - h));
        l = nl;
        h = nh;
        if (step < kStepTol) break;
        if (it > 25) {
          for (const auto& q : found)
            assigned |= std::abs(l - q[0]) < 1e-5 && std::abs(h - q[1]) < 1e-5;
          if (assigned) break;
        }
      }
      if (assigned) continue;
      const std::array<double, 2> z = fp.refine(l, h);
      const double res = fp.residual(z[0], z[1]);
      if (res > 1e-8) {  // polish failed to pin a root from this start
        any_start_failed = true;
        best_failed_residual = std::min(best_failed_residual, std::min(res, fp.residual(l, h)));
        continue;
      }
      bool dup = false;
      for (const auto& q : found)
        dup |= std::abs(z[0] - q[0]) < kDedup && std::abs(z[1] - q[1]) < kDedup;
      if (!dup) found.push_back(z);
    }
  }

  if (found.empty())
    throw std::runtime_error(
        "solve_equilibrium: no fixed point found (best residual " +
        std::to_string(best_failed_residual) + ")");

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a[1] != b[1] ? a[1] < b[1] : a[0] < b[0];
  });

  EquilibriumSolution sol;
  sol.fixed_points = found;
  sol.l = found[0][0];
  sol.h = found[0][1];
  sol.residual = fp.residual(sol.l, sol.h);
  sol.kind = sol.h > kRateEps
                 ? (sol.l > kRateEps ? EquilibriumKind::Both : EquilibriumKind::OpposingOnly)
                 : EquilibriumKind::NoVerification;
  sol.L = required_marginal_same(sol.l, sol.h, p);
  sol.H = required_marginal_opposing(sol.l, sol.h, p);
  sol.degenerate_beta = p.beta <= 0.0 || p.beta >= 1.0;
  if (!sol.degenerate_beta) {
    sol.posterior_same = posterior_same(sol.l, sol.h, p.beta, p.y);
    sol.posterior_opposing = posterior_opposing(sol.l, sol.h, p.beta, p.y);
  } else {
    sol.posterior_same = sol.posterior_opposing = std::numeric_limits<double>::quiet_NaN();
    sol.note = "beta at {0,1}: posteriors degenerate";
  }
  sol.cond_y_ok = prior_condition_holds(sol.l, sol.h, p);

  const SteadyState ss = steady_prevalence(sol.l, sol.h, p);
  sol.iota = ss.iota;
  sol.rho0 = ss.rho0;
  sol.rho1 = ss.rho1;
  if (ss.positive && ss.rho1 > 0.0) {
    sol.ttr = ss.rho0 / ss.rho1;
  } else {
    sol.ttr = truth_to_rumor(sol.l, sol.h, p.beta);
  }
  sol.ttr_infinite = !std::isfinite(sol.ttr);
  if (any_start_failed && sol.note.empty())
    sol.note = "some starts hit the iteration cap";
  sol.gamma = 0.0;
  sol.l_individual = sol.l;
  sol.h_individual = sol.h;
  return sol;
}

/// Equilibrium with a partisan fraction gamma.  Effective rates (and with
/// them prevalences and the truth-to-rumor ratio) coincide with the
/// baseline equilibrium; non-partisans must scale their own rates up by
/// 1/(1-gamma), which can collide with the cap -- flagged, not resolved.
inline EquilibriumSolution solve_partisan_equilibrium(const ModelParams& p,
                                                      const VerificationFunction& fn) {
  p.validate();
  EquilibriumSolution sol = solve_equilibrium(p, fn);
  sol.gamma = p.gamma;
  if (p.gamma == 0.0) return sol;
  const double scale = 1.0 / (1.0 - p.gamma);
  sol.l_individual = sol.l * scale;
  sol.h_individual = sol.h * scale;
  sol.cap_conflict =
      sol.l_individual > fn.cap + 1e-12 || sol.h_individual > fn.cap + 1e-12;
  if (sol.cap_conflict) {
    sol.note = "partisan offset requires individual rates above the cap";
  } else {
    // Route the prevalences through the partisan closed forms; identical
    // to the baseline values by construction.
    const SteadyState ss = partisan_steady_prevalence(sol.l_individual, sol.h_individual, p);
    sol.iota = ss.iota;
    sol.rho0 = ss.rho0;
    sol.rho1 = ss.rho1;
    if (ss.positive && ss.rho1 > 0.0) sol.ttr = ss.rho0 / ss.rho1;
  }
  return sol;
}

struct Thresholds {
  double c_bar = 0.0;                       // verification shuts off above this cost
  std::optional<double> c_underline;        // aligned-message verification boundary
  std::optional<double> c_underline_bisect; // route (a): solver indicator bisection
  std::optional<double> c_underline_closed; // route (b): multiplier closed form
  bool c_routes_agree = true;
  double y_bar = 0.0;                       // prior condition threshold
  bool y_bar_found = false;
  std::string note;
};

namespace detail {

// Largest cost at which the indicator flips from true (at lower cost) to
// false; scans then bisects.  Returns nullopt if the indicator never
// fires, c_hi if it fires everywhere.
template <class Indicator>
std::optional<double> falling_edge(Indicator on, double c_lo, double c_hi) {
  constexpr int kScan = 48;
  double prev_c = c_lo;
  bool prev_on = on(c_lo);
  if (!prev_on) {
    bool fired = false;
    for (int i = 1; i <= kScan && !fired; ++i) {
      const double c = c_lo * std::pow(c_hi / c_lo, double(i) / kScan);
      fired = on(c);
      prev_c = c;
    }
    if (!fired) return std::nullopt;
    // unusual ordering; fall through with the first firing point
    prev_on = true;
  }
  double edge_lo = prev_c, edge_hi = c_hi;
  bool have_edge = false;
  for (int i = 1; i <= kScan; ++i) {
    const double c = c_lo * std::pow(c_hi / c_lo, double(i) / kScan);
    if (c <= prev_c) continue;
    const bool now = on(c);
    if (prev_on && !now) {
      edge_lo = prev_c;
      edge_hi = c;
      have_edge = true;  // keep scanning; the last edge wins
    }
    prev_c = c;
    prev_on = now;
  }
  if (!have_edge) return c_hi;  // on everywhere up to c_hi
  for (int it = 0; it < 80 && edge_hi - edge_lo > 1e-13; ++it) {
    const double mid = 0.5 * (edge_lo + edge_hi);
    (on(mid) ? edge_lo : edge_hi) = mid;
  }
  return 0.5 * (edge_lo + edge_hi);
}

}  // namespace detail

/// Cost and prior thresholds for a given technology.  c_underline is
/// computed along two independent routes that must agree: (a) bisection of
/// the solver's aligned-rate indicator in c, (b) bisection of the
/// requirement that the aligned-message multiplier at l = 0 reaches the
/// origin marginal.
inline Thresholds thresholds(const ModelParams& p, const VerificationFunction& fn) {
  p.validate();
  Thresholds th;
  th.c_bar = fn.origin_marginal * (1.0 - p.y);

  const double c_lo = th.c_bar * 1e-6;
  const double c_hi = th.c_bar;

  auto solver_l_positive = [&](double c) {
    ModelParams q = p;
    q.c = c;
    return solve_equilibrium(q, fn).l > 1e-11;
  };
  th.c_underline_bisect = detail::falling_edge(solver_l_positive, c_lo, c_hi);

  auto multiplier_below_dbar = [&](double c) {
    const double h0 = h_when_l_zero(c, p.y, fn);
    ModelParams q = p;
    q.c = c;
    return required_marginal_same(0.0, h0, q) < fn.origin_marginal;
  };
  th.c_underline_closed = detail::falling_edge(multiplier_below_dbar, c_lo, c_hi);

  if (th.c_underline_bisect && th.c_underline_closed) {
    th.c_routes_agree = std::abs(*th.c_underline_bisect - *th.c_underline_closed) <= 1e-8;
    th.c_underline = th.c_underline_closed;
    if (!th.c_routes_agree) th.note = "c_underline routes disagree";
  } else if (th.c_underline_bisect.has_value() != th.c_underline_closed.has_value()) {
    th.c_routes_agree = false;
    th.note = "c_underline routes disagree on existence";
  } else {
    th.note = "no cost makes aligned-message verification positive";
  }

  auto cond_ok = [&](double y) {
    ModelParams q = p;
    q.y = y;
    return solve_equilibrium(q, fn).cond_y_ok;
  };
  double ylo = 0.5 + 1e-6, yhi = 1.0 - 1e-6;
  if (cond_ok(ylo)) {
    th.y_bar = ylo;
    th.y_bar_found = true;
  } else if (!cond_ok(yhi)) {
    th.note += (th.note.empty() ? "" : "; ");
    th.note += "prior condition fails across (0.5,1)";
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (ylo + yhi);
      (cond_ok(mid) ? yhi : ylo) = mid;
    }
    th.y_bar = 0.5 * (ylo + yhi);
    th.y_bar_found = true;
  }
  return th;
}

struct HomophilySensitivity {
  double dttr_dbeta = 0.0;
  double dL_dbeta = 0.0;
  bool positive_total_effect = false;  // L >= c/(1-y) + beta |dL/dbeta|
  bool kind_changed = false;           // regime boundary: derivative undefined
  bool h_beta_independent = true;      // checked on the opposing-only branch
  EquilibriumKind kind = EquilibriumKind::NoVerification;
};

/// Central finite differences of the equilibrium ratio and multiplier in
/// homophily.  A kind change across beta +- db marks a regime boundary.
inline HomophilySensitivity homophily_sensitivity(const ModelParams& p,
                                                  const VerificationFunction& fn,
                                                  double db = 1e-3) {
  if (!(db > 0.0) || p.beta - db < 0.0 || p.beta + db > 1.0)
    throw std::invalid_argument("homophily_sensitivity: beta +- db must stay in [0,1]");
  ModelParams lo = p, hi = p;
  lo.beta -= db;
  hi.beta += db;
  const EquilibriumSolution s0 = solve_equilibrium(p, fn);
  const EquilibriumSolution sl = solve_equilibrium(lo, fn);
  const EquilibriumSolution sh = solve_equilibrium(hi, fn);
  HomophilySensitivity out;
  out.kind = s0.kind;
  if (sl.kind != s0.kind || sh.kind != s0.kind) {
    out.kind_changed = true;
    out.dttr_dbeta = out.dL_dbeta = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.dttr_dbeta = (sh.ttr - sl.ttr) / (2.0 * db);
  out.dL_dbeta = (sh.L - sl.L) / (2.0 * db);
  out.positive_total_effect =
      s0.L >= p.c / (1.0 - p.y) + p.beta * std::abs(out.dL_dbeta);
  if (s0.kind == EquilibriumKind::OpposingOnly)
    out.h_beta_independent = std::abs(sh.h - sl.h) <= 1e-8;
  return out;
}

}  // namespace rumor
