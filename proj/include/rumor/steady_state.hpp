#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rumor/dynamics.hpp"
#include "rumor/params.hpp"

namespace rumor {

/// Closed-form steady state of the mean-field system at given rates.
struct SteadyState {
  double iota = 0.0;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double ttr = 1.0;          // rho0 / rho1
  bool ttr_infinite = false; // exact corner rho1 = 0
  bool positive = false;
  bool stable = true;        // the reported state is the locally stable one
  PrevalenceState state;     // rho00 = iota, rho01 = 2 rho0 - iota, rho11 = 2 rho1
};

/// Informed share: 1 - 1/(lambda k) when lambda k > 1, else 0.
inline double information_prevalence(const ModelParams& p) {
  const double lk = p.lambda_k();
  if (!(lk > 0.0)) throw std::invalid_argument("lambda*k must be positive");
  return lk > 1.0 ? 1.0 - 1.0 / lk : 0.0;
}

/// Truth-to-rumor ratio (1+h)/(1-h) - 2 beta (h-l)/(1-h); +inf at h = 1.
inline double truth_to_rumor(double l, double h, double beta) {
  if (h >= 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + h) / (1.0 - h) - 2.0 * beta * (h - l) / (1.0 - h);
}

/// Steady-state prevalence of truth and rumor at exogenous rates (l, h).
inline SteadyState steady_prevalence(double l, double h, const ModelParams& p) {
  if (!(l >= 0.0 && l <= 1.0 && h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("rates must lie in [0,1]");
  const double denom = 1.0 - p.beta * (h - l);
  if (std::abs(denom) < 1e-12)
    throw std::invalid_argument("degenerate steady state: beta*(h-l) = 1");
  SteadyState ss;
  ss.iota = information_prevalence(p);
  ss.positive = ss.iota > 0.0;
  ss.rho0 = 0.5 * (1.0 + h - 2.0 * p.beta * (h - l)) / denom * ss.iota;
  ss.rho1 = 0.5 * (1.0 - h) / denom * ss.iota;
  ss.ttr_infinite = h >= 1.0 || (ss.positive && ss.rho1 == 0.0);
  ss.ttr = ss.ttr_infinite ? std::numeric_limits<double>::infinity()
                           : truth_to_rumor(l, h, p.beta);
  ss.state = PrevalenceState{ss.iota, 2.0 * ss.rho0 - ss.iota, 2.0 * ss.rho1};
  return ss;
}

/// Steady state with a partisan fraction gamma; equals the baseline closed
/// form evaluated at effective rates (1-gamma) l, (1-gamma) h.
inline SteadyState partisan_steady_prevalence(double l, double h, const ModelParams& p) {
  if (!(l >= 0.0 && l <= 1.0 && h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("rates must lie in [0,1]");
  const double g = p.gamma;
  const double denom = 1.0 + p.beta * (1.0 - g) * (l - h);
  if (std::abs(denom) < 1e-12)
    throw std::invalid_argument("degenerate steady state: beta*(1-gamma)*(h-l) = 1");
  SteadyState ss;
  ss.iota = information_prevalence(p);
  ss.positive = ss.iota > 0.0;
  ss.rho0 = 0.5 * (1.0 + (1.0 - g) * h + 2.0 * p.beta * (1.0 - g) * (l - h)) / denom * ss.iota;
  ss.rho1 = 0.5 * (1.0 - (1.0 - g) * h) / denom * ss.iota;
  const double h_eff = (1.0 - g) * h;
  ss.ttr_infinite = h_eff >= 1.0;
  ss.ttr = ss.ttr_infinite ? std::numeric_limits<double>::infinity()
                           : truth_to_rumor((1.0 - g) * l, h_eff, p.beta);
  ss.state = PrevalenceState{ss.iota, 2.0 * ss.rho0 - ss.iota, 2.0 * ss.rho1};
  return ss;
}

/// Group-1 split of the partisan steady state (l, h are the rates chosen
/// by non-partisans).
inline PartisanState partisan_steady_split(double l, double h, const ModelParams& p) {
  const SteadyState ss = partisan_steady_prevalence(l, h, p);
  PartisanState s;
  s.rho00 = ss.iota;
  s.rho_g1 = ss.iota;
  s.rho_n0 = p.gamma < 1.0 ? (2.0 * ss.rho0 - ss.iota) / (1.0 - p.gamma) : 0.0;
  s.rho_n1 = ss.iota - s.rho_n0;
  return s;
}

namespace detail {

// Maximal real part of the eigenvalues of a 3x3 matrix, via the cubic
// characteristic polynomial (trigonometric / Cardano form).
inline double max_real_eigenvalue_3x3(const std::array<std::array<double, 3>, 3>& m) {
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                        m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  // x^3 + a x^2 + b x + c = 0
  const double a = -tr, b = minors, c = -det;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  double max_re;
  if (disc > 0.0) {  // one real root, one complex pair
    const double r = std::sqrt(disc);
    const double t1 = std::cbrt(-0.5 * q + r) + std::cbrt(-0.5 * q - r);
    max_re = std::max(t1, -0.5 * t1);
  } else {  // three real roots
    const double rad = std::sqrt(std::max(0.0, -p / 3.0));
    if (rad == 0.0) {
      max_re = 0.0;
    } else {
      double arg = 3.0 * q / (2.0 * p * rad);
      arg = std::clamp(arg, -1.0, 1.0);
      const double theta = std::acos(arg);
      max_re = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k)
        max_re = std::max(max_re, 2.0 * rad * std::cos(theta / 3.0 -
                                                       2.0 * std::numbers::pi * k / 3.0));
    }
  }
  if (!std::isfinite(max_re)) throw std::runtime_error("eigenvalue solve failed");
  return max_re + shift;
}

}  // namespace detail

enum class StabilityKind {
  PositiveStable,                // only the positive state was examined
  ZeroStable,                    // lambda k <= 1
  ZeroUnstablePositiveStable,    // lambda k > 1
};

struct StabilityReport {
  StabilityKind kind = StabilityKind::ZeroStable;
  double max_re_zero = 0.0;      // leading eigenvalue at the zero state
  double max_re_positive = 0.0;  // at the positive state (NaN when absent)
  bool agrees_analytic = false;  // numeric signs match the lambda k rule
};

/// Numeric Jacobian (central differences, step 1e-6) of the laws of motion
/// at the zero and positive steady states; signs must reproduce the
/// analytic rule lambda k > 1 <=> positive state stable.
inline StabilityReport stability_classify(const ModelParams& p, double l = 0.0,
                                          double h = 0.0) {
  constexpr double step = 1e-6;
  constexpr double sign_tol = 1e-7;
  auto jacobian_max_re = [&](const PrevalenceState& at) {
    std::array<std::array<double, 3>, 3> j{};
    for (int col = 0; col < 3; ++col) {
      PrevalenceState hi = at, lo = at;
      double* hp = col == 0 ? &hi.rho00 : col == 1 ? &hi.rho01 : &hi.rho11;
      double* lp = col == 0 ? &lo.rho00 : col == 1 ? &lo.rho01 : &lo.rho11;
      *hp += step;
      *lp -= step;
      const PrevalenceState fh = derivatives(hi, p, l, h);
      const PrevalenceState fl = derivatives(lo, p, l, h);
      j[0][col] = (fh.rho00 - fl.rho00) / (2.0 * step);
      j[1][col] = (fh.rho01 - fl.rho01) / (2.0 * step);
      j[2][col] = (fh.rho11 - fl.rho11) / (2.0 * step);
    }
    return detail::max_real_eigenvalue_3x3(j);
  };

  StabilityReport rep;
  rep.max_re_zero = jacobian_max_re(PrevalenceState{0.0, 0.0, 0.0});
  const bool endemic = p.lambda_k() > 1.0;
  if (endemic) {
    rep.max_re_positive = jacobian_max_re(steady_prevalence(l, h, p).state);
    rep.kind = StabilityKind::ZeroUnstablePositiveStable;
    rep.agrees_analytic = rep.max_re_zero > -sign_tol && rep.max_re_positive < sign_tol;
  } else {
    rep.max_re_positive = std::numeric_limits<double>::quiet_NaN();
    rep.kind = StabilityKind::ZeroStable;
    rep.agrees_analytic = rep.max_re_zero < sign_tol;
  }
  return rep;
}

}  // namespace rumor
