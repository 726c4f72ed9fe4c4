#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rumor/params.hpp"

namespace rumor {

/// Group-by-opinion prevalences.  rho00: opinion 0 in group 0; rho01 /
/// rho11: opinions 0 / 1 in group 1.  Group 0 never holds the rumor, so
/// there is no field for it.
struct PrevalenceState {
  double rho00 = 0.0;
  double rho01 = 0.0;
  double rho11 = 0.0;

  double iota0() const { return rho00; }
  double iota1() const { return rho01 + rho11; }

  bool valid(double tol = 1e-9) const {
    auto in01 = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
    return in01(rho00) && in01(rho01) && in01(rho11) && iota1() <= 1.0 + tol &&
           std::isfinite(rho00) && std::isfinite(rho01) && std::isfinite(rho11);
  }
};

/// Prevalences with partisans split out of group 1. rho_g1: opinion 1
/// among group-1 partisans; rho_n0/rho_n1: opinions among group-1
/// non-partisans.  Group-0 partisans behave like everyone else there.
struct PartisanState {
  double rho00 = 0.0;
  double rho_g1 = 0.0;
  double rho_n0 = 0.0;
  double rho_n1 = 0.0;

  double iota0() const { return rho00; }
  double iota1(double gamma) const {
    return gamma * rho_g1 + (1.0 - gamma) * (rho_n0 + rho_n1);
  }

  bool valid(double tol = 1e-9) const {
    auto in01 = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
    return in01(rho00) && in01(rho_g1) && in01(rho_n0) && in01(rho_n1) &&
           rho_n0 + rho_n1 <= 1.0 + tol;
  }
};

struct Aggregates {
  double rho0 = 0.0;
  double rho1 = 0.0;
  double iota = 0.0;
};

inline Aggregates aggregate(const PrevalenceState& s) {
  return {0.5 * (s.rho00 + s.rho01), 0.5 * s.rho11, 0.5 * (s.iota0() + s.iota1())};
}

inline Aggregates aggregate(const PartisanState& s, double gamma) {
  Aggregates a;
  a.rho1 = 0.5 * ((1.0 - gamma) * s.rho_n1 + gamma * s.rho_g1);
  a.rho0 = 0.5 * (s.iota0() + (1.0 - gamma) * s.rho_n0);
  a.iota = 0.5 * (s.iota0() + s.iota1(gamma));
  return a;
}

/// Mean-field laws of motion at verification rates (l, h); l for messages
/// aligned with the receiver's bias, h for messages against it.
inline PrevalenceState derivatives(const PrevalenceState& s, const ModelParams& p,
                                   double l, double h) {
  if (!s.valid(1e-6) || !std::isfinite(l) || !std::isfinite(h))
    throw std::invalid_argument("derivatives: non-finite or invalid input");
  const double nk = p.nu * p.k;
  const double b = p.beta;
  const double sus1 = 1.0 - s.rho01 - s.rho11;
  PrevalenceState d;
  d.rho00 = 0.5 * (1.0 - s.rho00) * nk * (b * s.rho00 + (1.0 - b) * (s.rho01 + s.rho11)) -
            0.5 * s.rho00 * p.delta;
  d.rho01 = 0.5 * sus1 * nk * (b * (h * s.rho01 + l * s.rho11) + (1.0 - b) * h * s.rho00) -
            0.5 * s.rho01 * p.delta;
  d.rho11 = 0.5 * sus1 * nk *
                (b * ((1.0 - h) * s.rho01 + (1.0 - l) * s.rho11) +
                 (1.0 - b) * (1.0 - h) * s.rho00) -
            0.5 * s.rho11 * p.delta;
  return d;
}

/// Partisan variant: partisans (fraction gamma of each group) never verify
/// and always adopt their bias.  At gamma = 0 the (rho00, rho_n0, rho_n1)
/// components coincide with derivatives().
inline PartisanState partisan_derivatives(const PartisanState& s, const ModelParams& p,
                                          double l, double h) {
  if (!s.valid(1e-6) || !std::isfinite(l) || !std::isfinite(h))
    throw std::invalid_argument("partisan_derivatives: non-finite or invalid input");
  const double g = p.gamma;
  const double nk = p.nu * p.k;
  const double b = p.beta;
  const double i0 = s.iota0();
  const double i1 = s.iota1(g);
  const double rumor1 = (1.0 - g) * s.rho_n1 + g * s.rho_g1;  // opinion-1 share of group 1
  const double sus_n = 1.0 - s.rho_n0 - s.rho_n1;
  PartisanState d;
  d.rho00 = 0.5 * (1.0 - s.rho00) * nk * (b * i0 + (1.0 - b) * i1) - 0.5 * s.rho00 * p.delta;
  d.rho_g1 = 0.5 * g * (1.0 - s.rho_g1) * nk * (b * i1 + (1.0 - b) * i0) -
             0.5 * g * s.rho_g1 * p.delta;
  d.rho_n0 = 0.5 * (1.0 - g) * sus_n * nk *
                 (b * l * rumor1 + b * h * (1.0 - g) * s.rho_n0 + (1.0 - b) * h * s.rho00) -
             0.5 * (1.0 - g) * s.rho_n0 * p.delta;
  d.rho_n1 = 0.5 * (1.0 - g) * sus_n * nk *
                 (b * (1.0 - l) * rumor1 +
                  (1.0 - h) * (b * (1.0 - g) * s.rho_n0 + (1.0 - b) * s.rho00)) -
             0.5 * (1.0 - g) * s.rho_n1 * p.delta;
  return d;
}

namespace detail {

template <size_t N>
using Vec = std::array<double, N>;

template <size_t N, class Rhs>
Vec<N> rk4_step(const Vec<N>& x, double dt, const Rhs& rhs) {
  const Vec<N> k1 = rhs(x);
  Vec<N> tmp;
  for (size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  const Vec<N> k2 = rhs(tmp);
  for (size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  const Vec<N> k3 = rhs(tmp);
  for (size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];
  const Vec<N> k4 = rhs(tmp);
  Vec<N> out;
  for (size_t i = 0; i < N; ++i)
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Clips small boundary overshoots in place; returns the number of clips.
// Anything past the divergence guard throws.
template <size_t N>
long clip_to_unit(Vec<N>& x, double guard = 1e-6) {
  long clips = 0;
  for (double& v : x) {
    if (!std::isfinite(v) || v < -guard || v > 1.0 + guard)
      throw std::runtime_error("integration diverged: component " + std::to_string(v) +
                               " left [-1e-6, 1+1e-6]");
    if (v < 0.0) {
      v = 0.0;
      ++clips;
    } else if (v > 1.0) {
      v = 1.0;
      ++clips;
    }
  }
  return clips;
}

}  // namespace detail

template <class State>
struct TrajectoryPoint {
  double t;
  State state;
};

template <class State>
struct IntegrationResult {
  std::vector<TrajectoryPoint<State>> trajectory;  // subsampled, includes endpoints
  State terminal;
  double t_end = 0.0;
  bool converged = false;  // max |derivative| fell below deriv_tol
  long clip_events = 0;
};

struct IntegrateOptions {
  double deriv_tol = 1e-10;
  int record_every = 0;  // 0: choose so that ~2000 points are kept
};

/// Fixed-step classical Runge-Kutta integration of the mean-field system.
/// dt = 0 picks the default 0.01/delta.  States are clipped to the unit
/// box (events counted); leaving [-1e-6, 1+1e-6] aborts.
inline IntegrationResult<PrevalenceState> integrate(const PrevalenceState& s0,
                                                    const ModelParams& p, double l, double h,
                                                    double horizon, double dt,
                                                    IntegrateOptions opt = {}) {
  p.validate();
  if (dt == 0.0) dt = 0.01 / p.delta;
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("integrate: dt and horizon must be positive");
  if (!p.step_ok(dt))
    throw std::invalid_argument("integrate: k*nu*dt must stay below 1");
  if (!s0.valid()) throw std::invalid_argument("integrate: invalid initial state");

  const long steps = static_cast<long>(std::ceil(horizon / dt));
  const int rec = opt.record_every > 0
                      ? opt.record_every
                      : std::max<long>(1, steps / 2000);
  IntegrationResult<PrevalenceState> res;
  detail::Vec<3> x{s0.rho00, s0.rho01, s0.rho11};
  auto rhs = [&](const detail::Vec<3>& v) -> detail::Vec<3> {
    const PrevalenceState st{v[0], v[1], v[2]};
    const PrevalenceState d = derivatives(st, p, l, h);
    return {d.rho00, d.rho01, d.rho11};
  };
  auto push = [&res](double t, const detail::Vec<3>& v) {
    res.trajectory.push_back({t, PrevalenceState{v[0], v[1], v[2]}});
  };
  push(0.0, x);
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    x = detail::rk4_step(x, dt, rhs);
    res.clip_events += detail::clip_to_unit(x);
    t += dt;
    if ((i + 1) % rec == 0) push(t, x);
    const detail::Vec<3> d = rhs(x);
    const double dmax = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
    if (dmax < opt.deriv_tol) {
      res.converged = true;
      break;
    }
  }
  if (res.trajectory.back().t != t) push(t, x);
  res.terminal = PrevalenceState{x[0], x[1], x[2]};
  res.t_end = t;
  return res;
}

/// Same scheme for the four-equation partisan system.
inline IntegrationResult<PartisanState> integrate(const PartisanState& s0,
                                                  const ModelParams& p, double l, double h,
                                                  double horizon, double dt,
                                                  IntegrateOptions opt = {}) {
  p.validate();
  if (dt == 0.0) dt = 0.01 / p.delta;
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("integrate: dt and horizon must be positive");
  if (!p.step_ok(dt))
    throw std::invalid_argument("integrate: k*nu*dt must stay below 1");
  if (!s0.valid()) throw std::invalid_argument("integrate: invalid initial state");

  const long steps = static_cast<long>(std::ceil(horizon / dt));
  const int rec = opt.record_every > 0
                      ? opt.record_every
                      : std::max<long>(1, steps / 2000);
  IntegrationResult<PartisanState> res;
  detail::Vec<4> x{s0.rho00, s0.rho_g1, s0.rho_n0, s0.rho_n1};
  auto rhs = [&](const detail::Vec<4>& v) -> detail::Vec<4> {
    const PartisanState st{v[0], v[1], v[2], v[3]};
    const PartisanState d = partisan_derivatives(st, p, l, h);
    return {d.rho00, d.rho_g1, d.rho_n0, d.rho_n1};
  };
  auto push = [&res](double t, const detail::Vec<4>& v) {
    res.trajectory.push_back({t, PartisanState{v[0], v[1], v[2], v[3]}});
  };
  push(0.0, x);
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    x = detail::rk4_step(x, dt, rhs);
    res.clip_events += detail::clip_to_unit(x);
    t += dt;
    if ((i + 1) % rec == 0) push(t, x);
    const detail::Vec<4> d = rhs(x);
    const double dmax =
        std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2]), std::abs(d[3])});
    if (dmax < opt.deriv_tol) {
      res.converged = true;
      break;
    }
  }
  if (res.trajectory.back().t != t) push(t, x);
  res.terminal = PartisanState{x[0], x[1], x[2], x[3]};
  res.t_end = t;
  return res;
}

}  // namespace rumor
