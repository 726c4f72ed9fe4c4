#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rumor/parallel.hpp"
#include "rumor/params.hpp"
#include "rumor/rng.hpp"

namespace rumor {

/// Finite population for the stochastic simulator.  Agents 0..n/2-1 are
/// group 0, the rest group 1; the first round(gamma*n/2) agents of each
/// group are partisans.  Status: 0 susceptible, 1 informed with opinion 0,
/// 2 informed with opinion 1.
struct AgentPopulation {
  int n = 0;
  int partisans_per_group = 0;
  std::vector<uint8_t> status;

  AgentPopulation(int n_agents, double gamma) : n(n_agents) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("population must be even and >= 2");
    partisans_per_group = static_cast<int>(std::lround(gamma * (n / 2)));
    status.assign(static_cast<size_t>(n), 0);
  }

  int group_of(int i) const { return i < n / 2 ? 0 : 1; }
  bool is_partisan(int i) const {
    const int offset = i < n / 2 ? i : i - n / 2;
    return offset < partisans_per_group;
  }
};

struct AbmPoint {
  double t = 0.0;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double iota = 0.0;
};

struct AbmResult {
  std::vector<AbmPoint> series;
  AbmPoint terminal;
  uint64_t seed = 0;
  std::vector<std::string> warnings;
  std::vector<uint8_t> final_status;  // per-agent terminal status
};

/// Discrete-time Bernoulli simulation of the meeting process.  Per step,
/// each susceptible agent runs its k meetings: a meeting transmits with
/// probability nu*dt, the partner is drawn from the own group with
/// probability beta (other group otherwise, uniformly, resampled every
/// step), and only the first transmitted message is honored.  Receivers
/// verify opposing messages at rate h and aligned ones at rate l; success
/// yields opinion 0, failure the own bias; partisans always adopt their
/// bias.  Informed agents die with probability delta*dt and respawn
/// susceptible.  Fully deterministic given (seed, n, dt).
inline AbmResult run_abm(const ModelParams& p, double l, double h, int n, double dt,
                         double horizon, uint64_t seed, int record_every = 0) {
  // nu = 0 (no transmission) is admitted here as a degenerate but
  // well-defined simulation; everything else follows the usual ranges.
  if (p.nu == 0.0) {
    ModelParams q = p;
    q.nu = 1.0;
    q.validate();
  } else {
    p.validate();
  }
  if (!(dt > 0.0) || !p.step_ok(dt, 0.1))
    throw std::invalid_argument("run_abm: require k*nu*dt < 0.1");
  if (!(l >= 0.0 && l <= 1.0 && h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("run_abm: rates must lie in [0,1]");
  AbmResult res;
  res.seed = seed;
  if (n < 1000)
    res.warnings.push_back("population below 1000: mean-field comparison unreliable");

  AgentPopulation pop(n, p.gamma);
  const int half = n / 2;

  // Seed 1% of each group informed, holding their bias.
  const int seeded = std::max(1, half / 100);
  for (int i = 0; i < seeded; ++i) {
    pop.status[half - 1 - i] = 1;       // group 0, opinion 0
    pop.status[n - 1 - i] = 2;          // group 1, opinion 1
  }

  Xoshiro256 rng(seed);
  const double p_tx = p.nu * dt;
  const double p_die = p.delta * dt;
  const long steps = static_cast<long>(std::ceil(horizon / dt));
  const int rec = record_every > 0 ? record_every : std::max(1L, steps / 400);

  std::vector<uint8_t> prev(pop.status);
  auto snapshot = [&](double t) {
    long n0 = 0, n1 = 0;
    for (uint8_t s : pop.status) {
      n0 += s == 1;
      n1 += s == 2;
    }
    AbmPoint pt;
    pt.t = t;
    pt.rho0 = static_cast<double>(n0) / n;
    pt.rho1 = static_cast<double>(n1) / n;
    pt.iota = pt.rho0 + pt.rho1;
    return pt;
  };
  res.series.push_back(snapshot(0.0));

  for (long step = 1; step <= steps; ++step) {
    prev = pop.status;
    for (int i = 0; i < n; ++i) {
      if (prev[i] == 0) {  // susceptible: listen
        for (int m = 0; m < p.k; ++m) {
          if (rng.uniform() >= p_tx) continue;
          const bool same_group = rng.uniform() < p.beta;
          const int g = pop.group_of(i);
          const int pool = same_group ? g : 1 - g;
          const int j = static_cast<int>(rng.below(static_cast<uint32_t>(half))) +
                        pool * half;
          if (prev[j] == 0) continue;           // partner uninformed: no message
          const int msg = prev[j] == 1 ? 0 : 1; // honor the first message only
          const int bias = pop.group_of(i);
          int opinion;
          if (bias == 0) {
            opinion = 0;  // either verified truth or own bias; both are 0
          } else if (pop.is_partisan(i)) {
            opinion = bias;
          } else {
            const double rate = msg == bias ? l : h;
            opinion = rng.uniform() < rate ? 0 : bias;
          }
          pop.status[i] = opinion == 0 ? 1 : 2;
          break;
        }
      } else {  // informed: may die and respawn susceptible
        if (rng.uniform() < p_die) pop.status[i] = 0;
      }
    }
    if (step % rec == 0 || step == steps) res.series.push_back(snapshot(step * dt));
  }
  res.terminal = res.series.back();
  res.final_status = pop.status;
  return res;
}

/// Independent replicas (one per seed).
inline std::vector<AbmResult> run_abm_ensemble(const ModelParams& p, double l, double h,
                                               int n, double dt, double horizon,
                                               const std::vector<uint64_t>& seeds,
                                               int record_every = 0) {
  std::vector<AbmResult> out(seeds.size());
  parallel_for(seeds.size(), [&](size_t i) {
    out[i] = run_abm(p, l, h, n, dt, horizon, seeds[i], record_every);
  });
  return out;
}

struct AbmSummaryRow {
  double t = 0.0;
  double rho0_mean = 0.0, rho0_sd = 0.0;
  double rho1_mean = 0.0, rho1_sd = 0.0;
  double iota_mean = 0.0, iota_sd = 0.0;
  size_t n_seeds = 0;
};

/// Across-seed mean and standard deviation on the common record grid.
inline std::vector<AbmSummaryRow> summarize(const std::vector<AbmResult>& runs) {
  std::vector<AbmSummaryRow> rows;
  if (runs.empty()) return rows;
  const size_t len = runs.front().series.size();
  for (const auto& r : runs)
    if (r.series.size() != len)
      throw std::invalid_argument("summarize: replicas have mismatched record grids");
  rows.resize(len);
  for (size_t t = 0; t < len; ++t) {
    AbmSummaryRow& row = rows[t];
    row.t = runs.front().series[t].t;
    row.n_seeds = runs.size();
    double s0 = 0, s1 = 0, si = 0, q0 = 0, q1 = 0, qi = 0;
    for (const auto& r : runs) {
      const AbmPoint& pt = r.series[t];
      s0 += pt.rho0;
      s1 += pt.rho1;
      si += pt.iota;
      q0 += pt.rho0 * pt.rho0;
      q1 += pt.rho1 * pt.rho1;
      qi += pt.iota * pt.iota;
    }
    const double m = static_cast<double>(runs.size());
    row.rho0_mean = s0 / m;
    row.rho1_mean = s1 / m;
    row.iota_mean = si / m;
    auto sd = [m](double sum, double sq, double mean) {
      return m > 1 ? std::sqrt(std::max(0.0, (sq - sum * mean) / (m - 1))) : 0.0;
    };
    row.rho0_sd = sd(s0, q0, row.rho0_mean);
    row.rho1_sd = sd(s1, q1, row.rho1_mean);
    row.iota_sd = sd(si, qi, row.iota_mean);
  }
  return rows;
}

}  // namespace rumor
