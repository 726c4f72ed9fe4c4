#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rumor {

/// Model parameters for the truth/rumor diffusion process.
///
/// Diffusion side: each individual has `k` meetings per instant, a meeting
/// transmits a message at rate `nu`, informed individuals die (and respawn
/// susceptible) at rate `delta`.  A fraction `beta` of meetings is with
/// one's own bias group.  Preference side: `y` is the prior that one's own
/// bias matches the true state, `c` the marginal cost of verification
/// effort.  `gamma` is the fraction of partisans in each group (partisans
/// never verify and always push their bias).
struct ModelParams {
  int k = 1;
  double nu = 0.2;
  double delta = 0.1;
  double beta = 0.6;
  double y = 0.9;
  double c = 0.1;
  double gamma = 0.0;

  /// Effective diffusion rate nu/delta.
  double lambda() const { return nu / delta; }

  /// lambda * k, the endemicity index (information survives iff > 1).
  double lambda_k() const { return lambda() * static_cast<double>(k); }

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const {
    if (k < 1) throw std::invalid_argument("k must be a positive integer");
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw std::invalid_argument("nu must be positive and finite");
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw std::invalid_argument("delta must be positive and finite");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::invalid_argument("beta must lie in [0,1]");
    if (!(y > 0.5 && y < 1.0))
      throw std::invalid_argument("y must lie in (0.5,1)");
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("c must be nonnegative and finite");
    if (!(gamma >= 0.0 && gamma < 1.0))
      throw std::invalid_argument("gamma must lie in [0,1)");
    if (!std::isfinite(lambda()))
      throw std::invalid_argument("lambda = nu/delta must be finite");
  }

  /// Non-fatal conditions worth surfacing in reports.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (beta < 0.5)
      w.push_back("beta < 0.5: heterophilous mixing; accepted but outside "
                  "the usual homophily regime");
    if (beta == 0.0 || beta == 1.0)
      w.push_back("beta at {0,1} is degenerate for posterior updates");
    return w;
  }

  /// Step-size admissibility for discrete-time schemes.
  bool step_ok(double dt, double budget = 1.0) const {
    return k * nu * dt < budget;
  }
};

}  // namespace rumor
