#pragma once

// Straightforward O(n^2) reference metrics, written independently of the
// kernel-based implementation.

#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "eqgym/evaluation/metrics.hpp"

namespace eqgym::testing {

inline eval::FitReport brute_fit(const std::vector<double>& pred, const std::vector<double>& obs) {
  const std::size_t n = obs.size();
  eval::FitReport r;
  r.n_points = n;
  long double mean = 0, ss_tot = 0, ss_res = 0;
  for (double o : obs) mean += o;
  mean /= n;
  for (std::size_t i = 0; i < n; ++i) {
    ss_tot += (obs[i] - mean) * (obs[i] - mean);
    ss_res += (long double)(pred[i] - obs[i]) * (pred[i] - obs[i]);
  }
  r.mse = static_cast<double>(ss_res / n);
  if (ss_tot > 0) {
    r.r2 = static_cast<double>(1 - ss_res / ss_tot);
  } else if (ss_res <= 1e-18) {
    r.r2 = 1.0;
  }
  long long conc = 0, disc = 0, tx = 0, ty = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++pairs;
      int sx = (pred[i] > pred[j]) - (pred[i] < pred[j]);
      int sy = (obs[i] > obs[j]) - (obs[i] < obs[j]);
      if (sx == 0) ++tx;
      if (sy == 0) ++ty;
      if (sx * sy > 0) ++conc;
      if (sx * sy < 0) ++disc;
    }
  }
  double denom = std::sqrt(static_cast<double>(pairs - tx) * static_cast<double>(pairs - ty));
  if (denom > 0) r.kendall_tau = static_cast<double>(conc - disc) / denom;
  long double rel = 0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(obs[i]) > 1e-12) {
      rel += std::fabs(pred[i] - obs[i]) / std::fabs(obs[i]);
      ++counted;
    }
  }
  if (counted) r.mape = static_cast<double>(rel / counted);
  return r;
}

// Mixes continuous values, heavy ties, exact fits and zero observations.
inline std::pair<std::vector<double>, std::vector<double>> random_prediction_set(std::mt19937_64& rng,
                                                                                 std::size_t n) {
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<double> pred(n), obs(n);
  int mode = static_cast<int>(rng() % 4);
  for (std::size_t i = 0; i < n; ++i) {
    switch (mode) {
      case 0:
        obs[i] = u(rng);
        pred[i] = u(rng);
        break;
      case 1:  // many ties on both sides
        obs[i] = static_cast<double>(rng() % 4);
        pred[i] = static_cast<double>(rng() % 3);
        break;
      case 2:  // close fit
        obs[i] = u(rng);
        pred[i] = obs[i] * (1 + 1e-3 * u(rng) / 100);
        break;
      default:  // zeros in the observations
        obs[i] = rng() % 3 == 0 ? 0.0 : u(rng);
        pred[i] = obs[i] + u(rng) / 10;
        break;
    }
  }
  return {pred, obs};
}

inline bool close(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return std::fabs(*a - *b) <= tol * std::fmax(1.0, std::fabs(*b));
}

inline bool close_fit(const eval::FitReport& got, const eval::FitReport& ref, double tol) {
  return close(got.r2, ref.r2, tol) && close(got.mse, ref.mse, tol) && close(got.kendall_tau, ref.kendall_tau, tol) &&
         close(got.mape, ref.mape, tol) && got.n_points == ref.n_points;
}

}  // namespace eqgym::testing
