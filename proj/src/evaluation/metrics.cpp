#include "eqgym/evaluation/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace eqgym::eval {

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y,
                                    const simd::Kernels& kernels) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  auto pc = kernels.pair_counts(x, y);
  double dx = static_cast<double>(pc.pairs - pc.tied_x);
  double dy = static_cast<double>(pc.pairs - pc.tied_y);
  if (dx <= 0 || dy <= 0) return std::nullopt;
  double tau = static_cast<double>(pc.concordant - pc.discordant) / std::sqrt(dx * dy);
  return std::fmax(-1.0, std::fmin(1.0, tau));
}

FitReport undefined_fit(std::size_t n_points, std::size_t n_skipped) {
  FitReport r;
  r.n_points = n_points;
  r.n_skipped = n_skipped;
  return r;
}

FitReport fit_report(std::span<const double> predicted, std::span<const double> observed, std::size_t n_skipped,
                     const simd::Kernels& kernels) {
  if (predicted.size() != observed.size()) throw std::invalid_argument("fit_report: length mismatch");
  if (predicted.empty()) throw EmptyInput();
  const double n = static_cast<double>(observed.size());

  FitReport r;
  r.n_points = observed.size();
  r.n_skipped = n_skipped;

  double ss_res = kernels.sum_sq_diff(predicted, observed);
  double mean = kernels.sum(observed) / n;
  double ss_tot = kernels.sum_sq_dev(observed, mean);
  r.mse = ss_res / n;
  if (ss_tot > 0) {
    double r2 = 1.0 - ss_res / ss_tot;
    // Keep "r2 == 1 iff every residual is zero" even when the ratio underflows.
    if (ss_res > 0 && r2 >= 1.0) r2 = std::nextafter(1.0, 0.0);
    r.r2 = r2;
  } else if (ss_res <= kZeroResidual) {
    r.r2 = 1.0;
  }
  r.kendall_tau = kendall_tau_b(predicted, observed, kernels);

  std::size_t counted = 0;
  double rel = kernels.sum_abs_rel_err(predicted, observed, kMapeFloor, counted);
  if (counted > 0) r.mape = rel / static_cast<double>(counted);
  return r;
}

}  // namespace eqgym::eval
