#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "eqgym/simd/kernels.hpp"

namespace eqgym::eval {

// Observations with |obs| at or below this are left out of MAPE.
inline constexpr double kMapeFloor = 1e-12;
// With zero-variance observations, r2 is 1 only if SS_res is at most this.
inline constexpr double kZeroResidual = 1e-18;

// Absent fields are "undefined" (serialized as null).
struct FitReport {
  std::optional<double> r2;
  std::optional<double> mse;
  std::optional<double> kendall_tau;
  std::optional<double> mape;
  std::size_t n_points = 0;
  std::size_t n_skipped = 0;

  bool defined() const { return mse.has_value(); }
  friend bool operator==(const FitReport&, const FitReport&) = default;
};

class EmptyInput : public std::invalid_argument {
 public:
  EmptyInput() : std::invalid_argument("fit_report needs at least one prediction") {}
};

// Consistency metrics of predicted against observed values. `n_skipped`
// (points the hypothesis could not evaluate) is only recorded. Throws
// EmptyInput when there are no points.
FitReport fit_report(std::span<const double> predicted, std::span<const double> observed, std::size_t n_skipped = 0,
                     const simd::Kernels& kernels = simd::active_kernels());

// Tie-adjusted tau-b; undefined when either side is constant.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y,
                                    const simd::Kernels& kernels = simd::active_kernels());

// The report used when the hypothesis is unusable on the history: fewer than
// half of the points evaluate, or there are none.
FitReport undefined_fit(std::size_t n_points, std::size_t n_skipped);

}  // namespace eqgym::eval
