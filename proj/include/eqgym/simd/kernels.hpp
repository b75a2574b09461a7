#pragma once

// Data-parallel inner loops for batch expression evaluation and fit
// metrics. Every ISA variant is bit-identical to the scalar reference:
//   * elementwise ops use only IEEE-exact instructions (add/sub/mul/div/sqrt),
//   * reductions accumulate into four fixed lanes (element i goes to lane
//     i % 4) and combine as (l0 + l1) + (l2 + l3),
//   * pair counts are exact integers.
// The project is compiled with -ffp-contract=off so no variant fuses a
// multiply-add the others do not.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace eqgym::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;  // pairs with x_i == x_j (including joint ties)
  std::int64_t tied_y = 0;  // pairs with y_i == y_j (including joint ties)
  std::int64_t pairs = 0;

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

using CSpan = std::span<const double>;
using Span = std::span<double>;
using ErrSpan = std::span<std::uint8_t>;

struct Kernels {
  Isa isa;

  void (*add)(CSpan a, CSpan b, Span out);
  void (*sub)(CSpan a, CSpan b, Span out);
  void (*mul)(CSpan a, CSpan b, Span out);
  // No zero check; callers flag zero divisors first.
  void (*div)(CSpan a, CSpan b, Span out);
  void (*neg)(CSpan x, Span out);
  void (*abs)(CSpan x, Span out);
  // Negative lanes produce NaN; callers flag them first.
  void (*sqrt)(CSpan x, Span out);

  // Each flag_* writes `code` into err[i] for lanes where err[i] == 0 and the
  // predicate holds, leaving earlier errors untouched.
  void (*flag_zero)(CSpan x, ErrSpan err, std::uint8_t code);
  void (*flag_negative)(CSpan x, ErrSpan err, std::uint8_t code);
  void (*flag_nonpositive)(CSpan x, ErrSpan err, std::uint8_t code);
  void (*flag_abs_gt_one)(CSpan x, ErrSpan err, std::uint8_t code);
  // NaN, +-inf, or |x| > limit.
  void (*flag_overflow)(CSpan x, double limit, ErrSpan err, std::uint8_t code);

  double (*sum)(CSpan x);
  // sum of (a_i - b_i)^2
  double (*sum_sq_diff)(CSpan a, CSpan b);
  // sum of (x_i - c)^2
  double (*sum_sq_dev)(CSpan x, double c);
  // sum over |obs_i| > floor of |pred_i - obs_i| / |obs_i|; `count` receives
  // the number of included lanes.
  double (*sum_abs_rel_err)(CSpan pred, CSpan obs, double floor, std::size_t& count);

  PairCounts (*pair_counts)(CSpan x, CSpan y);
};

const Kernels& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks it.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// The best supported variant, unless overridden by force_isa() or the
// EQGYM_SIMD environment variable ("scalar", "avx2", "neon").
const Kernels& active_kernels();

// Returns false (and changes nothing) if `isa` is unavailable here.
bool force_isa(Isa isa);
void reset_isa();

}  // namespace eqgym::simd
