#include "eqgym/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define EQGYM_HAVE_AVX2_VARIANT 1
#include <immintrin.h>
#endif

namespace eqgym::simd {

#if EQGYM_HAVE_AVX2_VARIANT

// Functions carry target("avx2") instead of compiling the file with -mavx2,
// so inline library code instantiated here stays baseline x86-64.
#define EQGYM_AVX2 __attribute__((target("avx2")))

namespace {

enum class Bin { kAdd, kSub, kMul, kDiv };

template <Bin op>
EQGYM_AVX2 inline void binary_loop(CSpan a, CSpan b, Span out) {
  std::size_t i = 0, n = out.size();
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(a.data() + i), y = _mm256_loadu_pd(b.data() + i), r;
    if constexpr (op == Bin::kAdd) r = _mm256_add_pd(x, y);
    if constexpr (op == Bin::kSub) r = _mm256_sub_pd(x, y);
    if constexpr (op == Bin::kMul) r = _mm256_mul_pd(x, y);
    if constexpr (op == Bin::kDiv) r = _mm256_div_pd(x, y);
    _mm256_storeu_pd(out.data() + i, r);
  }
  for (; i < n; ++i) {
    if constexpr (op == Bin::kAdd) out[i] = a[i] + b[i];
    if constexpr (op == Bin::kSub) out[i] = a[i] - b[i];
    if constexpr (op == Bin::kMul) out[i] = a[i] * b[i];
    if constexpr (op == Bin::kDiv) out[i] = a[i] / b[i];
  }
}

EQGYM_AVX2 void add(CSpan a, CSpan b, Span out) { binary_loop<Bin::kAdd>(a, b, out); }
EQGYM_AVX2 void sub(CSpan a, CSpan b, Span out) { binary_loop<Bin::kSub>(a, b, out); }
EQGYM_AVX2 void mul(CSpan a, CSpan b, Span out) { binary_loop<Bin::kMul>(a, b, out); }
EQGYM_AVX2 void div(CSpan a, CSpan b, Span out) { binary_loop<Bin::kDiv>(a, b, out); }

EQGYM_AVX2 void neg(CSpan x, Span out) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0, n = out.size();
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, _mm256_xor_pd(_mm256_loadu_pd(x.data() + i), sign));
  for (; i < n; ++i) out[i] = -x[i];
}

EQGYM_AVX2 void abs(CSpan x, Span out) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0, n = out.size();
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_andnot_pd(sign, _mm256_loadu_pd(x.data() + i)));
  }
  for (; i < n; ++i) out[i] = __builtin_fabs(x[i]);
}

EQGYM_AVX2 void sqrt(CSpan x, Span out) {
  std::size_t i = 0, n = out.size();
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(_mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) out[i] = __builtin_sqrt(x[i]);
}

// Applies a lane mask produced by a vector compare to the error codes.
EQGYM_AVX2 inline void apply_mask(int bits, std::uint8_t* err, std::uint8_t code) {
  for (int k = 0; k < 4; ++k) {
    if (((bits >> k) & 1) && err[k] == 0) err[k] = code;
  }
}

enum class Pred { kZero, kNegative, kNonPositive, kAbsGtOne, kOverflow };

template <Pred pred>
EQGYM_AVX2 inline void flag_loop(CSpan x, ErrSpan err, std::uint8_t code, double limit = 0.0) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d lim = _mm256_set1_pd(limit);
  std::size_t i = 0, n = x.size();
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x.data() + i), m;
    if constexpr (pred == Pred::kZero) m = _mm256_cmp_pd(v, zero, _CMP_EQ_OQ);
    if constexpr (pred == Pred::kNegative) m = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
    if constexpr (pred == Pred::kNonPositive) m = _mm256_cmp_pd(v, zero, _CMP_LE_OQ);
    if constexpr (pred == Pred::kAbsGtOne) m = _mm256_cmp_pd(_mm256_andnot_pd(sign, v), one, _CMP_GT_OQ);
    // NOT(|v| <= limit) is true for NaN, matching the scalar predicate.
    if constexpr (pred == Pred::kOverflow) m = _mm256_cmp_pd(_mm256_andnot_pd(sign, v), lim, _CMP_NLE_UQ);
    int bits = _mm256_movemask_pd(m);
    if (bits != 0) apply_mask(bits, err.data() + i, code);
  }
  for (; i < n; ++i) {
    double v = x[i];
    bool hit = false;
    if constexpr (pred == Pred::kZero) hit = v == 0.0;
    if constexpr (pred == Pred::kNegative) hit = v < 0.0;
    if constexpr (pred == Pred::kNonPositive) hit = v <= 0.0;
    if constexpr (pred == Pred::kAbsGtOne) hit = v < -1.0 || v > 1.0;
    if constexpr (pred == Pred::kOverflow) hit = !(__builtin_fabs(v) <= limit);
    if (hit && err[i] == 0) err[i] = code;
  }
}

EQGYM_AVX2 void flag_zero(CSpan x, ErrSpan err, std::uint8_t code) { flag_loop<Pred::kZero>(x, err, code); }
EQGYM_AVX2 void flag_negative(CSpan x, ErrSpan err, std::uint8_t code) { flag_loop<Pred::kNegative>(x, err, code); }
EQGYM_AVX2 void flag_nonpositive(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop<Pred::kNonPositive>(x, err, code);
}
EQGYM_AVX2 void flag_abs_gt_one(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop<Pred::kAbsGtOne>(x, err, code);
}
EQGYM_AVX2 void flag_overflow(CSpan x, double limit, ErrSpan err, std::uint8_t code) {
  flag_loop<Pred::kOverflow>(x, err, code, limit);
}

EQGYM_AVX2 inline double finish(__m256d acc, const double* tail_src, std::size_t from, std::size_t n) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = from; i < n; ++i) lane[i % 4] += tail_src[i - from];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

EQGYM_AVX2 double sum(CSpan x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0, n = x.size();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  return finish(acc, x.data() + i, i, n);
}

EQGYM_AVX2 double sum_sq_diff(CSpan a, CSpan b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0, n = a.size();
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double tail[4];
  std::size_t from = i;
  for (std::size_t k = 0; i < n; ++i, ++k) {
    double d = a[i] - b[i];
    tail[k] = d * d;
  }
  return finish(acc, tail, from, n);
}

EQGYM_AVX2 double sum_sq_dev(CSpan x, double c) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0, n = x.size();
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), cv);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double tail[4];
  std::size_t from = i;
  for (std::size_t k = 0; i < n; ++i, ++k) {
    double d = x[i] - c;
    tail[k] = d * d;
  }
  return finish(acc, tail, from, n);
}

EQGYM_AVX2 double sum_abs_rel_err(CSpan pred, CSpan obs, double floor, std::size_t& count) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d fl = _mm256_set1_pd(floor);
  std::size_t i = 0, n = obs.size();
  count = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d o = _mm256_loadu_pd(obs.data() + i);
    __m256d p = _mm256_loadu_pd(pred.data() + i);
    __m256d mag = _mm256_andnot_pd(sign, o);
    __m256d keep = _mm256_cmp_pd(mag, fl, _CMP_GT_OQ);
    __m256d term = _mm256_div_pd(_mm256_andnot_pd(sign, _mm256_sub_pd(p, o)), mag);
    acc = _mm256_add_pd(acc, _mm256_and_pd(keep, term));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(keep))));
  }
  double tail[4];
  std::size_t from = i;
  for (std::size_t k = 0; i < n; ++i, ++k) {
    double mag = __builtin_fabs(obs[i]);
    tail[k] = 0.0;
    if (mag > floor) {
      tail[k] = __builtin_fabs(pred[i] - obs[i]) / mag;
      ++count;
    }
  }
  return finish(acc, tail, from, n);
}

EQGYM_AVX2 PairCounts pair_counts(CSpan x, CSpan y) {
  PairCounts pc;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    const __m256d yi = _mm256_set1_pd(y[i]);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      __m256d xj = _mm256_loadu_pd(x.data() + j);
      __m256d yj = _mm256_loadu_pd(y.data() + j);
      __m256d xgt = _mm256_cmp_pd(xi, xj, _CMP_GT_OQ), xlt = _mm256_cmp_pd(xi, xj, _CMP_LT_OQ);
      __m256d ygt = _mm256_cmp_pd(yi, yj, _CMP_GT_OQ), ylt = _mm256_cmp_pd(yi, yj, _CMP_LT_OQ);
      __m256d conc = _mm256_or_pd(_mm256_and_pd(xgt, ygt), _mm256_and_pd(xlt, ylt));
      __m256d disc = _mm256_or_pd(_mm256_and_pd(xgt, ylt), _mm256_and_pd(xlt, ygt));
      pc.concordant += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(conc)));
      pc.discordant += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(disc)));
      pc.tied_x += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(xi, xj, _CMP_EQ_OQ))));
      pc.tied_y += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(yi, yj, _CMP_EQ_OQ))));
    }
    for (; j < n; ++j) {
      bool xg = x[i] > x[j], xl = x[i] < x[j];
      bool yg = y[i] > y[j], yl = y[i] < y[j];
      pc.concordant += (xg && yg) || (xl && yl);
      pc.discordant += (xg && yl) || (xl && yg);
      pc.tied_x += x[i] == x[j];
      pc.tied_y += y[i] == y[j];
    }
  }
  pc.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n > 0 ? n - 1 : 0) / 2;
  return pc;
}

constexpr Kernels kAvx2{
    Isa::kAvx2,  add,         sub,        mul,           div,          neg,           abs,
    sqrt,        flag_zero,   flag_negative, flag_nonpositive, flag_abs_gt_one, flag_overflow,
    sum,         sum_sq_diff, sum_sq_dev, sum_abs_rel_err, pair_counts,
};

}  // namespace

const Kernels* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

#else

const Kernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace eqgym::simd
