#include "eqgym/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace eqgym::simd {

#if defined(__aarch64__)

namespace {

// Two float64x2 registers stand in for the four reduction lanes.
struct Acc {
  float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
  float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3

  double finish(const double* tail, std::size_t from, std::size_t n) const {
    double lane[4];
    vst1q_f64(lane, lo);
    vst1q_f64(lane + 2, hi);
    for (std::size_t i = from; i < n; ++i) lane[i % 4] += tail[i - from];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
};

template <typename VecOp, typename ScalarOp>
inline void binary_loop(CSpan a, CSpan b, Span out, VecOp vop, ScalarOp sop) {
  std::size_t i = 0, n = out.size();
  for (; i + 2 <= n; i += 2) vst1q_f64(out.data() + i, vop(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

void add(CSpan a, CSpan b, Span out) {
  binary_loop(a, b, out, [](float64x2_t x, float64x2_t y) { return vaddq_f64(x, y); },
              [](double x, double y) { return x + y; });
}
void sub(CSpan a, CSpan b, Span out) {
  binary_loop(a, b, out, [](float64x2_t x, float64x2_t y) { return vsubq_f64(x, y); },
              [](double x, double y) { return x - y; });
}
void mul(CSpan a, CSpan b, Span out) {
  binary_loop(a, b, out, [](float64x2_t x, float64x2_t y) { return vmulq_f64(x, y); },
              [](double x, double y) { return x * y; });
}
void div(CSpan a, CSpan b, Span out) {
  binary_loop(a, b, out, [](float64x2_t x, float64x2_t y) { return vdivq_f64(x, y); },
              [](double x, double y) { return x / y; });
}

template <typename VecOp, typename ScalarOp>
inline void unary_loop(CSpan x, Span out, VecOp vop, ScalarOp sop) {
  std::size_t i = 0, n = out.size();
  for (; i + 2 <= n; i += 2) vst1q_f64(out.data() + i, vop(vld1q_f64(x.data() + i)));
  for (; i < n; ++i) out[i] = sop(x[i]);
}

void neg(CSpan x, Span out) {
  unary_loop(x, out, [](float64x2_t v) { return vnegq_f64(v); }, [](double v) { return -v; });
}
void abs(CSpan x, Span out) {
  unary_loop(x, out, [](float64x2_t v) { return vabsq_f64(v); }, [](double v) { return __builtin_fabs(v); });
}
void sqrt(CSpan x, Span out) {
  unary_loop(x, out, [](float64x2_t v) { return vsqrtq_f64(v); }, [](double v) { return __builtin_sqrt(v); });
}

template <typename VecPred, typename ScalarPred>
inline void flag_loop(CSpan x, ErrSpan err, std::uint8_t code, VecPred vpred, ScalarPred spred) {
  std::size_t i = 0, n = x.size();
  for (; i + 2 <= n; i += 2) {
    uint64x2_t m = vpred(vld1q_f64(x.data() + i));
    if (vgetq_lane_u64(m, 0) && err[i] == 0) err[i] = code;
    if (vgetq_lane_u64(m, 1) && err[i + 1] == 0) err[i + 1] = code;
  }
  for (; i < n; ++i) {
    if (err[i] == 0 && spred(x[i])) err[i] = code;
  }
}

void flag_zero(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop(x, err, code, [](float64x2_t v) { return vceqzq_f64(v); }, [](double v) { return v == 0.0; });
}
void flag_negative(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop(x, err, code, [](float64x2_t v) { return vcltzq_f64(v); }, [](double v) { return v < 0.0; });
}
void flag_nonpositive(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop(x, err, code, [](float64x2_t v) { return vclezq_f64(v); }, [](double v) { return v <= 0.0; });
}
void flag_abs_gt_one(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_loop(
      x, err, code, [](float64x2_t v) { return vcagtq_f64(v, vdupq_n_f64(1.0)); },
      [](double v) { return v < -1.0 || v > 1.0; });
}
void flag_overflow(CSpan x, double limit, ErrSpan err, std::uint8_t code) {
  flag_loop(
      x, err, code,
      [limit](float64x2_t v) { return veorq_u64(vcaleq_f64(v, vdupq_n_f64(limit)), vdupq_n_u64(~0ULL)); },
      [limit](double v) { return !(__builtin_fabs(v) <= limit); });
}

double sum(CSpan x) {
  Acc acc;
  std::size_t i = 0, n = x.size();
  for (; i + 4 <= n; i += 4) {
    acc.lo = vaddq_f64(acc.lo, vld1q_f64(x.data() + i));
    acc.hi = vaddq_f64(acc.hi, vld1q_f64(x.data() + i + 2));
  }
  return acc.finish(x.data() + i, i, n);
}

double sum_sq_diff(CSpan a, CSpan b) {
  Acc acc;
  std::size_t i = 0, n = a.size();
  for (; i + 4 <= n; i += 4) {
    float64x2_t d0 = vsubq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    float64x2_t d1 = vsubq_f64(vld1q_f64(a.data() + i + 2), vld1q_f64(b.data() + i + 2));
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(d0, d0));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(d1, d1));
  }
  double tail[4];
  std::size_t from = i;
  for (std::size_t k = 0; i < n; ++i, ++k) {
    double d = a[i] - b[i];
    tail[k] = d * d;
  }
  return acc.finish(tail, from, n);
}

double sum_sq_dev(CSpan x, double c) {
  Acc acc;
  const float64x2_t cv = vdupq_n_f64(c);
  std::size_t i = 0, n = x.size();
  for (; i + 4 <= n; i += 4) {
    float64x2_t d0 = vsubq_f64(vld1q_f64(x.data() + i), cv);
    float64x2_t d1 = vsubq_f64(vld1q_f64(x.data() + i + 2), cv);
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(d0, d0));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(d1, d1));
  }
  double tail[4];
  std::size_t from = i;
  for (std::size_t k = 0; i < n; ++i, ++k) {
    double d = x[i] - c;
    tail[k] = d * d;
  }
  return acc.finish(tail, from, n);
}

double sum_abs_rel_err(CSpan pred, CSpan obs, double floor, std::size_t& count) {
  Acc acc;
  const float64x2_t fl = vdupq_n_f64(floor);
  std::size_t i = 0, n = obs.size();
  count = 0;
  auto step = [&](std::size_t at, float64x2_t& lane) {
    float64x2_t o = vld1q_f64(obs.data() + at);
    float64x2_t mag = vabsq_f64(o);
    uint64x2_t keep = vcgtq_f64(mag, fl);
    float64x2_t term = vdivq_f64(vabsq_f64(vsubq_f64(vld1q_f64(pred.data() + at), o)), mag);
    lane = vaddq_f64(lane, vreinterpretq_f64_u64(vandq_u64(keep, vreinterpretq_u64_f64(term))));
    count += (vgetq_lane_u64(keep, 0) != 0) + (vgetq_lane_u64(keep, 1) != 0);
  };
  for (; i + 4 <= n; i += 4) {
    step(i, acc.lo);
    step(i + 2, acc.hi);
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
  return acc.finish(tail, from, n);
}

PairCounts pair_counts(CSpan x, CSpan y) {
  PairCounts pc;
  const std::size_t n = x.size();
  auto lanes = [](uint64x2_t m) { return static_cast<std::int64_t>((vgetq_lane_u64(m, 0) & 1) + (vgetq_lane_u64(m, 1) & 1)); };
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xi = vdupq_n_f64(x[i]);
    const float64x2_t yi = vdupq_n_f64(y[i]);
    std::size_t j = i + 1;
    for (; j + 2 <= n; j += 2) {
      float64x2_t xj = vld1q_f64(x.data() + j), yj = vld1q_f64(y.data() + j);
      uint64x2_t xgt = vcgtq_f64(xi, xj), xlt = vcltq_f64(xi, xj);
      uint64x2_t ygt = vcgtq_f64(yi, yj), ylt = vcltq_f64(yi, yj);
      pc.concordant += lanes(vorrq_u64(vandq_u64(xgt, ygt), vandq_u64(xlt, ylt)));
      pc.discordant += lanes(vorrq_u64(vandq_u64(xgt, ylt), vandq_u64(xlt, ygt)));
      pc.tied_x += lanes(vceqq_f64(xi, xj));
      pc.tied_y += lanes(vceqq_f64(yi, yj));
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

constexpr Kernels kNeon{
    Isa::kNeon,  add,         sub,        mul,           div,          neg,           abs,
    sqrt,        flag_zero,   flag_negative, flag_nonpositive, flag_abs_gt_one, flag_overflow,
    sum,         sum_sq_diff, sum_sq_dev, sum_abs_rel_err, pair_counts,
};

}  // namespace

const Kernels* neon_kernels() { return &kNeon; }

#else

const Kernels* neon_kernels() { return nullptr; }

#endif

}  // namespace eqgym::simd
