#include <cmath>

#include "eqgym/simd/kernels.hpp"

namespace eqgym::simd {

namespace {

void add(CSpan a, CSpan b, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
}
void sub(CSpan a, CSpan b, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
}
void mul(CSpan a, CSpan b, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}
void div(CSpan a, CSpan b, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] / b[i];
}
void neg(CSpan x, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -x[i];
}
void abs(CSpan x, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(x[i]);
}
void sqrt(CSpan x, Span out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(x[i]);
}

template <typename Pred>
void flag_where(CSpan x, ErrSpan err, std::uint8_t code, Pred pred) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (err[i] == 0 && pred(x[i])) err[i] = code;
  }
}

void flag_zero(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_where(x, err, code, [](double v) { return v == 0.0; });
}
void flag_negative(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_where(x, err, code, [](double v) { return v < 0.0; });
}
void flag_nonpositive(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_where(x, err, code, [](double v) { return v <= 0.0; });
}
void flag_abs_gt_one(CSpan x, ErrSpan err, std::uint8_t code) {
  flag_where(x, err, code, [](double v) { return v < -1.0 || v > 1.0; });
}
void flag_overflow(CSpan x, double limit, ErrSpan err, std::uint8_t code) {
  flag_where(x, err, code, [limit](double v) { return !(std::fabs(v) <= limit); });
}

double combine(const double (&lane)[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

double sum(CSpan x) {
  double lane[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) lane[i % 4] += x[i];
  return combine(lane);
}

double sum_sq_diff(CSpan a, CSpan b) {
  double lane[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    lane[i % 4] += d * d;
  }
  return combine(lane);
}

double sum_sq_dev(CSpan x, double c) {
  double lane[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - c;
    lane[i % 4] += d * d;
  }
  return combine(lane);
}

double sum_abs_rel_err(CSpan pred, CSpan obs, double floor, std::size_t& count) {
  double lane[4] = {0, 0, 0, 0};
  count = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double mag = std::fabs(obs[i]);
    double term = 0.0;
    if (mag > floor) {
      term = std::fabs(pred[i] - obs[i]) / mag;
      ++count;
    }
    lane[i % 4] += term;
  }
  return combine(lane);
}

PairCounts pair_counts(CSpan x, CSpan y) {
  PairCounts pc;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool xgt = x[i] > x[j], xlt = x[i] < x[j];
      bool ygt = y[i] > y[j], ylt = y[i] < y[j];
      pc.concordant += (xgt && ygt) || (xlt && ylt);
      pc.discordant += (xgt && ylt) || (xlt && ygt);
      pc.tied_x += x[i] == x[j];
      pc.tied_y += y[i] == y[j];
    }
  }
  pc.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n > 0 ? n - 1 : 0) / 2;
  return pc;
}

constexpr Kernels kScalar{
    Isa::kScalar,   add,           sub,       mul,       div,         neg,           abs,
    sqrt,           flag_zero,     flag_negative, flag_nonpositive, flag_abs_gt_one, flag_overflow,
    sum,            sum_sq_diff,   sum_sq_dev, sum_abs_rel_err, pair_counts,
};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace eqgym::simd
