#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "eqgym/expr/ast.hpp"

namespace eqgym::expr {

// 0 is reserved for "no error" in the batch evaluator's per-lane code arrays.
enum class DomainError : std::uint8_t {
  kDivisionByZero = 1,
  kNegativeSqrt,
  kLogNonpositive,
  kAsinAcosOutOfRange,
  kPowDomain,
  kOverflow,
  kUnboundVariable,
  kOutOfDomain,
};

std::string_view domain_error_name(DomainError e);

// Largest magnitude an evaluation may produce; anything beyond is overflow.
inline constexpr double kOverflowLimit = 1e300;

class EvalOutcome {
 public:
  static EvalOutcome value(double v) { return EvalOutcome(v, {}, {}); }
  static EvalOutcome error(DomainError e, std::string detail = {}) {
    return EvalOutcome(0.0, e, std::move(detail));
  }

  bool ok() const { return error_ == DomainError{}; }
  explicit operator bool() const { return ok(); }
  double value() const { return value_; }
  DomainError error() const { return error_; }
  // Variable name for unbound-variable/out-of-domain; constraint text for
  // violated validity constraints; empty otherwise.
  const std::string& detail() const { return detail_; }

  friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;

 private:
  EvalOutcome(double v, DomainError e, std::string d) : value_(v), error_(e), detail_(std::move(d)) {}
  double value_;
  DomainError error_;
  std::string detail_;
};

using Bindings = std::map<std::string, double, std::less<>>;

// Never throws; every non-finite or |v| > kOverflowLimit intermediate is
// reported as kOverflow.
EvalOutcome evaluate(const Expression& e, const Bindings& bindings);

namespace ops {

// Scalar semantics of each operator, shared by the tree walker and the batch
// evaluator so both produce bit-identical results. Returns 0 on success or a
// DomainError code; `out` is only meaningful on success.
inline bool is_integer(double v) { return std::isfinite(v) && std::nearbyint(v) == v; }

inline std::uint8_t check_magnitude(double v) {
  return (std::isfinite(v) && std::fabs(v) <= kOverflowLimit) ? 0 : static_cast<std::uint8_t>(DomainError::kOverflow);
}

inline std::uint8_t pow(double base, double exponent, double& out) {
  if (base == 0.0 && exponent < 0.0) return static_cast<std::uint8_t>(DomainError::kDivisionByZero);
  if (base < 0.0 && !is_integer(exponent)) return static_cast<std::uint8_t>(DomainError::kPowDomain);
  out = std::pow(base, exponent);
  return check_magnitude(out);
}

inline std::uint8_t binary(BinaryOp op, double a, double b, double& out) {
  switch (op) {
    case BinaryOp::kAdd: out = a + b; break;
    case BinaryOp::kSub: out = a - b; break;
    case BinaryOp::kMul: out = a * b; break;
    case BinaryOp::kDiv:
      if (b == 0.0) return static_cast<std::uint8_t>(DomainError::kDivisionByZero);
      out = a / b;
      break;
    case BinaryOp::kPow: return pow(a, b, out);
  }
  return check_magnitude(out);
}

inline std::uint8_t unary(UnaryOp op, double x, double& out) {
  using E = DomainError;
  switch (op) {
    case UnaryOp::kNeg: out = -x; break;
    case UnaryOp::kAbs: out = std::fabs(x); break;
    case UnaryOp::kSqrt:
      if (x < 0.0) return static_cast<std::uint8_t>(E::kNegativeSqrt);
      out = std::sqrt(x);
      break;
    case UnaryOp::kSin: out = std::sin(x); break;
    case UnaryOp::kCos: out = std::cos(x); break;
    case UnaryOp::kTan: out = std::tan(x); break;
    case UnaryOp::kAsin:
      if (x < -1.0 || x > 1.0) return static_cast<std::uint8_t>(E::kAsinAcosOutOfRange);
      out = std::asin(x);
      break;
    case UnaryOp::kAcos:
      if (x < -1.0 || x > 1.0) return static_cast<std::uint8_t>(E::kAsinAcosOutOfRange);
      out = std::acos(x);
      break;
    case UnaryOp::kAtan: out = std::atan(x); break;
    case UnaryOp::kSinh: out = std::sinh(x); break;
    case UnaryOp::kCosh: out = std::cosh(x); break;
    case UnaryOp::kTanh: out = std::tanh(x); break;
    case UnaryOp::kExp: out = std::exp(x); break;
    case UnaryOp::kLog:
      if (x <= 0.0) return static_cast<std::uint8_t>(E::kLogNonpositive);
      out = std::log(x);
      break;
  }
  return check_magnitude(out);
}

inline constexpr double kPi = 3.141592653589793;

}  // namespace ops

}  // namespace eqgym::expr
