#include "eqgym/expr/batch.hpp"

#include <algorithm>
#include <stdexcept>

namespace eqgym::expr {

namespace {

constexpr std::uint8_t code_of(DomainError e) { return static_cast<std::uint8_t>(e); }

}  // namespace

CompiledExpression::CompiledExpression(const Expression& e, std::vector<std::string> slots)
    : slots_(std::move(slots)) {
  compile(e);
  std::size_t depth = 0;
  for (const Instr& in : program_) {
    switch (in.code) {
      case OpCode::kConst:
      case OpCode::kVar:
      case OpCode::kUnbound:
        max_depth_ = std::max(max_depth_, ++depth);
        break;
      case OpCode::kUnary:
        break;
      case OpCode::kBinary:
        --depth;
        break;
    }
  }
}

void CompiledExpression::compile(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::kConstant:
      program_.push_back({OpCode::kConst, 0, 0, e.constant_value()});
      return;
    case Expression::Kind::kNamedConstant:
      program_.push_back({OpCode::kConst, 0, 0, ops::kPi});
      return;
    case Expression::Kind::kVariable: {
      auto it = std::find(slots_.begin(), slots_.end(), e.variable_name());
      if (it == slots_.end()) {
        program_.push_back({OpCode::kUnbound, 0, unbound_.size(), 0.0});
        unbound_.push_back(e.variable_name());
      } else {
        program_.push_back({OpCode::kVar, 0, static_cast<std::size_t>(it - slots_.begin()), 0.0});
      }
      return;
    }
    case Expression::Kind::kUnary:
      compile(e.child());
      program_.push_back({OpCode::kUnary, static_cast<std::uint8_t>(e.unary_op())});
      return;
    case Expression::Kind::kBinary:
      compile(e.lhs());
      compile(e.rhs());
      program_.push_back({OpCode::kBinary, static_cast<std::uint8_t>(e.binary_op())});
      return;
  }
}

EvalOutcome CompiledExpression::Result::outcome(std::size_t lane) const {
  if (errors[lane] == 0) return EvalOutcome::value(values[lane]);
  auto err = static_cast<DomainError>(errors[lane]);
  // The unbound name is not tracked per lane; the first unbound variable in
  // evaluation order is the one the tree walker would report.
  if (err == DomainError::kUnboundVariable && !unbound.empty()) return EvalOutcome::error(err, unbound.front());
  return EvalOutcome::error(err);
}

CompiledExpression::Result CompiledExpression::evaluate(std::span<const std::vector<double>> columns, std::size_t n,
                                                        const simd::Kernels& k) const {
  if (columns.size() != slots_.size()) throw std::invalid_argument("column count does not match slot count");
  for (const auto& c : columns) {
    if (c.size() < n) throw std::invalid_argument("column shorter than point count");
  }

  std::vector<std::vector<double>> stack(max_depth_, std::vector<double>(n));
  std::vector<std::uint8_t> err(n, 0);
  std::size_t top = 0;  // number of live stack entries
  const std::uint8_t overflow = code_of(DomainError::kOverflow);

  auto flag_all = [&](std::uint8_t code) {
    for (auto& e : err) {
      if (e == 0) e = code;
    }
  };

  for (const Instr& in : program_) {
    switch (in.code) {
      case OpCode::kConst: {
        auto& dst = stack[top++];
        std::fill(dst.begin(), dst.end(), in.value);
        if (ops::check_magnitude(in.value)) flag_all(overflow);
        break;
      }
      case OpCode::kVar: {
        auto& dst = stack[top++];
        std::copy_n(columns[in.slot].begin(), n, dst.begin());
        k.flag_overflow(dst, kOverflowLimit, err, overflow);
        break;
      }
      case OpCode::kUnbound: {
        auto& dst = stack[top++];
        std::fill(dst.begin(), dst.end(), 0.0);
        flag_all(code_of(DomainError::kUnboundVariable));
        break;
      }
      case OpCode::kUnary: {
        auto& x = stack[top - 1];
        auto op = static_cast<UnaryOp>(in.op);
        switch (op) {
          case UnaryOp::kNeg:
            k.neg(x, x);
            break;
          case UnaryOp::kAbs:
            k.abs(x, x);
            break;
          case UnaryOp::kSqrt:
            k.flag_negative(x, err, code_of(DomainError::kNegativeSqrt));
            k.sqrt(x, x);
            break;
          default:
            for (std::size_t i = 0; i < n; ++i) {
              if (err[i] != 0) continue;
              double out = 0.0;
              if (auto c = ops::unary(op, x[i], out)) {
                err[i] = c;
              } else {
                x[i] = out;
              }
            }
            break;
        }
        k.flag_overflow(x, kOverflowLimit, err, overflow);
        break;
      }
      case OpCode::kBinary: {
        auto& a = stack[top - 2];
        auto& b = stack[top - 1];
        auto op = static_cast<BinaryOp>(in.op);
        switch (op) {
          case BinaryOp::kAdd: k.add(a, b, a); break;
          case BinaryOp::kSub: k.sub(a, b, a); break;
          case BinaryOp::kMul: k.mul(a, b, a); break;
          case BinaryOp::kDiv:
            k.flag_zero(b, err, code_of(DomainError::kDivisionByZero));
            k.div(a, b, a);
            break;
          case BinaryOp::kPow:
            for (std::size_t i = 0; i < n; ++i) {
              if (err[i] != 0) continue;
              double out = 0.0;
              if (auto c = ops::pow(a[i], b[i], out)) {
                err[i] = c;
              } else {
                a[i] = out;
              }
            }
            break;
        }
        k.flag_overflow(a, kOverflowLimit, err, overflow);
        --top;
        break;
      }
    }
  }

  Result r;
  r.values = top == 1 ? std::move(stack[0]) : std::vector<double>(n, 0.0);
  r.errors = std::move(err);
  r.unbound = unbound_;
  return r;
}

}  // namespace eqgym::expr
