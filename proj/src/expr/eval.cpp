#include "eqgym/expr/eval.hpp"

namespace eqgym::expr {

std::string_view domain_error_name(DomainError e) {
  switch (e) {
    case DomainError::kDivisionByZero: return "division-by-zero";
    case DomainError::kNegativeSqrt: return "negative-sqrt";
    case DomainError::kLogNonpositive: return "log-nonpositive";
    case DomainError::kAsinAcosOutOfRange: return "asin-acos-out-of-range";
    case DomainError::kPowDomain: return "pow-domain";
    case DomainError::kOverflow: return "overflow";
    case DomainError::kUnboundVariable: return "unbound-variable";
    case DomainError::kOutOfDomain: return "out-of-domain";
  }
  return "none";
}

namespace {

struct Walker {
  const Bindings& bindings;
  DomainError error{};
  std::string detail;

  bool fail(std::uint8_t code) {
    error = static_cast<DomainError>(code);
    return false;
  }

  bool eval(const Expression& e, double& out) {
    switch (e.kind()) {
      case Expression::Kind::kConstant:
        out = e.constant_value();
        if (auto c = ops::check_magnitude(out)) return fail(c);
        return true;
      case Expression::Kind::kNamedConstant:
        out = ops::kPi;
        return true;
      case Expression::Kind::kVariable: {
        auto it = bindings.find(e.variable_name());
        if (it == bindings.end()) {
          detail = e.variable_name();
          return fail(static_cast<std::uint8_t>(DomainError::kUnboundVariable));
        }
        out = it->second;
        if (auto c = ops::check_magnitude(out)) return fail(c);
        return true;
      }
      case Expression::Kind::kUnary: {
        double x;
        if (!eval(e.child(), x)) return false;
        if (auto c = ops::unary(e.unary_op(), x, out)) return fail(c);
        return true;
      }
      case Expression::Kind::kBinary: {
        double a, b;
        if (!eval(e.lhs(), a) || !eval(e.rhs(), b)) return false;
        if (auto c = ops::binary(e.binary_op(), a, b, out)) return fail(c);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

EvalOutcome evaluate(const Expression& e, const Bindings& bindings) {
  Walker w{bindings, {}, {}};
  double v = 0.0;
  if (w.eval(e, v)) return EvalOutcome::value(v);
  return EvalOutcome::error(w.error, std::move(w.detail));
}

}  // namespace eqgym::expr
