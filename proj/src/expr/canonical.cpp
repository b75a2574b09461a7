#include "eqgym/expr/canonical.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "eqgym/expr/eval.hpp"

namespace eqgym::expr {

namespace {

// Where x**p is defined, as a function of the exponent alone. Overflow is
// ignored throughout this file.
enum class Dom { kAll, kNonZero, kNonNeg, kPositive };

Dom exponent_domain(double p) {
  if (ops::is_integer(p)) return p >= 0 ? Dom::kAll : Dom::kNonZero;
  return p > 0 ? Dom::kNonNeg : Dom::kPositive;
}

Dom intersect(Dom a, Dom b) {
  if (a == Dom::kAll) return b;
  if (b == Dom::kAll) return a;
  if (a == b) return a;
  return Dom::kPositive;  // any two distinct restricted sets meet in x > 0
}

bool is_even_integer(double p) { return ops::is_integer(p) && ops::is_integer(p / 2); }

// Domain of (x**a)**e expressed on x.
Dom nested_domain(double a, double e) {
  Dom inner = exponent_domain(a);
  if (a == 0) return inner;
  switch (exponent_domain(e)) {
    case Dom::kAll: return inner;
    case Dom::kNonZero: return intersect(inner, Dom::kNonZero);
    case Dom::kNonNeg:
      if (ops::is_integer(a) && !is_even_integer(a)) return intersect(inner, Dom::kNonNeg);
      return inner;
    case Dom::kPositive:
      if (ops::is_integer(a) && !is_even_integer(a)) return intersect(inner, Dom::kPositive);
      return intersect(inner, Dom::kNonZero);
  }
  return inner;
}

bool is_number(const Expression& e) { return e.is_constant(); }

// True when e evaluates without DomainError for every finite binding
// (ignoring overflow). Only such subtrees may be dropped by a rewrite.
bool total(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::kConstant:
    case Expression::Kind::kNamedConstant:
    case Expression::Kind::kVariable:
      return true;
    case Expression::Kind::kUnary:
      switch (e.unary_op()) {
        case UnaryOp::kSqrt:
        case UnaryOp::kAsin:
        case UnaryOp::kAcos:
        case UnaryOp::kLog:
          return false;
        default:
          return total(e.child());
      }
    case Expression::Kind::kBinary:
      switch (e.binary_op()) {
        case BinaryOp::kAdd:
        case BinaryOp::kSub:
        case BinaryOp::kMul:
          return total(e.lhs()) && total(e.rhs());
        case BinaryOp::kDiv:
          return false;
        case BinaryOp::kPow:
          if (is_number(e.rhs()) && exponent_domain(e.rhs().constant_value()) == Dom::kAll) return total(e.lhs());
          if (is_number(e.lhs()) && e.lhs().constant_value() > 0) return total(e.rhs());
          return false;
      }
  }
  return false;
}

using SortKey = std::tuple<int, std::string, std::string>;

SortKey sort_key(const Expression& e) {
  return {static_cast<int>(e.kind()), e.is_variable() ? e.variable_name() : std::string(), render(e)};
}

void sort_canonical(std::vector<Expression>& items) {
  std::vector<std::pair<SortKey, Expression>> keyed;
  keyed.reserve(items.size());
  for (auto& it : items) keyed.emplace_back(sort_key(it), it);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < items.size(); ++i) items[i] = keyed[i].second;
}

Expression chain(BinaryOp op, const std::vector<Expression>& items) {
  Expression acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = Expression::binary(op, acc, items[i]);
  return acc;
}

double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double ordered_product(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

void flatten(const Expression& e, BinaryOp op, std::vector<Expression>& out) {
  if (e.is_binary() && e.binary_op() == op) {
    flatten(e.lhs(), op, out);
    flatten(e.rhs(), op, out);
  } else {
    out.push_back(e);
  }
}

class Canonicalizer {
 public:
  Expression run(const Expression& e) {
    switch (e.kind()) {
      case Expression::Kind::kConstant:
      case Expression::Kind::kNamedConstant:
      case Expression::Kind::kVariable:
        return e;
      case Expression::Kind::kUnary:
        return unary(e.unary_op(), run(e.child()));
      case Expression::Kind::kBinary:
        break;
    }
    Expression l = run(e.lhs());
    Expression r = run(e.rhs());
    switch (e.binary_op()) {
      case BinaryOp::kAdd: return sum({l, r});
      case BinaryOp::kSub: return sum({l, product({Expression::constant(-1.0), r})});
      case BinaryOp::kMul: return product({l, r});
      case BinaryOp::kDiv: return product({l, power(r, Expression::constant(-1.0))});
      case BinaryOp::kPow: return power(l, r);
    }
    return e;
  }

 private:
  Expression unary(UnaryOp op, const Expression& c) {
    if (op == UnaryOp::kNeg) return product({Expression::constant(-1.0), c});
    if (op == UnaryOp::kSqrt) return power(c, Expression::constant(0.5));
    if (is_number(c)) {
      double out = 0.0;
      if (ops::unary(op, c.constant_value(), out) == 0) return Expression::constant(out);
    }
    return Expression::unary(op, c);
  }

  Expression power(const Expression& base, const Expression& exponent) {
    if (is_number(base) && is_number(exponent)) {
      double out = 0.0;
      if (ops::pow(base.constant_value(), exponent.constant_value(), out) == 0) return Expression::constant(out);
      return Expression::binary(BinaryOp::kPow, base, exponent);
    }
    if (!is_number(exponent)) return Expression::binary(BinaryOp::kPow, base, exponent);

    double p = exponent.constant_value();
    if (p == 1.0) return base;
    if (p == 0.0) {
      return total(base) ? Expression::constant(1.0) : Expression::binary(BinaryOp::kPow, base, exponent);
    }
    if (base.is_binary() && base.binary_op() == BinaryOp::kPow && is_number(base.rhs())) {
      double a = base.rhs().constant_value();
      double merged = a * p;
      // (x**a)**p == x**(a*p) needs p integral or x >= 0 (a non-integral),
      // and must not change where the expression is defined.
      bool value_ok = ops::is_integer(p) || !ops::is_integer(a);
      if (value_ok && std::isfinite(merged) && nested_domain(a, p) == exponent_domain(merged)) {
        return power(base.lhs(), Expression::constant(merged));
      }
    }
    return Expression::binary(BinaryOp::kPow, base, exponent);
  }

  struct Factor {
    Expression base;
    double exponent;
  };

  static Factor split_factor(const Expression& f) {
    if (f.is_binary() && f.binary_op() == BinaryOp::kPow && is_number(f.rhs()) && !is_number(f.lhs())) {
      return {f.lhs(), f.rhs().constant_value()};
    }
    return {f, 1.0};
  }

  Expression product(std::vector<Expression> operands) {
    std::vector<Expression> flat;
    for (const auto& op : operands) flatten(op, BinaryOp::kMul, flat);

    std::vector<double> coefs;
    std::map<std::string, std::pair<Expression, std::vector<double>>> groups;
    for (const auto& f : flat) {
      if (is_number(f)) {
        coefs.push_back(f.constant_value());
        continue;
      }
      Factor s = split_factor(f);
      auto [it, fresh] = groups.try_emplace(render(s.base), s.base, std::vector<double>{});
      it->second.second.push_back(s.exponent);
    }
    double coef = ordered_product(coefs);

    std::vector<Expression> factors;
    bool all_total = true;
    for (auto& [key, group] : groups) {
      auto& [base, exps] = group;
      std::sort(exps.begin(), exps.end());
      Dom meet = Dom::kAll;
      for (double x : exps) meet = intersect(meet, exponent_domain(x));
      double merged = ordered_sum(exps);
      if (exps.size() == 1 || exponent_domain(merged) == meet) {
        Expression f = power(base, Expression::constant(merged));
        if (f.is_constant()) {
          coef *= f.constant_value();
        } else {
          factors.push_back(f);
        }
      } else {
        for (double x : exps) factors.push_back(power(base, Expression::constant(x)));
      }
    }
    for (const auto& f : factors) all_total = all_total && total(f);

    if (factors.empty()) return Expression::constant(coef);
    if (coef == 0.0 && all_total) return Expression::constant(0.0);
    sort_canonical(factors);
    if (coef != 1.0) factors.insert(factors.begin(), Expression::constant(coef));
    return chain(BinaryOp::kMul, factors);
  }

  struct Term {
    double coef;
    Expression rest;
  };

  static Term split_term(const Expression& t) {
    if (t.is_binary() && t.binary_op() == BinaryOp::kMul) {
      std::vector<Expression> fs;
      flatten(t, BinaryOp::kMul, fs);
      if (is_number(fs.front())) {
        double c = fs.front().constant_value();
        fs.erase(fs.begin());
        return {c, chain(BinaryOp::kMul, fs)};
      }
    }
    return {1.0, t};
  }

  Expression sum(std::vector<Expression> operands) {
    std::vector<Expression> flat;
    for (const auto& op : operands) flatten(op, BinaryOp::kAdd, flat);

    std::vector<double> constants;
    std::map<std::string, std::pair<Expression, std::vector<double>>> groups;
    for (const auto& t : flat) {
      if (is_number(t)) {
        constants.push_back(t.constant_value());
        continue;
      }
      Term s = split_term(t);
      auto [it, fresh] = groups.try_emplace(render(s.rest), s.rest, std::vector<double>{});
      it->second.second.push_back(s.coef);
    }

    std::vector<Expression> terms;
    for (auto& [key, group] : groups) {
      auto& [rest, coefs] = group;
      double c = ordered_sum(coefs);
      if (c == 0.0 && total(rest)) continue;
      terms.push_back(product({Expression::constant(c), rest}));
    }
    double k = ordered_sum(constants);
    if (k != 0.0 || terms.empty()) terms.push_back(Expression::constant(k));
    if (terms.size() == 1) return terms.front();
    sort_canonical(terms);
    return chain(BinaryOp::kAdd, terms);
  }
};

}  // namespace

Expression canonicalize(const Expression& e) {
  // A single pass can expose new merges (e.g. a combined exponent that now
  // allows flattening a nested power), so iterate to a fixed point.
  Canonicalizer c;
  Expression cur = c.run(e);
  for (int i = 0; i < 16; ++i) {
    Expression next = c.run(cur);
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

}  // namespace eqgym::expr
