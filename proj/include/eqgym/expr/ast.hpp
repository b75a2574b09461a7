#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace eqgym::expr {

enum class UnaryOp {
  kNeg,
  kSqrt,
  kAbs,
  kSin,
  kCos,
  kTan,
  kAsin,
  kAcos,
  kAtan,
  kSinh,
  kCosh,
  kTanh,
  kExp,
  kLog,
};

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

enum class NamedConstantTag { kPi };

// Surface name of a function-style unary op ("sqrt", "sin", ...). kNeg has
// no function spelling and returns an empty view.
std::string_view function_name(UnaryOp op);
// Inverse of function_name; nullptr-like behaviour via bool return.
bool lookup_function(std::string_view name, UnaryOp& out);

std::string_view binary_symbol(BinaryOp op);

class Expression;

struct Constant {
  double value;
};

struct NamedConstant {
  NamedConstantTag tag;
};

struct Variable {
  std::string name;
};

struct Unary;
struct Binary;

// Immutable expression tree. Nodes are shared between copies, so copying an
// Expression is cheap and never deep-copies.
class Expression {
 public:
  enum class Kind { kConstant = 0, kNamedConstant = 1, kVariable = 2, kUnary = 3, kBinary = 4 };

  static Expression constant(double value);
  static Expression pi();
  static Expression variable(std::string name);
  static Expression unary(UnaryOp op, Expression child);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

  Kind kind() const;

  bool is_constant() const { return kind() == Kind::kConstant; }
  bool is_variable() const { return kind() == Kind::kVariable; }
  bool is_unary() const { return kind() == Kind::kUnary; }
  bool is_binary() const { return kind() == Kind::kBinary; }

  // Accessors; calling the wrong one for the node kind throws std::bad_variant_access.
  double constant_value() const;
  NamedConstantTag named_tag() const;
  const std::string& variable_name() const;
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  const Expression& child() const;
  const Expression& lhs() const;
  const Expression& rhs() const;

  friend bool operator==(const Expression& a, const Expression& b);
  friend bool operator!=(const Expression& a, const Expression& b) { return !(a == b); }

  // Node count, used by generators and for diagnostics.
  std::size_t size() const;

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Unary {
  UnaryOp op;
  Expression child;
};

struct Binary {
  BinaryOp op;
  Expression lhs;
  Expression rhs;
};

struct Expression::Node {
  std::variant<Constant, NamedConstant, Variable, Unary, Binary> data;
};

// Fully parenthesized surface text; parse(render(e)) == e.
std::string render(const Expression& e);

std::set<std::string> free_variables(const Expression& e);

bool is_identifier(std::string_view token);

// Replaces every Variable whose name is a key of `renames`. Names absent
// from the map are left untouched.
template <typename Map>
Expression rename_variables(const Expression& e, const Map& renames) {
  switch (e.kind()) {
    case Expression::Kind::kVariable: {
      auto it = renames.find(e.variable_name());
      return it == renames.end() ? e : Expression::variable(it->second);
    }
    case Expression::Kind::kUnary:
      return Expression::unary(e.unary_op(), rename_variables(e.child(), renames));
    case Expression::Kind::kBinary:
      return Expression::binary(e.binary_op(), rename_variables(e.lhs(), renames),
                                rename_variables(e.rhs(), renames));
    default:
      return e;
  }
}

}  // namespace eqgym::expr
