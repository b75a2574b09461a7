#include "eqgym/expr/ast.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace eqgym::expr {

namespace {

struct FunctionEntry {
  UnaryOp op;
  std::string_view name;
};

constexpr std::array<FunctionEntry, 13> kFunctions{{
    {UnaryOp::kSqrt, "sqrt"},
    {UnaryOp::kAbs, "abs"},
    {UnaryOp::kSin, "sin"},
    {UnaryOp::kCos, "cos"},
    {UnaryOp::kTan, "tan"},
    {UnaryOp::kAsin, "arcsin"},
    {UnaryOp::kAcos, "arccos"},
    {UnaryOp::kAtan, "arctan"},
    {UnaryOp::kSinh, "sinh"},
    {UnaryOp::kCosh, "cosh"},
    {UnaryOp::kTanh, "tanh"},
    {UnaryOp::kExp, "exp"},
    {UnaryOp::kLog, "log"},
}};

// numpy spells inverse trig as arcsin/arccos/arctan; the short C spellings
// are accepted on input as aliases.
constexpr std::array<FunctionEntry, 3> kAliases{{
    {UnaryOp::kAsin, "asin"},
    {UnaryOp::kAcos, "acos"},
    {UnaryOp::kAtan, "atan"},
}};

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

void render_into(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case Expression::Kind::kConstant: {
      double v = e.constant_value();
      if (std::signbit(v)) {
        out += "(-";
        out += format_number(-v);
        out += ')';
      } else {
        out += format_number(v);
      }
      return;
    }
    case Expression::Kind::kNamedConstant:
      out += "np.pi";
      return;
    case Expression::Kind::kVariable:
      out += e.variable_name();
      return;
    case Expression::Kind::kUnary: {
      if (e.unary_op() == UnaryOp::kNeg) {
        // A bare "-<literal>" would re-parse as a negative Constant, so a
        // non-negative literal operand gets its own parentheses.
        const Expression& c = e.child();
        bool guard = c.is_constant() && !std::signbit(c.constant_value());
        out += guard ? "(-(" : "(-";
        render_into(c, out);
        out += guard ? "))" : ")";
        return;
      }
      out += "np.";
      out += function_name(e.unary_op());
      out += '(';
      render_into(e.child(), out);
      out += ')';
      return;
    }
    case Expression::Kind::kBinary:
      out += '(';
      render_into(e.lhs(), out);
      out += ' ';
      out += binary_symbol(e.binary_op());
      out += ' ';
      render_into(e.rhs(), out);
      out += ')';
      return;
  }
}

void collect_variables(const Expression& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expression::Kind::kVariable:
      out.insert(e.variable_name());
      return;
    case Expression::Kind::kUnary:
      collect_variables(e.child(), out);
      return;
    case Expression::Kind::kBinary:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
      return;
    default:
      return;
  }
}

}  // namespace

std::string_view function_name(UnaryOp op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return {};
}

bool lookup_function(std::string_view name, UnaryOp& out) {
  for (const auto& f : kFunctions) {
    if (f.name == name) {
      out = f.op;
      return true;
    }
  }
  for (const auto& f : kAliases) {
    if (f.name == name) {
      out = f.op;
      return true;
    }
  }
  return false;
}

std::string_view binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kPow: return "**";
  }
  return "?";
}

Expression Expression::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("expression constants must be finite");
  return Expression(std::make_shared<const Node>(Node{Constant{value}}));
}

Expression Expression::pi() {
  return Expression(std::make_shared<const Node>(Node{NamedConstant{NamedConstantTag::kPi}}));
}

Expression Expression::variable(std::string name) {
  if (!is_identifier(name)) throw std::invalid_argument("invalid variable identifier: '" + name + "'");
  return Expression(std::make_shared<const Node>(Node{Variable{std::move(name)}}));
}

Expression Expression::unary(UnaryOp op, Expression child) {
  return Expression(std::make_shared<const Node>(Node{Unary{op, std::move(child)}}));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}}));
}

Expression::Kind Expression::kind() const { return static_cast<Kind>(node_->data.index()); }

double Expression::constant_value() const { return std::get<Constant>(node_->data).value; }
NamedConstantTag Expression::named_tag() const { return std::get<NamedConstant>(node_->data).tag; }
const std::string& Expression::variable_name() const { return std::get<Variable>(node_->data).name; }
UnaryOp Expression::unary_op() const { return std::get<Unary>(node_->data).op; }
BinaryOp Expression::binary_op() const { return std::get<Binary>(node_->data).op; }
const Expression& Expression::child() const { return std::get<Unary>(node_->data).child; }
const Expression& Expression::lhs() const { return std::get<Binary>(node_->data).lhs; }
const Expression& Expression::rhs() const { return std::get<Binary>(node_->data).rhs; }

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expression::Kind::kConstant: {
      // Bitwise so that 0.0 and -0.0 stay distinct (they render differently).
      double x = a.constant_value(), y = b.constant_value();
      return x == y && std::signbit(x) == std::signbit(y);
    }
    case Expression::Kind::kNamedConstant:
      return a.named_tag() == b.named_tag();
    case Expression::Kind::kVariable:
      return a.variable_name() == b.variable_name();
    case Expression::Kind::kUnary:
      return a.unary_op() == b.unary_op() && a.child() == b.child();
    case Expression::Kind::kBinary:
      return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

std::size_t Expression::size() const {
  switch (kind()) {
    case Kind::kUnary: return 1 + child().size();
    case Kind::kBinary: return 1 + lhs().size() + rhs().size();
    default: return 1;
  }
}

std::string render(const Expression& e) {
  std::string out;
  render_into(e, out);
  return out;
}

std::set<std::string> free_variables(const Expression& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!head(token.front())) return false;
  for (char c : token) {
    if (!head(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

}  // namespace eqgym::expr
