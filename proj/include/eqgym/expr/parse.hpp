#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/expr/ast.hpp"

namespace eqgym::expr {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownFunction };

  ParseError(Kind kind, std::size_t offset, std::vector<std::string> expected, const std::string& message)
      : std::runtime_error(message), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

  Kind kind() const { return kind_; }
  // Byte offset into the source text where parsing stopped.
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Parses the hypothesis/equation surface language:
//   numbers (1, 2.5, .5, 1e-06), identifiers, + - * / **, unary -, parens,
//   np.<fn>(e) or <fn>(e) for the unary function set, and np.pi.
// `**` binds tighter than unary minus and is right-associative.
Expression parse(std::string_view text);

enum class Comparison { kLess, kLessEqual, kGreater, kGreaterEqual };

std::string_view comparison_symbol(Comparison c);

bool compare(Comparison c, double lhs, double rhs);

// `<expr> (<|<=|>|>=) <expr>`
struct Constraint {
  Expression lhs;
  Comparison cmp;
  Expression rhs;
  std::string source;
};

Constraint parse_constraint(std::string_view text);

std::string render(const Constraint& c);

}  // namespace eqgym::expr
