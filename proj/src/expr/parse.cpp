#include "eqgym/expr/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace eqgym::expr {

namespace {

enum class Tok {
  kNumber,
  kName,  // possibly dotted: "np.sqrt"
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kPow,
  kLParen,
  kRParen,
  kLess,
  kLessEq,
  kGreater,
  kGreaterEq,
  kEnd,
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

bool ident_head(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_tail(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

[[noreturn]] void syntax_error(std::size_t offset, std::vector<std::string> expected, std::string_view found) {
  std::string msg = "syntax error at offset " + std::to_string(offset) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += " or ";
    msg += expected[i];
  }
  msg += found.empty() ? ", found end of input" : ", found '" + std::string(found) + "'";
  throw ParseError(ParseError::Kind::kSyntax, offset, std::move(expected), msg);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::kEnd, pos_, {}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Token next() {
    std::size_t start = pos_;
    char c = src_[pos_];
    if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) return number();
    if (ident_head(c)) return name();
    auto single = [&](Tok k, std::size_t len) {
      pos_ += len;
      return Token{k, start, src_.substr(start, len)};
    };
    auto peek = [&](char want) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == want; };
    switch (c) {
      case '+': return single(Tok::kPlus, 1);
      case '-': return single(Tok::kMinus, 1);
      case '*': return peek('*') ? single(Tok::kPow, 2) : single(Tok::kStar, 1);
      case '/': return single(Tok::kSlash, 1);
      case '(': return single(Tok::kLParen, 1);
      case ')': return single(Tok::kRParen, 1);
      case '<': return peek('=') ? single(Tok::kLessEq, 2) : single(Tok::kLess, 1);
      case '>': return peek('=') ? single(Tok::kGreaterEq, 2) : single(Tok::kGreater, 1);
      default: break;
    }
    syntax_error(start, {"number", "identifier", "'('", "'-'"}, src_.substr(start, 1));
  }

  Token number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && digit(src_[pos_])) {
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    // from_chars rejects a leading '.', so prefix a zero in that case.
    std::string owned = text.front() == '.' ? "0" + std::string(text) : std::string(text);
    auto [ptr, ec] = std::from_chars(owned.data(), owned.data() + owned.size(), value);
    if (ec != std::errc{} || ptr != owned.data() + owned.size() || !std::isfinite(value)) {
      syntax_error(start, {"finite number"}, text);
    }
    return Token{Tok::kNumber, start, text, value};
  }

  Token name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_tail(src_[pos_])) ++pos_;
    // Dotted qualification: np.sqrt, np.pi, math.sqrt (the last is rejected
    // later by the parser, not the lexer).
    while (pos_ + 1 < src_.size() && src_[pos_] == '.' && ident_head(src_[pos_ + 1])) {
      ++pos_;
      while (pos_ < src_.size() && ident_tail(src_[pos_])) ++pos_;
    }
    return Token{Tok::kName, start, src_.substr(start, pos_ - start)};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

const std::vector<std::string> kOperandStart{"number", "identifier", "'('", "'-'"};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(Lexer(src).run()) {}

  Expression expression() {
    Expression lhs = term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      BinaryOp op = take().kind == Tok::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      lhs = Expression::binary(op, lhs, term());
    }
    return lhs;
  }

  void expect_end() {
    if (peek().kind != Tok::kEnd) {
      syntax_error(peek().offset, {"operator", "end of input"}, peek().text);
    }
  }

  std::optional<Comparison> comparison() {
    switch (peek().kind) {
      case Tok::kLess: take(); return Comparison::kLess;
      case Tok::kLessEq: take(); return Comparison::kLessEqual;
      case Tok::kGreater: take(); return Comparison::kGreater;
      case Tok::kGreaterEq: take(); return Comparison::kGreaterEqual;
      default: return std::nullopt;
    }
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(idx_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

 private:
  const Token& take() { return toks_[idx_ < toks_.size() - 1 ? idx_++ : idx_]; }

  Expression term() {
    Expression lhs = unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      BinaryOp op = take().kind == Tok::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      lhs = Expression::binary(op, lhs, unary());
    }
    return lhs;
  }

  Expression unary() {
    if (peek().kind == Tok::kMinus) {
      take();
      // "-2" is a negative literal unless the literal is a power base: -2**2
      // means -(2**2).
      if (peek().kind == Tok::kNumber && peek(1).kind != Tok::kPow) {
        return Expression::constant(-take().number);
      }
      return Expression::unary(UnaryOp::kNeg, unary());
    }
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (peek().kind == Tok::kPow) {
      take();
      return Expression::binary(BinaryOp::kPow, base, unary());
    }
    return base;
  }

  Expression primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        take();
        return Expression::constant(t.number);
      case Tok::kLParen: {
        take();
        Expression inner = expression();
        close_paren();
        return inner;
      }
      case Tok::kName:
        return name();
      default:
        syntax_error(t.offset, kOperandStart, t.text);
    }
  }

  void close_paren() {
    if (peek().kind != Tok::kRParen) syntax_error(peek().offset, {"')'"}, peek().text);
    take();
  }

  Expression name() {
    const Token t = take();
    std::string_view full = t.text;
    std::string_view bare = full;
    bool qualified = false;
    if (auto dot = full.find('.'); dot != std::string_view::npos) {
      std::string_view ns = full.substr(0, dot);
      bare = full.substr(dot + 1);
      qualified = true;
      if (ns != "np" || bare.find('.') != std::string_view::npos) {
        throw ParseError(ParseError::Kind::kUnknownFunction, t.offset, {},
                         "unknown function or namespace '" + std::string(full) + "' at offset " +
                             std::to_string(t.offset) + " (only the np. prefix is accepted)");
      }
      if (bare == "pi") return Expression::pi();
    }
    if (peek().kind == Tok::kLParen) {
      UnaryOp op;
      if (!lookup_function(bare, op)) {
        throw ParseError(ParseError::Kind::kUnknownFunction, t.offset, {},
                         "unknown function '" + std::string(full) + "' at offset " + std::to_string(t.offset));
      }
      take();
      Expression arg = expression();
      close_paren();
      return Expression::unary(op, arg);
    }
    if (qualified) {
      // np.<something> that is neither np.pi nor a call.
      throw ParseError(ParseError::Kind::kUnknownFunction, t.offset, {},
                       "unknown constant '" + std::string(full) + "' at offset " + std::to_string(t.offset));
    }
    return Expression::variable(std::string(bare));
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace

Expression parse(std::string_view text) {
  Parser p(text);
  Expression e = p.expression();
  p.expect_end();
  return e;
}

std::string_view comparison_symbol(Comparison c) {
  switch (c) {
    case Comparison::kLess: return "<";
    case Comparison::kLessEqual: return "<=";
    case Comparison::kGreater: return ">";
    case Comparison::kGreaterEqual: return ">=";
  }
  return "?";
}

Constraint parse_constraint(std::string_view text) {
  Parser p(text);
  Expression lhs = p.expression();
  auto cmp = p.comparison();
  if (!cmp) syntax_error(p.peek().offset, {"'<'", "'<='", "'>'", "'>='"}, p.peek().text);
  Expression rhs = p.expression();
  p.expect_end();
  return Constraint{lhs, *cmp, rhs, std::string(text)};
}

bool compare(Comparison c, double lhs, double rhs) {
  switch (c) {
    case Comparison::kLess: return lhs < rhs;
    case Comparison::kLessEqual: return lhs <= rhs;
    case Comparison::kGreater: return lhs > rhs;
    case Comparison::kGreaterEqual: return lhs >= rhs;
  }
  return false;
}

std::string render(const Constraint& c) {
  return render(c.lhs) + " " + std::string(comparison_symbol(c.cmp)) + " " + render(c.rhs);
}

}  // namespace eqgym::expr
