#pragma once

// Reader for the text rendering of forms and scalars.
//
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '^') unary)*        '*' and '^' both wedge
//   unary   := '-' unary | atom
//   atom    := INT ('/' INT)? | SYMBOL | covector | DERIV '(' sum ')' | '(' sum ')'
//   covector:= 'dx'INT | 'dy'INT | 'theta'
//   DERIV   := 'X'INT | 'Y'INT | 'T' | 'W'INT | 'w'INT     (W_j, w_j: frame index j)
//
// Scalars are 0-forms, so f*dx1 and dx1^dy1 go through the same wedge. Sums
// must be homogeneous in degree.

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heis/calculus.hpp"
#include "heis/form.hpp"
#include "heis/rational.hpp"
#include "heis/scalar_expr.hpp"

namespace heis {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                           message),
        line_(line),
        column_(column),
        message_(message) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_, column_;
  std::string message_;
};

// Names the grammar claims for itself. W<INT> and w<INT> stay usable as
// symbols; they only act as operators when applied.
inline bool is_reserved_name(std::string_view name) {
  static const std::regex reserved("(dx|dy|X|Y)[0-9]+|T|theta");
  return std::regex_match(name.begin(), name.end(), reserved);
}

inline bool is_valid_symbol_name(std::string_view name) {
  static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
  return std::regex_match(name.begin(), name.end(), ident) && !is_reserved_name(name);
}

namespace dsl {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kCaret, kSlash, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const int l = line, col = column;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::kNumber, std::string(src.substr(i, j - i)), l, col});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), l, col});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '^': kind = Tok::kCaret; break;
      case '/': kind = Tok::kSlash; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      default: throw ParseError(l, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), l, col});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, column});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, int n, int dtheta_sign)
      : tokens_(lex(src)), n_(n), bracket_(-dtheta_sign) {}

  SymbolicForm parse() {
    SymbolicForm value = sum();
    if (peek().kind != Tok::kEnd) fail(peek(), "unexpected '" + peek().text + "'");
    return value;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }
  void expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    ++pos_;
  }

  SymbolicForm sum() {
    SymbolicForm acc = product();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const Token& op = take();
      const Token& at = peek();
      SymbolicForm rhs = product();
      if (rhs.degree() != acc.degree())
        fail(at, "mixed degrees: degree " + std::to_string(acc.degree()) + " and degree " +
                     std::to_string(rhs.degree()));
      if (op.kind == Tok::kPlus) {
        acc += rhs;
      } else {
        acc -= rhs;
      }
    }
    return acc;
  }

  SymbolicForm product() {
    SymbolicForm acc = unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kCaret) {
      const Token& op = take();
      SymbolicForm rhs = unary();
      if (acc.degree() + rhs.degree() > 2 * n_ + 1)
        fail(op, "wedge of degree " + std::to_string(acc.degree() + rhs.degree()) + " exceeds " +
                     std::to_string(2 * n_ + 1));
      acc = wedge(acc, rhs);
    }
    return acc;
  }

  SymbolicForm unary() {
    if (peek().kind == Tok::kMinus) {
      take();
      return -unary();
    }
    return atom();
  }

  static std::optional<int> index_suffix(const std::string& s, std::size_t prefix) {
    if (s.size() <= prefix) return std::nullopt;
    for (std::size_t i = prefix; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    if (s.size() - prefix > 3) return 1000;  // out of range whatever n is
    return std::stoi(s.substr(prefix));
  }

  // Frame index of a derivative operator name, or nullopt.
  std::optional<int> deriv_index(const Token& t) const {
    const std::string& s = t.text;
    if (s == "T") return 2 * n_ + 1;
    auto j = index_suffix(s, 1);
    if (!j) return std::nullopt;
    const char head = s[0];
    if (head == 'X' || head == 'Y') {
      if (*j < 1 || *j > n_) fail(t, "derivative " + s + " out of range for n=" + std::to_string(n_));
      return head == 'X' ? *j : *j + n_;
    }
    if (head == 'W' || head == 'w') {
      if (*j < 1 || *j > 2 * n_ + 1) fail(t, "derivative " + s + " out of range for n=" + std::to_string(n_));
      return *j;
    }
    return std::nullopt;
  }

  SymbolicForm atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber: {
        take();
        std::string text = t.text;
        if (peek().kind == Tok::kSlash) {
          take();
          if (peek().kind != Tok::kNumber) fail(peek(), "expected denominator");
          const Token& den = take();
          if (std::all_of(den.text.begin(), den.text.end(), [](char c) { return c == '0'; }))
            fail(den, "zero denominator");
          text += "/" + den.text;
        }
        return SymbolicForm::scalar(n_, ScalarExpr(parse_rational(text)));
      }
      case Tok::kLParen: {
        take();
        SymbolicForm inner = sum();
        expect(Tok::kRParen, "')'");
        return inner;
      }
      case Tok::kIdent:
        return identifier();
      case Tok::kEnd:
        fail(t, "unexpected end of input");
      default:
        fail(t, "unexpected '" + t.text + "'");
    }
  }

  SymbolicForm identifier() {
    const Token& t = take();
    const std::string& s = t.text;
    if (s == "theta") return SymbolicForm::theta(n_);
    if (s.rfind("dx", 0) == 0 || s.rfind("dy", 0) == 0) {
      if (auto j = index_suffix(s, 2)) {
        if (*j < 1 || *j > n_) fail(t, "covector " + s + " out of range for n=" + std::to_string(n_));
        return SymbolicForm::covector(n_, s[1] == 'x' ? *j : *j + n_);
      }
    }
    if (peek().kind == Tok::kLParen) {
      const auto index = deriv_index(t);
      if (!index) fail(t, "unknown operator '" + s + "'");
      take();
      const Token& arg_at = peek();
      SymbolicForm arg = sum();
      expect(Tok::kRParen, "')'");
      if (arg.degree() != 0) fail(arg_at, s + " applies to scalars, got a form of degree " + std::to_string(arg.degree()));
      return SymbolicForm::scalar(n_, derive(*index, arg.coefficient(0), n_, bracket_));
    }
    if (is_reserved_name(s)) fail(t, "'" + s + "' is reserved and cannot be used as a symbol");
    return SymbolicForm::scalar(n_, ScalarExpr::symbol(s));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int n_;
  int bracket_;
};

}  // namespace dsl

inline SymbolicForm parse_form(std::string_view src, int n, ConventionProfile profile = ConventionProfile::standard(),
                               std::optional<int> degree = std::nullopt) {
  if (n < 1 || n > kMaxN) throw std::out_of_range("n must lie in 1.." + std::to_string(kMaxN));
  SymbolicForm f = dsl::Parser(src, n, profile.dtheta_sign).parse();
  if (degree && f.degree() != *degree) {
    if (f.is_zero()) return SymbolicForm(n, *degree);
    throw ParseError(1, 1, "expected a form of degree " + std::to_string(*degree) + ", got degree " +
                               std::to_string(f.degree()));
  }
  return f;
}

inline ScalarExpr parse_scalar(std::string_view src, int n, ConventionProfile profile = ConventionProfile::standard()) {
  return parse_form(src, n, profile, 0).coefficient(0);
}

}  // namespace heis
