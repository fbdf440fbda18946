#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heis/rational.hpp"

namespace heis {

// A letter of a derivative word. X_j is encoded as 2(j-1), Y_j as 2(j-1)+1 and
// T as kT, so numeric order is the canonical order X1 < Y1 < X2 < ... < T for
// every n and words never need re-encoding when n changes.
using Letter = std::uint8_t;
inline constexpr Letter kT = 0xFF;

inline Letter x_letter(int j) { return static_cast<Letter>(2 * (j - 1)); }
inline Letter y_letter(int j) { return static_cast<Letter>(2 * (j - 1) + 1); }

// Frame index (1..2n+1) in the W_j numbering: W_j = X_j, W_{j+n} = Y_j, W_{2n+1} = T.
inline Letter letter_for_frame_index(int index, int n) {
  if (n < 1 || index < 1 || index > 2 * n + 1) {
    throw std::out_of_range("frame index " + std::to_string(index) + " out of range for n=" +
                            std::to_string(n));
  }
  if (index <= n) return x_letter(index);
  if (index <= 2 * n) return y_letter(index - n);
  return kT;
}

inline int frame_index_for_letter(Letter letter, int n) {
  if (letter == kT) return 2 * n + 1;
  const int j = letter / 2 + 1;
  return (letter % 2 == 0) ? j : j + n;
}

inline std::string letter_name(Letter letter) {
  if (letter == kT) return "T";
  return std::string(letter % 2 == 0 ? "X" : "Y") + std::to_string(letter / 2 + 1);
}

// Outermost operator first: {X1, Y1} applied to f means X1(Y1(f)).
struct DerivativeWord {
  std::vector<Letter> letters;

  bool canonical() const { return std::is_sorted(letters.begin(), letters.end()); }
  bool empty() const { return letters.empty(); }
  std::size_t size() const { return letters.size(); }
  auto operator<=>(const DerivativeWord&) const = default;
};

struct FunctionSymbol {
  std::string name;
  auto operator<=>(const FunctionSymbol&) const = default;
};

struct Factor {
  FunctionSymbol symbol;
  DerivativeWord word;
  auto operator<=>(const Factor&) const = default;
};

// Sorted multiset of factors; empty for the constant term.
using Product = std::vector<Factor>;

// Linear combination of derivative words.
using WordCombination = std::vector<std::pair<Rational, DerivativeWord>>;

// Picks which descent of a non-canonical word gets rewritten next. Receives the
// positions i with letters[i] > letters[i+1]. Used by the confluence probe.
using DescentChooser = std::function<std::size_t(const std::vector<std::size_t>&)>;

namespace detail {

inline void accumulate(std::map<DerivativeWord, Rational>& acc, const Rational& c,
                       const DerivativeWord& w) {
  auto [it, inserted] = acc.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (is_zero(it->second)) acc.erase(it);
  }
}

inline void rewrite_word(const DerivativeWord& word, int bracket, const Rational& coeff,
                         const DescentChooser* chooser, std::map<DerivativeWord, Rational>& out) {
  std::vector<std::size_t> descents;
  for (std::size_t i = 0; i + 1 < word.letters.size(); ++i)
    if (word.letters[i] > word.letters[i + 1]) descents.push_back(i);
  if (descents.empty()) {
    accumulate(out, coeff, word);
    return;
  }
  const std::size_t i = chooser ? (*chooser)(descents) : descents.front();
  const Letter a = word.letters[i];
  const Letter b = word.letters[i + 1];

  // a b = b a + [a, b]
  DerivativeWord swapped = word;
  std::swap(swapped.letters[i], swapped.letters[i + 1]);
  rewrite_word(swapped, bracket, coeff, chooser, out);

  // Only [Y_j, X_j] = -[X_j, Y_j] = -bracket * T survives; T is central.
  if (a != kT && b % 2 == 0 && a == b + 1) {
    DerivativeWord contracted;
    contracted.letters.reserve(word.letters.size() - 1);
    contracted.letters.insert(contracted.letters.end(), word.letters.begin(),
                              word.letters.begin() + static_cast<std::ptrdiff_t>(i));
    contracted.letters.push_back(kT);
    contracted.letters.insert(contracted.letters.end(),
                              word.letters.begin() + static_cast<std::ptrdiff_t>(i) + 2,
                              word.letters.end());
    rewrite_word(contracted, bracket, coeff * (-bracket), chooser, out);
  }
}

}  // namespace detail

// Rewrites a word into canonical words using [X_j, Y_j] = bracket * T with all
// other brackets zero. bracket is +1 for the default contact convention.
inline WordCombination normalize_word(const DerivativeWord& word, int bracket = 1,
                                      const DescentChooser* chooser = nullptr) {
  if (chooser == nullptr) {
    thread_local std::map<std::pair<int, DerivativeWord>, WordCombination> cache;
    auto key = std::make_pair(bracket, word);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::map<DerivativeWord, Rational> acc;
    detail::rewrite_word(word, bracket, Rational(1), nullptr, acc);
    WordCombination result;
    result.reserve(acc.size());
    for (auto& [w, c] : acc) result.emplace_back(c, w);
    cache.emplace(std::move(key), result);
    return result;
  }
  std::map<DerivativeWord, Rational> acc;
  detail::rewrite_word(word, bracket, Rational(1), chooser, acc);
  WordCombination out;
  for (auto& [w, c] : acc) out.emplace_back(c, w);
  return out;
}

// Commutative polynomial in factors "word applied to symbol", with exact
// rational coefficients. Every stored word is canonical and no stored
// coefficient is zero, so equality is structural equality.
class ScalarExpr {
 public:
  using TermMap = std::map<Product, Rational>;

  ScalarExpr() = default;
  explicit ScalarExpr(const Rational& c) {
    if (!heis::is_zero(c)) terms_.emplace(Product{}, c);
  }

  static ScalarExpr constant(const Rational& c) { return ScalarExpr(c); }
  static ScalarExpr symbol(std::string name) {
    ScalarExpr e;
    e.terms_.emplace(Product{Factor{FunctionSymbol{std::move(name)}, {}}}, Rational(1));
    return e;
  }
  // word(symbol), normalized under the given bracket sign.
  static ScalarExpr applied(const DerivativeWord& word, const std::string& name, int bracket = 1) {
    ScalarExpr e;
    for (auto& [c, w] : normalize_word(word, bracket))
      e.add_term(Product{Factor{FunctionSymbol{name}, w}}, c);
    return e;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Symbols occurring anywhere in the expression.
  std::set<std::string> symbols() const {
    std::set<std::string> out;
    for (auto& [p, c] : terms_)
      for (auto& f : p) out.insert(f.symbol.name);
    return out;
  }

  void add_term(const Product& p, const Rational& c) {
    if (heis::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(p, c);
    if (!inserted) {
      it->second += c;
      if (heis::is_zero(it->second)) terms_.erase(it);
    }
  }

  ScalarExpr& operator+=(const ScalarExpr& o) {
    for (auto& [p, c] : o.terms_) add_term(p, c);
    return *this;
  }
  ScalarExpr& operator-=(const ScalarExpr& o) {
    for (auto& [p, c] : o.terms_) add_term(p, -c);
    return *this;
  }
  ScalarExpr& operator*=(const Rational& r) {
    if (heis::is_zero(r)) {
      terms_.clear();
    } else {
      for (auto& [p, c] : terms_) c *= r;
    }
    return *this;
  }

  friend ScalarExpr operator+(ScalarExpr a, const ScalarExpr& b) { return a += b; }
  friend ScalarExpr operator-(ScalarExpr a, const ScalarExpr& b) { return a -= b; }
  friend ScalarExpr operator-(ScalarExpr a) { return a *= Rational(-1); }
  friend ScalarExpr operator*(ScalarExpr a, const Rational& r) { return a *= r; }
  friend ScalarExpr operator*(const Rational& r, ScalarExpr a) { return a *= r; }

  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    ScalarExpr out;
    for (auto& [pa, ca] : a.terms_) {
      for (auto& [pb, cb] : b.terms_) {
        Product merged;
        merged.reserve(pa.size() + pb.size());
        std::merge(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(merged));
        out.add_term(merged, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b) { return a.terms_ == b.terms_; }

 private:
  TermMap terms_;
};

// An expression whose words may be non-canonical; the transient rewrite state.
struct RawTerm {
  Rational coefficient;
  std::vector<std::pair<DerivativeWord, FunctionSymbol>> factors;
};
using RawScalarExpr = std::vector<RawTerm>;

inline ScalarExpr normalize(const RawScalarExpr& raw, int bracket = 1,
                            const DescentChooser* chooser = nullptr) {
  ScalarExpr out;
  for (const auto& term : raw) {
    ScalarExpr t = ScalarExpr::constant(term.coefficient);
    for (const auto& [word, sym] : term.factors) {
      ScalarExpr f;
      for (auto& [c, w] : normalize_word(word, bracket, chooser))
        f.add_term(Product{Factor{sym, w}}, c);
      t = t * f;
    }
    out += t;
  }
  return out;
}

// Stored expressions are already canonical.
inline const ScalarExpr& normalize(const ScalarExpr& e) { return e; }

inline RawScalarExpr to_raw(const ScalarExpr& e) {
  RawScalarExpr raw;
  for (auto& [p, c] : e.terms()) {
    RawTerm t{c, {}};
    for (auto& f : p) t.factors.emplace_back(f.word, f.symbol);
    raw.push_back(std::move(t));
  }
  return raw;
}

// Applies the letter as the outermost operator to every factor (Leibniz rule),
// then normalizes. bracket as in normalize_word.
inline ScalarExpr apply_letter(Letter letter, const ScalarExpr& e, int bracket = 1) {
  ScalarExpr out;
  for (auto& [p, c] : e.terms()) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      DerivativeWord w;
      w.letters.reserve(p[i].word.size() + 1);
      w.letters.push_back(letter);
      w.letters.insert(w.letters.end(), p[i].word.letters.begin(), p[i].word.letters.end());
      for (auto& [wc, nw] : normalize_word(w, bracket)) {
        Product q;
        q.reserve(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
          if (k != i) q.push_back(p[k]);
        Factor f{p[i].symbol, std::move(nw)};
        q.insert(std::upper_bound(q.begin(), q.end(), f), std::move(f));
        out.add_term(q, c * wc);
      }
    }
  }
  return out;
}

// W_index applied to e, index in 1..2n+1.
inline ScalarExpr derive(int index, const ScalarExpr& e, int n, int bracket = 1) {
  return apply_letter(letter_for_frame_index(index, n), e, bracket);
}

inline bool scalar_eq(const ScalarExpr& a, const ScalarExpr& b) { return (a - b).is_zero(); }

// The symbolic realization of the left-invariant frame: W_j acts on
// ScalarExpr through the bracket relations alone.
struct SymbolicFrame {
  int n = 1;
  int bracket = 1;
  ScalarExpr apply(int index, const ScalarExpr& e) const { return derive(index, e, n, bracket); }
};

// Text rendering, the form the DSL parser reads back.
inline std::string to_text(const Factor& f) {
  std::string out = f.symbol.name;
  for (auto it = f.word.letters.rbegin(); it != f.word.letters.rend(); ++it)
    out = letter_name(*it) + "(" + out + ")";
  return out;
}

inline std::string to_text(const Product& p, const Rational& c) {
  std::string body;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) body += "*";
    body += to_text(p[i]);
  }
  if (p.empty()) return to_string(c);
  if (c == 1) return body;
  if (c == -1) return "-" + body;
  return to_string(c) + "*" + body;
}

inline std::string to_text(const ScalarExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto& [p, c] : e.terms()) {
    if (first) {
      out = to_text(p, c);
      first = false;
    } else if (sgn(c) < 0) {
      out += " - " + to_text(p, Rational(-c));
    } else {
      out += " + " + to_text(p, c);
    }
  }
  return out;
}

inline std::string to_latex(const Factor& f) {
  std::string out = f.symbol.name;
  for (auto it = f.word.letters.rbegin(); it != f.word.letters.rend(); ++it) {
    const Letter l = *it;
    const std::string op =
        l == kT ? std::string("T") : std::string(l % 2 == 0 ? "X" : "Y") + "_{" + std::to_string(l / 2 + 1) + "}";
    out = op + "(" + out + ")";
  }
  return out;
}

inline std::string latex_rational(const Rational& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  return "\\frac{" + c.get_num().get_str() + "}{" + c.get_den().get_str() + "}";
}

inline std::string to_latex(const ScalarExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto& [p, c] : e.terms()) {
    Rational mag = abs(c);
    std::string body;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) body += " ";
      body += to_latex(p[i]);
    }
    std::string term = p.empty() ? latex_rational(mag) : (mag == 1 ? body : latex_rational(mag) + " " + body);
    if (first) {
      out = (sgn(c) < 0 ? "-" : "") + term;
      first = false;
    } else {
      out += (sgn(c) < 0 ? " - " : " + ") + term;
    }
  }
  return out;
}

}  // namespace heis
