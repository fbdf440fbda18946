#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heis/rational.hpp"
#include "heis/scalar_expr.hpp"

namespace heis {

// Coframe monomial dw_{i1} ^ ... ^ dw_{ik} with i1 < ... < ik, stored as a bit
// set (bit i-1 <=> dw_i). theta is index 2n+1, so it always sorts last.
using Monomial = std::uint32_t;

// Largest supported n. Contexts precompute dense exact matrices of size up to C(2n, n).
inline constexpr int kMaxN = 4;

inline Monomial bit_of(int index) { return Monomial{1} << (index - 1); }
inline int monomial_degree(Monomial m) { return std::popcount(m); }
inline Monomial theta_bit(int n) { return bit_of(2 * n + 1); }
inline Monomial horizontal_mask(int n) { return theta_bit(n) - 1; }

inline std::vector<int> monomial_indices(Monomial m) {
  std::vector<int> out;
  for (int i = 1; m; ++i, m >>= 1)
    if (m & 1u) out.push_back(i);
  return out;
}

// Lexicographic order on the increasing index sequences of equal length.
struct MonomialOrder {
  bool operator()(Monomial a, Monomial b) const {
    if (a == b) return false;
    const Monomial diff = a ^ b;
    return (diff & (~diff + 1) & a) != 0;
  }
};

// Sign of dw_a ^ dw_b relative to the sorted monomial a|b; 0 if they overlap.
inline int wedge_sign(Monomial a, Monomial b) {
  if (a & b) return 0;
  int inversions = 0;
  for (Monomial rest = b; rest; rest &= rest - 1) {
    const Monomial low = rest & (~rest + 1);
    inversions += std::popcount(a & ~((low << 1) - 1));
  }
  return (inversions % 2) ? -1 : 1;
}

// All monomials of the given degree drawn from the index set `mask`.
inline std::vector<Monomial> monomials_of_degree(Monomial mask, int degree) {
  std::vector<Monomial> out;
  if (degree < 0) return out;
  const int width = std::bit_width(mask);
  for (Monomial m = 0; m < (Monomial{1} << width); ++m)
    if ((m & ~mask) == 0 && monomial_degree(m) == degree) out.push_back(m);
  std::sort(out.begin(), out.end(), MonomialOrder{});
  return out;
}

// Homogeneous differential form on the (2n+1)-dimensional coframe with
// coefficients in Coeff. Coeff{} must be the zero element and Coeff must
// provide +, -, *, multiplication by Rational and is_zero().
template <class Coeff>
class Form {
 public:
  using TermMap = std::map<Monomial, Coeff, MonomialOrder>;

  Form() = default;
  Form(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1 || n > kMaxN) throw std::out_of_range("n out of range: " + std::to_string(n));
    if (degree < 0) throw std::out_of_range("negative form degree");
  }

  static Form scalar(int n, Coeff c) {
    Form f(n, 0);
    f.add_term(0, std::move(c));
    return f;
  }
  static Form covector(int n, int index) {
    if (index < 1 || index > 2 * n + 1)
      throw std::out_of_range("covector index " + std::to_string(index) + " out of range for n=" +
                              std::to_string(n));
    Form f(n, 1);
    f.add_term(bit_of(index), Coeff(Rational(1)));
    return f;
  }
  static Form theta(int n) { return covector(n, 2 * n + 1); }
  static Form monomial(int n, Monomial m, Coeff c) {
    Form f(n, monomial_degree(m));
    f.add_term(m, std::move(c));
    return f;
  }

  int n() const { return n_; }
  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Coeff coefficient(Monomial m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff{} : it->second;
  }

  void add_term(Monomial m, const Coeff& c) {
    if (monomial_degree(m) != degree_) throw std::invalid_argument("monomial degree mismatch");
    if ((m & ~(theta_bit(n_) | horizontal_mask(n_))) != 0)
      throw std::out_of_range("monomial outside the coframe");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Form& operator+=(const Form& o) {
    check_compatible(o);
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    check_compatible(o);
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(const Form& a) {
    Form out(a.n_, a.degree_);
    for (auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
    return out;
  }
  friend Form operator*(const Rational& r, const Form& a) {
    Form out(a.n_, a.degree_);
    if (heis::is_zero(r)) return out;
    for (auto& [m, c] : a.terms_) out.terms_.emplace(m, c * r);
    return out;
  }
  // Multiplication by a function (a 0-form).
  friend Form operator*(const Coeff& s, const Form& a) {
    Form out(a.n_, a.degree_);
    for (auto& [m, c] : a.terms_) out.add_term(m, s * c);
    return out;
  }

  friend bool operator==(const Form& a, const Form& b) {
    return a.n_ == b.n_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

 private:
  void check_compatible(const Form& o) const {
    if (o.n_ != n_) throw std::invalid_argument("forms over different n");
    if (o.degree_ != degree_)
      throw std::invalid_argument("degree mismatch: " + std::to_string(degree_) + " vs " +
                                  std::to_string(o.degree_));
  }

  int n_ = 1;
  int degree_ = 0;
  TermMap terms_;
};

template <class Coeff>
Form<Coeff> wedge(const Form<Coeff>& a, const Form<Coeff>& b) {
  if (a.n() != b.n()) throw std::invalid_argument("forms over different n");
  Form<Coeff> out(a.n(), a.degree() + b.degree());
  if (out.degree() > 2 * a.n() + 1) return out;
  for (auto& [ma, ca] : a.terms()) {
    for (auto& [mb, cb] : b.terms()) {
      const int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      Coeff prod = ca * cb;
      if (s < 0) prod = -prod;
      out.add_term(ma | mb, prod);
    }
  }
  return out;
}

template <class Coeff>
Form<Coeff> horizontal_part(const Form<Coeff>& w) {
  Form<Coeff> out(w.n(), w.degree());
  const Monomial th = theta_bit(w.n());
  for (auto& [m, c] : w.terms())
    if (!(m & th)) out.add_term(m, c);
  return out;
}

template <class Coeff>
Form<Coeff> vertical_part(const Form<Coeff>& w) {
  Form<Coeff> out(w.n(), w.degree());
  const Monomial th = theta_bit(w.n());
  for (auto& [m, c] : w.terms())
    if (m & th) out.add_term(m, c);
  return out;
}

template <class Coeff>
struct ThetaSplit {
  Form<Coeff> horizontal;  // omega'
  Form<Coeff> beta;        // omega = omega' + beta ^ theta
};

// Unique split w = w' + beta ^ theta with w', beta theta-free.
template <class Coeff>
ThetaSplit<Coeff> decompose_theta(const Form<Coeff>& w) {
  const Monomial th = theta_bit(w.n());
  ThetaSplit<Coeff> out{Form<Coeff>(w.n(), w.degree()),
                        Form<Coeff>(w.n(), w.degree() > 0 ? w.degree() - 1 : 0)};
  for (auto& [m, c] : w.terms()) {
    if (m & th) {
      out.beta.add_term(m & ~th, c);  // theta is last: no reordering sign
    } else {
      out.horizontal.add_term(m, c);
    }
  }
  return out;
}

// Covector naming: dw_j = dx_j, dw_{j+n} = dy_j, dw_{2n+1} = theta.
inline std::string covector_name(int index, int n) {
  if (index <= n) return "dx" + std::to_string(index);
  if (index <= 2 * n) return "dy" + std::to_string(index - n);
  return "theta";
}

inline std::string covector_latex(int index, int n) {
  if (index <= n) return "dx_" + std::to_string(index);
  if (index <= 2 * n) return "dy_" + std::to_string(index - n);
  return "\\theta";
}

inline std::string monomial_text(Monomial m, int n) {
  std::string out;
  for (int i : monomial_indices(m)) {
    if (!out.empty()) out += "^";
    out += covector_name(i, n);
  }
  return out;
}

inline std::string monomial_latex(Monomial m, int n) {
  std::string out;
  for (int i : monomial_indices(m)) {
    if (!out.empty()) out += " \\wedge ";
    out += covector_latex(i, n);
  }
  return out;
}

using SymbolicForm = Form<ScalarExpr>;

inline std::string to_text(const SymbolicForm& f) {
  if (f.is_zero()) return "0";
  if (f.degree() == 0) return to_text(f.coefficient(0));
  std::string out;
  bool first = true;
  for (auto& [m, s] : f.terms()) {
    const std::string chain = monomial_text(m, f.n());
    std::string term;
    bool negative = false;
    if (s.size() == 1) {
      const auto& [p, c] = *s.terms().begin();
      negative = sgn(c) < 0;
      const Rational mag = abs(c);
      if (p.empty()) {
        term = mag == 1 ? chain : to_string(mag) + "*" + chain;
      } else {
        term = to_text(p, mag) + "*" + chain;
      }
    } else {
      term = "(" + to_text(s) + ")*" + chain;
    }
    if (first) {
      out = (negative ? "-" : "") + term;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += term;
    }
  }
  return out;
}

inline std::string to_latex(const SymbolicForm& f) {
  if (f.is_zero()) return "0";
  if (f.degree() == 0) return to_latex(f.coefficient(0));
  std::string out;
  bool first = true;
  for (auto& [m, s] : f.terms()) {
    const std::string chain = monomial_latex(m, f.n());
    std::string term;
    bool negative = false;
    if (s.size() == 1) {
      const auto& [p, c] = *s.terms().begin();
      negative = sgn(c) < 0;
      ScalarExpr mag;
      mag.add_term(p, abs(c));
      term = (p.empty() && abs(c) == 1) ? chain : to_latex(mag) + " \\, " + chain;
    } else {
      term = "\\left(" + to_latex(s) + "\\right) " + chain;
    }
    if (first) {
      out = (negative ? "-" : "") + term;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += term;
    }
  }
  return out;
}

}  // namespace heis
