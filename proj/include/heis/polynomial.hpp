#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "heis/rational.hpp"

namespace heis {

// Exact polynomial in x_1..x_n, y_1..y_n, t with rational coefficients.
// Variable v in 0..2n: v < n is x_{v+1}, n <= v < 2n is y_{v-n+1}, v = 2n is t,
// matching the frame index of the coordinate the derivative acts on (minus 1).
class Polynomial {
 public:
  using Exponents = std::vector<std::uint8_t>;
  using TermMap = std::map<Exponents, Rational>;

  Polynomial() = default;
  explicit Polynomial(int vars) : vars_(vars) {}
  // Constant; the variable count is adopted from the other operand on arithmetic.
  explicit Polynomial(const Rational& c) {
    if (!heis::is_zero(c)) terms_.emplace(Exponents{}, c);
  }
  Polynomial(int vars, const Rational& c) : vars_(vars) {
    if (!heis::is_zero(c)) terms_.emplace(Exponents(vars, 0), c);
  }

  static Polynomial variable(int vars, int v) {
    if (v < 0 || v >= vars) throw std::out_of_range("polynomial variable index");
    Exponents e(vars, 0);
    e[v] = 1;
    Polynomial p(vars);
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  static Polynomial monomial(int vars, Exponents e, const Rational& c) {
    if (static_cast<int>(e.size()) != vars) throw std::invalid_argument("exponent vector size");
    Polynomial p(vars);
    if (!heis::is_zero(c)) p.terms_.emplace(std::move(e), c);
    return p;
  }

  int vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int total_degree() const {
    int best = 0;
    for (auto& [e, c] : terms_) {
      int d = 0;
      for (auto x : e) d += x;
      best = std::max(best, d);
    }
    return best;
  }

  Polynomial& operator+=(const Polynomial& o) {
    adopt(o);
    for (auto& [e, c] : o.terms_) add(padded(e), c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    adopt(o);
    for (auto& [e, c] : o.terms_) add(padded(e), -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial out = a;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const Rational& r) {
    Polynomial out(a.vars_);
    if (heis::is_zero(r)) return out;
    for (auto& [e, c] : a.terms_) out.terms_.emplace(e, c * r);
    return out;
  }
  friend Polynomial operator*(const Rational& r, const Polynomial& a) { return a * r; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(std::max(a.vars_, b.vars_));
    for (auto& [ea, ca] : a.terms_)
      for (auto& [eb, cb] : b.terms_) {
        Exponents e = out.padded(ea);
        const Exponents fb = out.padded(eb);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint8_t>(e[i] + fb[i]);
        out.add(std::move(e), ca * cb);
      }
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return (a - b).is_zero(); }

  Polynomial partial(int v) const {
    Polynomial out(vars_);
    if (v < 0 || v >= vars_) return out;
    for (auto& [e, c] : terms_) {
      const Exponents full = padded(e);
      if (full[v] == 0) continue;
      Exponents f = full;
      --f[v];
      out.add(std::move(f), c * full[v]);
    }
    return out;
  }

  Rational evaluate(const std::vector<Rational>& point) const {
    Rational acc = 0;
    for (auto& [e, c] : terms_) {
      Rational term = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) term *= point.at(i);
      acc += term;
    }
    return acc;
  }

  double evaluate(const std::vector<double>& point) const {
    double acc = 0;
    for (auto& [e, c] : terms_) {
      double term = to_double(c);
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) term *= point.at(i);
      acc += term;
    }
    return acc;
  }

 private:
  void adopt(const Polynomial& o) {
    if (o.vars_ <= vars_) return;
    TermMap widened;
    vars_ = o.vars_;
    for (auto& [e, c] : terms_) widened.emplace(padded(e), c);
    terms_ = std::move(widened);
  }
  Exponents padded(const Exponents& e) const {
    Exponents out = e;
    out.resize(std::max<std::size_t>(e.size(), vars_), 0);
    return out;
  }
  void add(Exponents e, const Rational& c) {
    if (heis::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (heis::is_zero(it->second)) terms_.erase(it);
    }
  }

  int vars_ = 0;
  TermMap terms_;
};

inline std::string to_text(const Polynomial& p, int n) {
  if (p.is_zero()) return "0";
  auto var_name = [n](std::size_t v) -> std::string {
    if (static_cast<int>(v) < n) return "x" + std::to_string(v + 1);
    if (static_cast<int>(v) < 2 * n) return "y" + std::to_string(v - n + 1);
    return "t";
  };
  std::string out;
  bool first = true;
  for (auto& [e, c] : p.terms()) {
    Rational mag = c;
    bool neg = mag < 0;
    if (neg) mag = -mag;
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    std::string mono;
    for (std::size_t v = 0; v < e.size(); ++v)
      for (int k = 0; k < e[v]; ++k) mono += (mono.empty() ? "" : "*") + var_name(v);
    if (mono.empty()) {
      out += heis::to_string(mag);
    } else {
      out += (mag == 1 ? "" : heis::to_string(mag) + "*") + mono;
    }
  }
  return out;
}

// X_j = d/dx_j + a y_j d/dt, Y_j = d/dy_j + b x_j d/dt, T = d/dt with
// a = s/2, b = -s/2 where s is the dtheta sign; s = -1 gives
// X_j = d/dx_j - (y_j/2) d/dt, Y_j = d/dy_j + (x_j/2) d/dt and [X_j, Y_j] = T.
struct CoordinateFrame {
  int n = 1;
  int dtheta_sign = -1;

  int vars() const { return 2 * n + 1; }
  Rational x_shift() const { return Rational(dtheta_sign, 2); }
  Rational y_shift() const { return Rational(-dtheta_sign, 2); }

  Polynomial apply(int index, const Polynomial& p) const {
    const int t = 2 * n;
    if (index == 2 * n + 1) return p.partial(t);
    if (index >= 1 && index <= n) {
      const int x = index - 1, y = index - 1 + n;
      return p.partial(x) + Polynomial::variable(vars(), y) * p.partial(t) * x_shift();
    }
    if (index > n && index <= 2 * n) {
      const int j = index - n;
      const int x = j - 1, y = j - 1 + n;
      return p.partial(y) + Polynomial::variable(vars(), x) * p.partial(t) * y_shift();
    }
    throw std::out_of_range("frame index " + std::to_string(index));
  }

  // Components of W_index at a point in the coordinate basis (d/dx.., d/dy.., d/dt).
  template <class Num>
  std::vector<Num> vector_field(int index, const std::vector<Num>& p) const {
    std::vector<Num> v(vars(), Num(0));
    const int t = 2 * n;
    if (index == 2 * n + 1) {
      v[t] = Num(1);
    } else if (index >= 1 && index <= n) {
      v[index - 1] = Num(1);
      v[t] = p[index - 1 + n] * convert<Num>(x_shift());
    } else if (index > n && index <= 2 * n) {
      const int j = index - n;
      v[j - 1 + n] = Num(1);
      v[t] = p[j - 1] * convert<Num>(y_shift());
    } else {
      throw std::out_of_range("frame index " + std::to_string(index));
    }
    return v;
  }

  // Coefficients of the coframe element dual to W_index in (dx.., dy.., dt):
  // dx_j, dy_j, and theta = dt - a sum y_j dx_j - b sum x_j dy_j.
  template <class Num>
  std::vector<Num> coframe(int index, const std::vector<Num>& p) const {
    std::vector<Num> c(vars(), Num(0));
    const int t = 2 * n;
    if (index == 2 * n + 1) {
      c[t] = Num(1);
      for (int j = 0; j < n; ++j) {
        c[j] = -p[j + n] * convert<Num>(x_shift());
        c[j + n] = -p[j] * convert<Num>(y_shift());
      }
    } else if (index >= 1 && index <= 2 * n) {
      c[index - 1] = Num(1);
    } else {
      throw std::out_of_range("frame index " + std::to_string(index));
    }
    return c;
  }

 private:
  template <class Num>
  static Num convert(const Rational& r) {
    if constexpr (std::is_same_v<Num, Rational>) {
      return r;
    } else {
      return static_cast<Num>(to_double(r));
    }
  }
};

}  // namespace heis
