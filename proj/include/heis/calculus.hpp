#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heis/form.hpp"
#include "heis/linear_algebra.hpp"
#include "heis/rational.hpp"
#include "heis/scalar_expr.hpp"

namespace heis {

// Sign s in dtheta = s * sum_j dw_j ^ dw_{j+n}. d o d = 0 then forces
// [X_j, Y_j] = -s T.
struct ConventionProfile {
  int dtheta_sign = -1;

  int bracket() const { return -dtheta_sign; }
  std::string name() const { return dtheta_sign < 0 ? "-" : "+"; }
  friend bool operator==(const ConventionProfile&, const ConventionProfile&) = default;

  static ConventionProfile standard() { return {-1}; }
  static ConventionProfile flipped() { return {+1}; }
};

// Matrix of beta -> dtheta ^ beta from horizontal p-forms to horizontal
// (p+2)-forms, in the sorted monomial bases.
struct LefschetzMap {
  int p = 0;
  std::vector<Monomial> domain;    // horizontal p-monomials
  std::vector<Monomial> codomain;  // horizontal (p+2)-monomials
  std::map<Monomial, std::size_t, MonomialOrder> codomain_index;
  RationalMatrix matrix;
};

inline LefschetzMap build_lefschetz_map(int n, int dtheta_sign, int p) {
  LefschetzMap map;
  map.p = p;
  const Monomial hmask = horizontal_mask(n);
  map.domain = monomials_of_degree(hmask, p);
  map.codomain = monomials_of_degree(hmask, p + 2);
  for (std::size_t i = 0; i < map.codomain.size(); ++i) map.codomain_index[map.codomain[i]] = i;
  map.matrix = RationalMatrix(map.codomain.size(), map.domain.size());
  for (std::size_t c = 0; c < map.domain.size(); ++c) {
    for (int j = 1; j <= n; ++j) {
      const Monomial pair = bit_of(j) | bit_of(j + n);
      const int s = wedge_sign(pair, map.domain[c]);
      if (s == 0) continue;
      map.matrix(map.codomain_index.at(pair | map.domain[c]), c) += s * dtheta_sign;
    }
  }
  return map;
}

// The integer n, the sign convention and everything derived from them that is
// worth computing once: the matrix of L and its exact inverse, and the
// complements used by the I^k membership test and quotient reduction.
// Immutable after construction.
class HeisenbergContext {
 public:
  explicit HeisenbergContext(int n, ConventionProfile convention = ConventionProfile::standard())
      : n_(n), convention_(convention) {
    if (n < 1 || n > kMaxN) throw std::out_of_range("n must lie in 1.." + std::to_string(kMaxN));
    if (convention.dtheta_sign != 1 && convention.dtheta_sign != -1)
      throw std::invalid_argument("dtheta sign must be +1 or -1");
    rumin_ = build_lefschetz_map(n, convention.dtheta_sign, n - 1);
    rumin_inverse_ = inverse(rumin_.matrix);
    for (int k = 2; k <= 2 * n + 1; ++k) {
      IdealData data;
      data.map = build_lefschetz_map(n, convention.dtheta_sign, k - 2);
      data.cokernel = left_null_space(data.map.matrix);
      data.complement_projector = row_space_projector(data.cokernel, data.map.codomain.size());
      ideal_[k] = std::move(data);
    }
  }

  int n() const { return n_; }
  const ConventionProfile& convention() const { return convention_; }
  int dimension() const { return 2 * n_ + 1; }

  const LefschetzMap& rumin_map() const { return rumin_; }
  const RationalMatrix& rumin_inverse() const { return rumin_inverse_; }

  struct IdealData {
    LefschetzMap map;                     // dtheta ^ : horizontal (k-2) -> horizontal k
    RationalMatrix cokernel;              // rows span image(map)^perp
    RationalMatrix complement_projector;  // orthogonal projector onto image(map)^perp
  };
  // Defined for 2 <= k <= 2n+1.
  const IdealData& ideal(int k) const { return ideal_.at(k); }

 private:
  int n_;
  ConventionProfile convention_;
  LefschetzMap rumin_;
  RationalMatrix rumin_inverse_;
  std::map<int, IdealData> ideal_;
};

using ContextPtr = std::shared_ptr<const HeisenbergContext>;

inline ContextPtr make_context(int n, ConventionProfile convention = ConventionProfile::standard()) {
  return std::make_shared<const HeisenbergContext>(n, convention);
}

// The operators d, L, L^{-1}, script L and the Rumin-space tests for a given
// coefficient ring and a realization of the frame W_1..W_{2n+1} on it.
template <class Coeff, class Frame>
class Calculus {
 public:
  using F = Form<Coeff>;

  Calculus(ContextPtr ctx, Frame frame) : ctx_(std::move(ctx)), frame_(std::move(frame)) {}

  const HeisenbergContext& context() const { return *ctx_; }
  const Frame& frame() const { return frame_; }
  int n() const { return ctx_->n(); }

  F zero(int degree) const { return F(n(), degree); }
  F scalar(const Coeff& c) const { return F::scalar(n(), c); }
  F theta() const { return F::theta(n()); }

  F dtheta() const {
    F out(n(), 2);
    for (int j = 1; j <= n(); ++j)
      out.add_term(bit_of(j) | bit_of(j + n()), Coeff(Rational(ctx_->convention().dtheta_sign)));
    return out;
  }

  // W_index c.
  Coeff frame_derivative(int index, const Coeff& c) const { return frame_.apply(index, c); }

  // Left-invariant exterior derivative: df = sum_j W_j f dw_j, d(dw_j) = 0 for
  // j <= 2n, d(theta) = dtheta, extended by the graded Leibniz rule.
  F d(const F& w) const {
    if (w.degree() > 2 * n()) throw std::domain_error("d of a form of top degree or above");
    F out(n(), w.degree() + 1);
    const Monomial th = theta_bit(n());
    const int s = ctx_->convention().dtheta_sign;
    for (auto& [m, c] : w.terms()) {
      for (int j = 1; j <= 2 * n() + 1; ++j) {
        const int sign = wedge_sign(bit_of(j), m);
        if (sign == 0) continue;
        Coeff wc = frame_.apply(j, c);
        if (wc.is_zero()) continue;
        out.add_term(bit_of(j) | m, sign > 0 ? wc : -wc);
      }
      if (m & th) {
        const Monomial rest = m & ~th;
        const int leibniz = (monomial_degree(rest) % 2) ? -1 : 1;
        for (int j = 1; j <= n(); ++j) {
          const Monomial pair = bit_of(j) | bit_of(j + n());
          const int sign = wedge_sign(rest, pair);
          if (sign == 0) continue;
          out.add_term(rest | pair, c * Rational(leibniz * sign * s));
        }
      }
    }
    return out;
  }

  F L(const F& beta) const {
    require_horizontal(beta, n() - 1, "L");
    return wedge(dtheta(), beta);
  }

  F L_inv(const F& eta) const {
    require_horizontal(eta, n() + 1, "L_inv");
    const auto& map = ctx_->rumin_map();
    const auto& inv = ctx_->rumin_inverse();
    F out(n(), n() - 1);
    for (std::size_t c = 0; c < map.domain.size(); ++c) {
      Coeff acc{};
      for (auto& [m, value] : eta.terms()) {
        const Rational& entry = inv(c, map.codomain_index.at(m));
        if (!is_zero(entry)) acc = acc + value * entry;
      }
      out.add_term(map.domain[c], acc);
    }
    return out;
  }

  // L^{-1}(-(d alpha) restricted to horizontal (n+1)-forms).
  F script_L(const F& alpha) const {
    if (alpha.degree() != n())
      throw std::invalid_argument("script_L expects an n-form, got degree " +
                                  std::to_string(alpha.degree()));
    return L_inv(-horizontal_part(d(alpha)));
  }

  bool in_J(const F& w, int k) const {
    require_degree(w, k, "in_J");
    return wedge(w, theta()).is_zero() && wedge(w, dtheta()).is_zero();
  }

  // w = alpha ^ theta + beta ^ dtheta for some alpha, beta. The theta part is
  // always absorbed, so this is: the horizontal part lies in dtheta ^ (horizontal
  // (k-2)-forms), tested against the cokernel of that map.
  bool in_I(const F& w, int k) const {
    require_degree(w, k, "in_I");
    const F h = horizontal_part(w);
    if (k < 2) return h.is_zero();
    if (k > 2 * n() + 1) return true;
    const auto& ideal = ctx_->ideal(k);
    for (std::size_t r = 0; r < ideal.cokernel.rows(); ++r) {
      Coeff acc{};
      for (auto& [m, value] : h.terms()) {
        const Rational& entry = ideal.cokernel(r, ideal.map.codomain_index.at(m));
        if (!is_zero(entry)) acc = acc + value * entry;
      }
      if (!acc.is_zero()) return false;
    }
    return true;
  }

  // Canonical representative of [w] in Omega^k / I^k: the horizontal part,
  // orthogonally projected off dtheta ^ (horizontal (k-2)-forms).
  F reduce_mod_I(const F& w, int k) const {
    require_degree(w, k, "reduce_mod_I");
    if (k > n()) throw std::domain_error("reduce_mod_I is defined for k <= n");
    const F h = horizontal_part(w);
    if (k < 2) return h;
    const auto& ideal = ctx_->ideal(k);
    const auto& proj = ideal.complement_projector;
    F out(n(), k);
    for (std::size_t r = 0; r < ideal.map.codomain.size(); ++r) {
      Coeff acc{};
      for (auto& [m, value] : h.terms()) {
        const Rational& entry = proj(r, ideal.map.codomain_index.at(m));
        if (!is_zero(entry)) acc = acc + value * entry;
      }
      out.add_term(ideal.map.codomain[r], acc);
    }
    return out;
  }

 private:
  static void require_degree(const F& w, int k, const char* op) {
    if (w.degree() != k)
      throw std::invalid_argument(std::string(op) + ": form has degree " +
                                  std::to_string(w.degree()) + ", expected " + std::to_string(k));
  }
  void require_horizontal(const F& w, int k, const char* op) const {
    require_degree(w, k, op);
    if (!vertical_part(w).is_zero())
      throw std::invalid_argument(std::string(op) + ": input must be theta-free");
  }

  ContextPtr ctx_;
  Frame frame_;
};

using SymbolicCalculus = Calculus<ScalarExpr, SymbolicFrame>;

inline SymbolicCalculus symbolic_calculus(const ContextPtr& ctx) {
  return SymbolicCalculus(ctx, SymbolicFrame{ctx->n(), ctx->convention().bracket()});
}

}  // namespace heis
