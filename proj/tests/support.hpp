#pragma once

#include <random>
#include <string>
#include <vector>

#include "heis/calculus.hpp"
#include "heis/form.hpp"
#include "heis/scalar_expr.hpp"

namespace heis::testing {

inline const std::vector<std::string>& symbol_pool() {
  static const std::vector<std::string> pool{"f", "g", "h", "u", "v"};
  return pool;
}

// Random word of up to max_len letters over the alphabet of H^n, in any order.
inline DerivativeWord random_word(std::mt19937_64& rng, int n, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> idx(1, 2 * n + 1);
  DerivativeWord w;
  const int k = len(rng);
  for (int i = 0; i < k; ++i) w.letters.push_back(letter_for_frame_index(idx(rng), n));
  return w;
}

inline RawScalarExpr random_raw(std::mt19937_64& rng, int n, int max_terms = 3, int max_factors = 2,
                                int max_len = 4) {
  std::uniform_int_distribution<int> terms(1, max_terms);
  std::uniform_int_distribution<int> factors(0, max_factors);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<std::size_t> sym(0, symbol_pool().size() - 1);
  RawScalarExpr raw;
  const int k = terms(rng);
  for (int i = 0; i < k; ++i) {
    RawTerm t{make_rational(coeff(rng), 1 + static_cast<long>(rng() % 3)), {}};
    const int m = factors(rng);
    for (int j = 0; j < m; ++j) t.factors.emplace_back(random_word(rng, n, max_len), FunctionSymbol{symbol_pool()[sym(rng)]});
    raw.push_back(std::move(t));
  }
  return raw;
}

inline ScalarExpr random_scalar(std::mt19937_64& rng, int n, int bracket = 1, int max_terms = 3, int max_len = 3) {
  return normalize(random_raw(rng, n, max_terms, 2, max_len), bracket);
}

inline SymbolicForm random_form(std::mt19937_64& rng, int n, int degree, int bracket = 1, int max_monomials = 3) {
  SymbolicForm f(n, degree);
  auto basis = monomials_of_degree(horizontal_mask(n) | theta_bit(n), degree);
  if (basis.empty()) return f;
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  std::uniform_int_distribution<int> count(1, max_monomials);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) f.add_term(basis[pick(rng)], random_scalar(rng, n, bracket, 2, 2));
  return f;
}

inline SymbolicForm cov(int n, int index) { return SymbolicForm::covector(n, index); }
inline ScalarExpr sym(const std::string& s) { return ScalarExpr::symbol(s); }

}  // namespace heis::testing
