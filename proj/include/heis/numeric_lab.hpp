#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "heis/calculus.hpp"
#include "heis/form.hpp"
#include "heis/identities.hpp"
#include "heis/polynomial.hpp"
#include "heis/scalar_expr.hpp"
#include "heis/slicing.hpp"

namespace heis {

using PolynomialForm = Form<Polynomial>;
using PolynomialCalculus = Calculus<Polynomial, CoordinateFrame>;

inline CoordinateFrame coordinate_frame(int n, ConventionProfile profile = ConventionProfile::standard()) {
  return CoordinateFrame{n, profile.dtheta_sign};
}

inline PolynomialCalculus polynomial_calculus(const ContextPtr& ctx) {
  return PolynomialCalculus(ctx, coordinate_frame(ctx->n(), ctx->convention()));
}

class UnboundSymbolError : public std::invalid_argument {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : std::invalid_argument("unbound symbol '" + name + "'"), symbol_(name) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

using Bindings = std::map<std::string, Polynomial>;

// W-word applied to a bound polynomial, innermost letter first.
inline Polynomial apply_word(const DerivativeWord& word, const Polynomial& p, const CoordinateFrame& frame) {
  Polynomial out = p;
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it)
    out = frame.apply(frame_index_for_letter(*it, frame.n), out);
  return out;
}

// The polynomial a scalar expression denotes once every symbol is bound.
inline Polynomial realize(const ScalarExpr& e, const Bindings& bindings, const CoordinateFrame& frame) {
  Polynomial out(frame.vars());
  std::map<Factor, Polynomial> cache;
  for (auto& [product, c] : e.terms()) {
    Polynomial term(frame.vars(), c);
    for (auto& f : product) {
      auto hit = cache.find(f);
      if (hit == cache.end()) {
        auto b = bindings.find(f.symbol.name);
        if (b == bindings.end()) throw UnboundSymbolError(f.symbol.name);
        hit = cache.emplace(f, apply_word(f.word, b->second, frame)).first;
      }
      term = term * hit->second;
    }
    out += term;
  }
  return out;
}

inline PolynomialForm realize(const SymbolicForm& w, const Bindings& bindings, const CoordinateFrame& frame) {
  PolynomialForm out(w.n(), w.degree());
  for (auto& [m, c] : w.terms()) out.add_term(m, realize(c, bindings, frame));
  return out;
}

// Exact value of e at p, derivatives realized by the coordinate vector fields.
inline Rational bind_and_eval(const ScalarExpr& e, const Bindings& bindings, const std::vector<Rational>& p,
                              const CoordinateFrame& frame) {
  if (static_cast<int>(p.size()) != frame.vars())
    throw std::invalid_argument("point has " + std::to_string(p.size()) + " coordinates, expected " +
                                std::to_string(frame.vars()));
  return realize(e, bindings, frame).evaluate(p);
}

inline std::vector<double> to_doubles(const std::vector<Rational>& p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (auto& r : p) out.push_back(to_double(r));
  return out;
}

// (fn(p + s v) - fn(p - s v)) / 2s.
inline double central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                  const std::vector<double>& p, const std::vector<double>& v, double step) {
  std::vector<double> plus = p, minus = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    plus[i] += step * v[i];
    minus[i] -= step * v[i];
  }
  return (fn(plus) - fn(minus)) / (2 * step);
}

// Derivative of q along W_index at p, by central differences along the
// vector field frozen at p.
inline double frame_difference(const Polynomial& q, int index, const std::vector<double>& p,
                               const CoordinateFrame& frame, double step) {
  const auto v = frame.vector_field<double>(index, p);
  return central_difference([&](const std::vector<double>& x) { return q.evaluate(x); }, p, v, step);
}

struct FiniteDiffResult {
  double max_abs = 0;
  double max_rel = 0;  // |exact - fd| / max(1, |exact|)
  int checked = 0;
};

// For each derivative factor W_a(rest) in e, compares the exact value with a
// central difference of the bound polynomial rest along W_a.
inline FiniteDiffResult finite_diff_check(const ScalarExpr& e, const Bindings& bindings,
                                          const std::vector<Rational>& p, double step,
                                          const CoordinateFrame& frame) {
  if (!(step > 0)) throw std::invalid_argument("finite-difference step must be positive");
  FiniteDiffResult out;
  const auto pd = to_doubles(p);
  for (auto& [product, c] : e.terms()) {
    for (auto& f : product) {
      if (f.word.empty()) continue;
      auto b = bindings.find(f.symbol.name);
      if (b == bindings.end()) throw UnboundSymbolError(f.symbol.name);
      DerivativeWord inner{{f.word.letters.begin() + 1, f.word.letters.end()}};
      const Polynomial rest = apply_word(inner, b->second, frame);
      const double exact = to_double(apply_word(f.word, b->second, frame).evaluate(p));
      const double fd = frame_difference(rest, frame_index_for_letter(f.word.letters.front(), frame.n), pd,
                                         frame, step);
      const double dev = std::abs(exact - fd);
      out.max_abs = std::max(out.max_abs, dev);
      out.max_rel = std::max(out.max_rel, dev / std::max(1.0, std::abs(exact)));
      ++out.checked;
    }
  }
  return out;
}

// ---- random payloads ----

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

inline Rational random_rational(std::mt19937_64& rng, int num_bound, int den_bound) {
  std::uniform_int_distribution<int> num(-num_bound, num_bound);
  std::uniform_int_distribution<int> den(1, den_bound);
  return Rational(num(rng), den(rng));
}

// Sparse polynomial of total degree <= max_degree in `vars` variables. The
// first term has degree >= 1, so the payload is never constant.
inline Polynomial random_polynomial(std::mt19937_64& rng, int vars, int max_degree = 3, int max_terms = 4) {
  std::uniform_int_distribution<int> count(2, std::max(2, max_terms));
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<int> positive_degree(1, std::max(1, max_degree));
  std::uniform_int_distribution<int> var(0, vars - 1);
  Polynomial out(vars);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    Polynomial::Exponents e(vars, 0);
    const int d = i == 0 ? positive_degree(rng) : degree(rng);
    for (int j = 0; j < d; ++j) ++e[var(rng)];
    Rational c = random_rational(rng, 5, 3);
    if (is_zero(c)) c = 1;
    out += Polynomial::monomial(vars, std::move(e), c);
  }
  return out;
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, int vars) {
  std::vector<Rational> p;
  for (int i = 0; i < vars; ++i) p.push_back(random_rational(rng, 9, 5));
  return p;
}

// ---- coordinate model ----

// theta = dt - a sum y_j dx_j - b sum x_j dy_j as polynomial coefficients.
inline std::vector<Polynomial> theta_coefficients(const CoordinateFrame& frame) {
  const int n = frame.n, vars = frame.vars();
  std::vector<Polynomial> c(vars, Polynomial(vars));
  c[2 * n] = Polynomial(vars, Rational(1));
  for (int j = 0; j < n; ++j) {
    c[j] = Polynomial::variable(vars, j + n) * (-frame.x_shift());
    c[j + n] = Polynomial::variable(vars, j) * (-frame.y_shift());
  }
  return c;
}

// Coordinate exterior derivative of theta equals s sum dx_j ^ dy_j.
inline bool dtheta_matches_profile(const CoordinateFrame& frame) {
  const int n = frame.n, vars = frame.vars();
  const auto c = theta_coefficients(frame);
  for (int a = 0; a < vars; ++a)
    for (int b = a + 1; b < vars; ++b) {
      const Polynomial comp = c[b].partial(a) - c[a].partial(b);
      const Rational expected = (a < n && b == a + n) ? Rational(frame.dtheta_sign) : Rational(0);
      if (!(comp == Polynomial(vars, expected))) return false;
    }
  return true;
}

// dw_k(W_j) = delta_kj at p, exactly.
inline bool duality_holds(const CoordinateFrame& frame, const std::vector<Rational>& p) {
  const int m = frame.vars();
  for (int k = 1; k <= m; ++k) {
    const auto co = frame.coframe<Rational>(k, p);
    for (int j = 1; j <= m; ++j) {
      const auto v = frame.vector_field<Rational>(j, p);
      Rational pairing = 0;
      for (int i = 0; i < m; ++i) pairing += co[i] * v[i];
      if (pairing != (k == j ? 1 : 0)) return false;
    }
  }
  return true;
}

// Expected [W_a, W_b] as a multiple of T: +bracket for (X_j, Y_j), -bracket
// reversed, 0 otherwise.
inline int expected_bracket(int a, int b, int n, int bracket) {
  if (a <= n && b == a + n) return bracket;
  if (b <= n && a == b + n) return -bracket;
  return 0;
}

// [W_a, W_b] f against the expected multiple of T f, exactly on polynomials.
inline bool brackets_hold_exactly(const CoordinateFrame& frame, const Polynomial& f) {
  const int m = frame.vars(), n = frame.n;
  const Polynomial tf = frame.apply(m, f);
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b) {
      const Polynomial comm = frame.apply(a, frame.apply(b, f)) - frame.apply(b, frame.apply(a, f));
      if (!(comm == tf * Rational(expected_bracket(a, b, n, -frame.dtheta_sign)))) return false;
    }
  return true;
}

// Worst deviation of [W_a, W_b] f from the expected multiple of T f at p, with
// the outer derivative of each product taken by a central difference of the
// exact inner derivative. Relative to the size of the two products.
inline double bracket_fd_deviation(const CoordinateFrame& frame, const Polynomial& f,
                                   const std::vector<double>& p, double step) {
  const int m = frame.vars(), n = frame.n;
  const double tf = frame.apply(m, f).evaluate(p);
  double worst = 0;
  for (int a = 1; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      const double ab = frame_difference(frame.apply(b, f), a, p, frame, step);
      const double ba = frame_difference(frame.apply(a, f), b, p, frame, step);
      const double expected = expected_bracket(a, b, n, -frame.dtheta_sign) * tf;
      const double scale = std::max({1.0, std::abs(ab), std::abs(ba), std::abs(expected)});
      worst = std::max(worst, std::abs(ab - ba - expected) / scale);
    }
  return worst;
}

struct ModelCheckReport {
  int n = 1;
  int points = 0;
  bool dtheta_ok = false;
  int duality_failures = 0;
  int exact_bracket_failures = 0;
  double bracket_fd_max_rel = 0;
  double derivative_fd_max_rel = 0;
  double wall_time = 0;

  bool ok(double tolerance = 1e-6) const {
    return dtheta_ok && duality_failures == 0 && exact_bracket_failures == 0 &&
           bracket_fd_max_rel <= tolerance && derivative_fd_max_rel <= tolerance;
  }
};

// Duality, dtheta, brackets (exact and by finite differences) and first-order
// derivatives against finite differences at `points` random points.
inline ModelCheckReport check_coordinate_model(int n, int points, std::uint64_t seed, double step = 1e-5,
                                               ConventionProfile profile = ConventionProfile::standard()) {
  const auto start = std::chrono::steady_clock::now();
  const CoordinateFrame frame = coordinate_frame(n, profile);
  ModelCheckReport r;
  r.n = n;
  r.points = points;
  r.dtheta_ok = dtheta_matches_profile(frame);
  const ScalarExpr f = ScalarExpr::symbol("f");
  ScalarExpr first_order;
  for (int j = 1; j <= frame.vars(); ++j) first_order += derive(j, f, n, -profile.dtheta_sign);
  for (int i = 0; i < points; ++i) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(i));
    const auto p = random_point(rng, frame.vars());
    const Polynomial poly = random_polynomial(rng, frame.vars());
    if (!duality_holds(frame, p)) ++r.duality_failures;
    if (!brackets_hold_exactly(frame, poly)) ++r.exact_bracket_failures;
    r.bracket_fd_max_rel = std::max(r.bracket_fd_max_rel, bracket_fd_deviation(frame, poly, to_doubles(p), step));
    const auto fd = finite_diff_check(first_order, {{"f", poly}}, p, step, frame);
    r.derivative_fd_max_rel = std::max(r.derivative_fd_max_rel, fd.max_rel);
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---- random identity check ----

// The forms that vanish when the identity holds, over any coefficient ring.
// corrupt_rhs negates the right-hand side (for membership: the correction term).
template <class Coeff, class Frame>
std::vector<Form<Coeff>> identity_residuals(IdentityId id, const Calculus<Coeff, Frame>& calc, const Coeff& g,
                                            const Form<Coeff>& omega, bool corrupt_rhs) {
  auto side = [corrupt_rhs](const Form<Coeff>& rhs) { return corrupt_rhs ? -rhs : rhs; };
  switch (id) {
    case IdentityId::kLeibnizDefect:
      return {leibniz_defect(calc, g, omega) - side(leibniz_defect_formula(calc, g, omega))};
    case IdentityId::kJMembership: {
      const auto e = slicing_expression(calc, g, omega, corrupt_rhs ? -1 : 1);
      return {wedge(e, calc.theta()), wedge(e, calc.dtheta())};
    }
    case IdentityId::kVerticalSplit:
      return {slicing_expression(calc, g, omega) - side(vertical_split(calc, g, omega))};
    case IdentityId::kThetaNormalForm:
      return {slicing_expression(calc, g, omega) - side(theta_normal_form(calc, g, omega))};
    case IdentityId::kH1Coefficients: {
      if (calc.n() != 1) throw std::domain_error("h1-explicit requires n = 1");
      const auto wp = decompose_theta(omega).horizontal;
      return {slicing_expression(calc, g, wp) -
              side(h1_coefficient_form(calc, g, wp.coefficient(bit_of(1)), wp.coefficient(bit_of(2))))};
    }
    case IdentityId::kClassInvariance:
      break;
  }
  throw std::invalid_argument("no residual for exploratory identity " + std::string(external_name(id)));
}

struct RandomCheckOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  bool corrupt_rhs = false;
  bool zero_bindings = false;
  int max_degree = 3;
  ConventionProfile convention = ConventionProfile::standard();
  unsigned threads = 0;  // 0: hardware concurrency
};

struct RandomCheckReport {
  IdentityId identity = IdentityId::kLeibnizDefect;
  int n = 1;
  ConventionProfile convention;
  std::uint64_t seed = 0;
  int trials = 0;
  int nonzero = 0;
  bool corrupted = false;
  std::vector<int> failing_trials;
  double wall_time = 0;
};

// One trial: fresh polynomials for g and every coefficient of w from the
// trial's own seed, identity rebuilt over the polynomial ring, residual
// evaluated at a random rational point.
inline bool random_trial_nonzero(IdentityId id, const PolynomialCalculus& calc, const RandomCheckOptions& opt,
                                 int trial) {
  const int n = calc.n(), vars = 2 * n + 1;
  auto rng = trial_rng(opt.seed, static_cast<std::uint64_t>(trial));
  auto payload = [&] { return opt.zero_bindings ? Polynomial(vars) : random_polynomial(rng, vars, opt.max_degree); };
  const Polynomial g = payload();
  PolynomialForm omega(n, n);
  for (Monomial m : monomials_of_degree(horizontal_mask(n) | theta_bit(n), n)) omega.add_term(m, payload());
  const auto p = random_point(rng, vars);
  for (auto& r : identity_residuals(id, calc, g, omega, opt.corrupt_rhs))
    for (auto& [m, c] : r.terms())
      if (!is_zero(c.evaluate(p))) return true;
  return false;
}

inline RandomCheckReport random_identity_check(IdentityId id, int n, const RandomCheckOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (opt.trials < 0) throw std::invalid_argument("trials must be nonnegative");
  const auto ctx = make_context(n, opt.convention);
  const auto calc = polynomial_calculus(ctx);
  RandomCheckReport r;
  r.identity = id;
  r.n = n;
  r.convention = opt.convention;
  r.seed = opt.seed;
  r.trials = opt.trials;
  r.corrupted = opt.corrupt_rhs;

  std::vector<char> hit(opt.trials, 0);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < opt.trials; i = next++) hit[i] = random_trial_nonzero(id, calc, opt, i) ? 1 : 0;
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max(1, opt.trials));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int i = 0; i < opt.trials; ++i)
    if (hit[i]) r.failing_trials.push_back(i);
  r.nonzero = static_cast<int>(r.failing_trials.size());
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---- slicing functions ----

struct SlicingProfile {
  double t = 0;
  double h = 1;
  double eps = 0.125;
};

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (|s - t| - |s - (t + h)| + h) / (2h); 0 below t, 1 above t + h, linear between.
template <class Num>
Num gamma_h(const Num& s, const Num& t, const Num& h) {
  using std::abs;
  if (!(h > 0)) throw ProfileError("gamma_h needs h > 0");
  return Num((abs(Num(s - t)) - abs(Num(s - (t + h))) + h) / (2 * h));
}

inline double gamma_h(double s, const SlicingProfile& p) { return gamma_h<double>(s, p.t, p.h); }

namespace detail {

inline void require_ramp_profile(const SlicingProfile& p) {
  if (!(p.h > 0)) throw ProfileError("smooth_ramp needs h > 0");
  if (!(p.eps > 0 && p.eps < p.h / 2)) throw ProfileError("smooth_ramp needs 0 < eps < h/2");
}

// Distribution function of the bump (15/16)(1 - u^2)^2 on [-1, 1].
inline double bump_cdf(double z) {
  if (z <= -1) return 0;
  if (z >= 1) return 1;
  const double z2 = z * z;
  return 15.0 / 16.0 * (z - 2.0 * z * z2 / 3.0 + z * z2 * z2 / 5.0) + 0.5;
}

// Integral of bump_cdf(u / eps) from -inf to v: 0 below -eps, v above eps.
inline double integrated_cdf(double v, double eps) {
  if (v <= -eps) return 0;
  if (v >= eps) return v;
  const double w = v / eps, w2 = w * w;
  const double g = 15.0 / 16.0 * (w2 / 2 - w2 * w2 / 6 + w2 * w2 * w2 / 30) + w / 2;
  return eps * (g + 5.0 / 32.0);
}

}  // namespace detail

// Clamped ramp from t + eps to t + h - eps, mollified by a biweight bump of
// half-width eps. 0 for s <= t, 1 for s >= t + h, C^2, slope at most 1/(h - 2 eps).
inline double smooth_ramp(double s, const SlicingProfile& p) {
  detail::require_ramp_profile(p);
  const double a = p.t + p.eps, b = p.t + p.h - p.eps;
  if (s <= p.t) return 0;
  if (s >= p.t + p.h) return 1;
  return (detail::integrated_cdf(s - a, p.eps) - detail::integrated_cdf(s - b, p.eps)) / (b - a);
}

inline double smooth_ramp_derivative(double s, const SlicingProfile& p) {
  detail::require_ramp_profile(p);
  const double a = p.t + p.eps, b = p.t + p.h - p.eps;
  if (s <= p.t || s >= p.t + p.h) return 0;
  return (detail::bump_cdf((s - a) / p.eps) - detail::bump_cdf((s - b) / p.eps)) / (b - a);
}

// Largest difference quotient over consecutive points of a uniform grid on
// [lo, hi] plus random pairs; a lower bound on the Lipschitz constant.
inline double lipschitz_estimate(const std::function<double(double)>& fn, double lo, double hi, int samples,
                                 std::uint64_t seed = 0, int random_pairs = 1000) {
  if (samples < 2) throw std::invalid_argument("lipschitz_estimate needs at least 2 samples");
  if (!(hi > lo)) throw std::invalid_argument("lipschitz_estimate needs lo < hi");
  double best = 0;
  double prev_s = lo, prev_v = fn(lo);
  for (int i = 1; i < samples; ++i) {
    const double s = lo + (hi - lo) * i / (samples - 1);
    const double v = fn(s);
    best = std::max(best, std::abs(v - prev_v) / (s - prev_s));
    prev_s = s;
    prev_v = v;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (int i = 0; i < random_pairs; ++i) {
    const double s1 = u(rng), s2 = u(rng);
    if (s1 == s2) continue;
    best = std::max(best, std::abs(fn(s1) - fn(s2)) / std::abs(s1 - s2));
  }
  return best;
}

}  // namespace heis
