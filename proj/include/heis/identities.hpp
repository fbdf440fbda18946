#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heis/calculus.hpp"
#include "heis/form.hpp"
#include "heis/slicing.hpp"

namespace heis {

enum class IdentityId : std::uint8_t {
  kLeibnizDefect,    // script_L(g w) - g script_L(w) = L^{-1}(-h(dg ^ w))
  kJMembership,      // the slicing expression lies in J^{n+1}
  kVerticalSplit,    // slicing expression = v(dg ^ w) + (d sL(g w) - g d sL(w)) ^ theta
  kThetaNormalForm,  // slicing expression = [ ... ] ^ theta
  kH1Coefficients,   // explicit dx^theta, dy^theta coefficients for n = 1
  kClassInvariance,  // exploratory: dependence on the representative of [w]_{I^n}
};

inline constexpr std::array<IdentityId, 6> kAllIdentities = {
    IdentityId::kLeibnizDefect,   IdentityId::kJMembership,    IdentityId::kVerticalSplit,
    IdentityId::kThetaNormalForm, IdentityId::kH1Coefficients, IdentityId::kClassInvariance,
};

// Names used on the command line and in reports.
inline std::string_view external_name(IdentityId id) {
  switch (id) {
    case IdentityId::kLeibnizDefect: return "lemma-3.14";
    case IdentityId::kJMembership: return "lemma-3.15";
    case IdentityId::kVerticalSplit: return "eq-3.4.1";
    case IdentityId::kThetaNormalForm: return "final-rewrite";
    case IdentityId::kH1Coefficients: return "h1-explicit";
    case IdentityId::kClassInvariance: return "class-invariance";
  }
  return "?";
}

inline std::string_view alias_name(IdentityId id) {
  switch (id) {
    case IdentityId::kLeibnizDefect: return "leibniz-defect";
    case IdentityId::kJMembership: return "j-membership";
    case IdentityId::kVerticalSplit: return "vertical-split";
    case IdentityId::kThetaNormalForm: return "theta-normal-form";
    case IdentityId::kH1Coefficients: return "h1-coefficients";
    case IdentityId::kClassInvariance: return "class-invariance";
  }
  return "?";
}

inline std::optional<IdentityId> parse_identity(std::string_view name) {
  for (auto id : kAllIdentities)
    if (name == external_name(id) || name == alias_name(id)) return id;
  return std::nullopt;
}

// Range of n each checker accepts.
inline std::pair<int, int> supported_n(IdentityId id) {
  switch (id) {
    case IdentityId::kH1Coefficients: return {1, 1};
    case IdentityId::kClassInvariance: return {1, 2};
    default: return {1, 3};
  }
}

inline bool is_exploratory(IdentityId id) { return id == IdentityId::kClassInvariance; }

enum class Status : std::uint8_t { kVerified, kFailed, kVerifiedUnderProfile };

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::kVerified: return "verified";
    case Status::kFailed: return "failed";
    case Status::kVerifiedUnderProfile: return "verified-under-profile";
  }
  return "?";
}

enum class AuditVerdict : std::uint8_t { kMatch, kSignMismatch, kMismatch };

inline std::string_view verdict_name(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::kMatch: return "match";
    case AuditVerdict::kSignMismatch: return "sign-mismatch";
    case AuditVerdict::kMismatch: return "mismatch";
  }
  return "?";
}

// One line of a derivation: the line as written and as the
// engine computes it (the signs that make it an exact identity).
struct AuditLine {
  std::string label;
  std::string written;
  std::string engine;
  AuditVerdict verdict = AuditVerdict::kMatch;
  std::vector<std::size_t> flipped;  // indices of right-hand terms whose sign differs
  std::vector<std::string> flipped_terms;
};

struct Residual {
  std::string name;
  SymbolicForm form;
};

struct VerificationReport {
  IdentityId identity = IdentityId::kLeibnizDefect;
  int n = 1;
  Status status = Status::kFailed;
  ConventionProfile convention;
  SymbolicForm lhs;
  SymbolicForm rhs;
  std::vector<Residual> residuals;  // all zero <=> the identity holds
  std::vector<AuditLine> line_audit;
  std::vector<std::string> notes;
  double wall_time = 0.0;
  bool exploratory = false;

  bool holds() const {
    for (auto& r : residuals)
      if (!r.form.is_zero()) return false;
    return true;
  }
  // First nonzero residual, or the (zero) first residual.
  const SymbolicForm& difference() const {
    for (auto& r : residuals)
      if (!r.form.is_zero()) return r.form;
    return residuals.front().form;
  }
};

struct AuditTerm {
  std::string text;
  int written_sign = 1;
  SymbolicForm value;
};

namespace detail {

inline std::string signed_sum(const std::vector<AuditTerm>& terms, const std::vector<int>& signs) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i == 0) {
      out += signs[i] < 0 ? "-" : "";
    } else {
      out += signs[i] < 0 ? " - " : " + ";
    }
    out += terms[i].text;
  }
  return out.empty() ? "0" : out;
}

}  // namespace detail

// Finds the sign assignment closest to the written one (fewest flips, ties
// broken by lowest term index) under which lhs equals the signed sum of terms.
inline AuditLine audit_line(std::string label, const std::string& lhs_text, const SymbolicForm& lhs,
                            const std::vector<AuditTerm>& terms) {
  AuditLine line;
  line.label = std::move(label);
  std::vector<int> written_signs;
  for (auto& t : terms) written_signs.push_back(t.written_sign);
  line.written = lhs_text + " = " + detail::signed_sum(terms, written_signs);

  const std::size_t k = terms.size();
  if (k > 16) throw std::invalid_argument("audit line with too many terms");
  std::vector<std::uint32_t> masks(std::size_t{1} << k);
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    if (std::popcount(a) != std::popcount(b)) return std::popcount(a) < std::popcount(b);
    // lower indices first among equal flip counts: compare bit-reversed order
    for (std::uint32_t bit = 1; bit; bit <<= 1)
      if ((a & bit) != (b & bit)) return (a & bit) != 0;
    return false;
  });
  for (std::uint32_t mask : masks) {
    std::vector<int> signs = written_signs;
    SymbolicForm sum(lhs.n(), lhs.degree());
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) signs[i] = -signs[i];
      if (terms[i].value.degree() != lhs.degree())
        throw std::invalid_argument("audit term degree mismatch in line " + line.label);
      sum += signs[i] > 0 ? terms[i].value : -terms[i].value;
    }
    if (sum == lhs) {
      line.engine = lhs_text + " = " + detail::signed_sum(terms, signs);
      line.verdict = mask == 0 ? AuditVerdict::kMatch : AuditVerdict::kSignMismatch;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) {
          line.flipped.push_back(i);
          line.flipped_terms.push_back(terms[i].text);
        }
      return line;
    }
  }
  line.verdict = AuditVerdict::kMismatch;
  line.engine = "no choice of signs on the right-hand terms reproduces " + lhs_text;
  return line;
}

// Generic form: one fresh symbol per monomial, named prefix + indices
// (indices are single digits since n <= 4).
inline SymbolicForm generic_form(int n, int degree, const std::string& prefix,
                                 bool horizontal_only = false) {
  SymbolicForm f(n, degree);
  const Monomial mask = horizontal_only ? horizontal_mask(n) : (horizontal_mask(n) | theta_bit(n));
  for (Monomial m : monomials_of_degree(mask, degree)) {
    std::string name = prefix;
    for (int i : monomial_indices(m)) name += std::to_string(i);
    f.add_term(m, ScalarExpr::symbol(name));
  }
  return f;
}

// Generic g, w for one context, and the slicing expression built once so every
// checker sees the same normal form.
struct SlicingWorkspace {
  ContextPtr ctx;
  SymbolicCalculus calc;
  ScalarExpr g;
  SymbolicForm omega;
  SymbolicForm expression;

  explicit SlicingWorkspace(ContextPtr c)
      : ctx(std::move(c)),
        calc(symbolic_calculus(ctx)),
        g(ScalarExpr::symbol("g")),
        omega(generic_form(ctx->n(), ctx->n(), "w")),
        expression(slicing_expression(calc, g, omega)) {}

  SlicingWorkspace(ContextPtr c, ScalarExpr g_, SymbolicForm omega_)
      : ctx(std::move(c)),
        calc(symbolic_calculus(ctx)),
        g(std::move(g_)),
        omega(std::move(omega_)),
        expression(slicing_expression(calc, g, omega)) {
    if (omega.n() != ctx->n() || omega.degree() != ctx->n())
      throw std::invalid_argument("slicing workspace needs an n-form");
  }
};

using WorkspacePtr = std::shared_ptr<const SlicingWorkspace>;

inline WorkspacePtr make_workspace(int n, ConventionProfile profile = ConventionProfile::standard()) {
  return std::make_shared<const SlicingWorkspace>(make_context(n, profile));
}

namespace detail {

struct Chain {
  const SymbolicCalculus& calc;
  SymbolicForm th, dth;

  explicit Chain(const SymbolicCalculus& c) : calc(c), th(c.theta()), dth(c.dtheta()) {}

  SymbolicForm W(const SymbolicForm& a, const SymbolicForm& b) const { return wedge(a, b); }
  SymbolicForm d(const SymbolicForm& a) const { return calc.d(a); }
  SymbolicForm Li(const SymbolicForm& a) const { return calc.L_inv(a); }
  SymbolicForm sL(const SymbolicForm& a) const { return calc.script_L(a); }
};

// Compares a residual with +-2 h(dg ^ w) and +-2 dg ^ w: the signatures of the
// graded signs (-1)^(n-1) in d(gamma ^ theta) and d(beta ^ theta), and (-1)^n in
// theta ^ w', taken as +1.
inline void diagnose_graded_sign(VerificationReport& report, const SymbolicForm& residual,
                                 const SymbolicForm& dgw) {
  if (residual.is_zero() || residual.degree() != dgw.degree()) return;
  const SymbolicForm twice_h = Rational(2) * horizontal_part(dgw);
  const SymbolicForm twice = Rational(2) * dgw;
  if (residual == twice_h || residual == -twice_h) {
    report.notes.push_back(
        "residual equals " + std::string(residual == twice_h ? "" : "-") +
        "2 h(dg^w): d(gamma^th) contributes (-1)^(n-1) gamma^dth, which cancels -h(dg^w) only "
        "for odd n");
  } else if (residual == twice || residual == -twice) {
    report.notes.push_back(
        "residual equals " + std::string(residual == twice ? "" : "-") +
        "2 dg^w: 2 h(dg^w) from the gamma^dth sign, plus 2 v(dg^w) from theta^w' = (-1)^n w'^th and "
        "d(b^th) = db^th + (-1)^(n-1) b^dth, all taken with n odd");
  }
}

inline std::vector<AuditLine> vertical_chain_audit(const SlicingWorkspace& ws) {
  Chain c(ws.calc);
  const auto& w = ws.omega;
  const auto& g = ws.g;
  const auto dg = c.d(ws.calc.scalar(g));
  const auto dgw = c.W(dg, w);
  const auto slw = c.sL(w);
  const auto gamma = c.Li(-horizontal_part(dgw));
  const auto dgamma = c.d(gamma);
  const auto& E = ws.expression;
  const auto dsl_gw = c.d(c.sL(g * w));
  const auto dsl_w = c.d(slw);

  std::vector<AuditLine> lines;
  lines.push_back(audit_line("first component split", "dg^(w + sL(w)^th)",
                             c.W(dg, w + c.W(slw, c.th)),
                             {{"dg^w", 1, dgw}, {"dg^sL(w)^th", 1, c.W(c.W(dg, slw), c.th)}}));
  lines.push_back(audit_line("horizontal part as dtheta multiple", "-h(dg^w)", -horizontal_part(dgw),
                             {{"dth^gamma", 1, c.W(c.dth, gamma)}}));
  lines.push_back(audit_line("dtheta commutes", "dth^gamma", c.W(c.dth, gamma),
                             {{"gamma^dth", 1, c.W(gamma, c.dth)}}));
  lines.push_back(audit_line("Leibniz on gamma^theta", "d(gamma^th)", c.d(c.W(gamma, c.th)),
                             {{"d(gamma)^th", 1, c.W(dgamma, c.th)}, {"gamma^dth", 1, c.W(gamma, c.dth)}}));
  lines.push_back(audit_line("second component", "d(gamma^th)", c.d(c.W(gamma, c.th)),
                             {{"d(gamma)^th", 1, c.W(dgamma, c.th)}, {"h(dg^w)", -1, horizontal_part(dgw)}}));
  lines.push_back(audit_line("components combined", "E", E,
                             {{"dg^w", 1, dgw},
                              {"dg^sL(w)^th", 1, c.W(c.W(dg, slw), c.th)},
                              {"d(gamma)^th", 1, c.W(dgamma, c.th)},
                              {"h(dg^w)", -1, horizontal_part(dgw)}}));
  lines.push_back(audit_line("vertical projection", "E", E,
                             {{"v(dg^w)", 1, vertical_part(dgw)},
                              {"dg^sL(w)^th", 1, c.W(c.W(dg, slw), c.th)},
                              {"d(gamma)^th", 1, c.W(dgamma, c.th)}}));
  lines.push_back(audit_line("vertical split", "E", E,
                             {{"v(dg^w)", 1, vertical_part(dgw)},
                              {"d(sL(g w))^th", 1, c.W(dsl_gw, c.th)},
                              {"g d(sL(w))^th", -1, c.W(g * dsl_w, c.th)}}));
  return lines;
}

inline std::vector<AuditLine> theta_chain_audit(const SlicingWorkspace& ws) {
  Chain c(ws.calc);
  const int n = ws.ctx->n();
  const auto& w = ws.omega;
  const auto& g = ws.g;
  const auto split = decompose_theta(w);
  const auto& wp = split.horizontal;
  const auto& b = split.beta;
  const auto dg = c.d(ws.calc.scalar(g));
  const auto dgw = c.W(dg, w);
  const ScalarExpr tg = ws.calc.frame_derivative(2 * n + 1, g);
  const auto dwp = c.d(wp);
  const auto db = c.d(b);
  const auto li_wp = c.Li(-horizontal_part(dwp));                      // L^{-1}(-h(dw'))
  const auto li_gwp = c.Li(-horizontal_part(c.W(dg, wp) + g * dwp));  // L^{-1}(-h(dg^w' + g dw'))
  const auto& E = ws.expression;
  const auto th = c.th;

  std::vector<AuditLine> lines;
  lines.push_back(audit_line("vertical part of dg^w", "v(dg^w)", vertical_part(dgw),
                             {{"T(g) th^w'", 1, tg * c.W(th, wp)}, {"dg^b^th", 1, c.W(c.W(dg, b), th)}}));
  lines.push_back(audit_line("d of the split form", "dw", c.d(w),
                             {{"dw'", 1, dwp}, {"db^th", 1, c.W(db, th)}, {"b^dth", 1, c.W(b, c.dth)}}));
  lines.push_back(audit_line("horizontal part of dw", "-h(dw)", -horizontal_part(c.d(w)),
                             {{"h(dw')", -1, horizontal_part(dwp)}, {"b^dth", -1, c.W(b, c.dth)}}));
  lines.push_back(audit_line("sL(w) via the split (dw read as dw')", "sL(w)", c.sL(w),
                             {{"Linv(-h(dw'))", 1, li_wp}, {"b", -1, b}}));
  lines.push_back(audit_line("-g d sL(w) (dw read as dw')", "-g d(sL(w))", -(g * c.d(c.sL(w))),
                             {{"g d(Linv(-h(dw')))", -1, g * c.d(li_wp)}, {"g db", 1, g * db}}));
  lines.push_back(audit_line("d(g w) via the split", "d(g w)", c.d(g * w),
                             {{"dg^w'", 1, c.W(dg, wp)},
                              {"g dw'", 1, g * dwp},
                              {"dg^b^th", 1, c.W(c.W(dg, b), th)},
                              {"g db^th", 1, g * c.W(db, th)},
                              {"g b^dth", 1, g * c.W(b, c.dth)}}));
  lines.push_back(audit_line("horizontal part of d(g w)", "-h(d(g w))", -horizontal_part(c.d(g * w)),
                             {{"h(dg^w' + g dw')", -1, horizontal_part(c.W(dg, wp) + g * dwp)},
                              {"g b^dth", -1, g * c.W(b, c.dth)}}));
  lines.push_back(audit_line("sL(g w) via the split", "sL(g w)", c.sL(g * w),
                             {{"Linv(-h(dg^w' + g dw'))", 1, li_gwp}, {"g b", -1, g * b}}));
  lines.push_back(audit_line("d sL(g w)", "d(sL(g w))", c.d(c.sL(g * w)),
                             {{"d(Linv(-h(dg^w' + g dw')))", 1, c.d(li_gwp)},
                              {"dg^b", -1, c.W(dg, b)},
                              {"g db", -1, g * db}}));
  const auto dsl_diff = c.d(c.sL(g * w)) - g * c.d(c.sL(w));
  lines.push_back(audit_line("d sL(g w) - g d sL(w) (dw read as dw')", "d(sL(g w)) - g d(sL(w))", dsl_diff,
                             {{"d(Linv(-h(dg^w' + g dw')))", 1, c.d(li_gwp)},
                              {"g d(Linv(-h(dw')))", -1, g * c.d(li_wp)},
                              {"dg^b", -1, c.W(dg, b)}}));
  const auto vsplit = vertical_part(dgw) + c.W(dsl_diff, th);
  lines.push_back(audit_line("bracket before cancellation", "v(dg^w) + (d(sL(g w)) - g d(sL(w)))^th", vsplit,
                             {{"T(g) w'^th", -1, tg * c.W(wp, th)},
                              {"dg^b^th", 1, c.W(c.W(dg, b), th)},
                              {"d(Linv(-h(dg^w' + g dw')))^th", 1, c.W(c.d(li_gwp), th)},
                              {"g d(Linv(-h(dw')))^th", -1, g * c.W(c.d(li_wp), th)},
                              {"dg^b^th", -1, c.W(c.W(dg, b), th)}}));
  const auto li_h_gdwp = c.Li(horizontal_part(g * dwp));
  lines.push_back(audit_line("Leibniz through Linv", "d(Linv(h(g dw')))", c.d(li_h_gdwp),
                             {{"dg^Linv(h(dw'))", 1, c.W(dg, c.Li(horizontal_part(dwp)))},
                              {"g d(Linv(h(dw')))", 1, g * c.d(c.Li(horizontal_part(dwp)))}}));
  lines.push_back(audit_line("theta normal form", "E", E,
                             {{"T(g) w'^th", -1, tg * c.W(wp, th)},
                              {"d(Linv(h(dg^w')))^th", -1, c.W(c.d(c.Li(horizontal_part(c.W(dg, wp)))), th)},
                              {"dg^Linv(h(dw'))^th", -1, c.W(c.W(dg, c.Li(horizontal_part(dwp))), th)}}));
  return lines;
}

}  // namespace detail

inline VerificationReport check_leibniz_defect(const SlicingWorkspace& ws) {
  VerificationReport r;
  r.identity = IdentityId::kLeibnizDefect;
  r.n = ws.ctx->n();
  r.convention = ws.ctx->convention();
  detail::Chain c(ws.calc);
  const auto& g = ws.g;
  const auto& w = ws.omega;
  r.lhs = leibniz_defect(ws.calc, g, w);
  r.rhs = leibniz_defect_formula(ws.calc, g, w);
  r.residuals.push_back({"lhs - rhs", r.lhs - r.rhs});
  const auto dg = c.d(ws.calc.scalar(g));
  r.line_audit.push_back(audit_line("Leibniz defect", "sL(g w) - g sL(w)", r.lhs,
                                    {{"Linv(-h(dg^w))", 1, r.rhs}}));
  r.line_audit.push_back(
      audit_line("d(g w)", "d(g w)", c.d(g * w), {{"dg^w", 1, c.W(dg, w)}, {"g dw", 1, g * c.d(w)}}));
  r.line_audit.push_back(audit_line("sL(g w) split", "sL(g w)", c.sL(g * w),
                                    {{"Linv(-h(dg^w))", 1, r.rhs}, {"g sL(w)", 1, g * c.sL(w)}}));
  return r;
}

inline VerificationReport check_j_membership(const SlicingWorkspace& ws) {
  VerificationReport r;
  r.identity = IdentityId::kJMembership;
  r.n = ws.ctx->n();
  r.convention = ws.ctx->convention();
  r.lhs = ws.expression;
  r.rhs = SymbolicForm(r.n, r.n + 1);
  r.residuals.push_back({"E^th", wedge(ws.expression, ws.calc.theta())});
  r.residuals.push_back({"E^dth", wedge(ws.expression, ws.calc.dtheta())});
  r.line_audit = detail::vertical_chain_audit(ws);
  if (!ws.calc.in_J(ws.expression, r.n + 1)) {
    const auto dg = ws.calc.d(ws.calc.scalar(ws.g));
    detail::diagnose_graded_sign(r, horizontal_part(ws.expression), wedge(dg, ws.omega));
  }
  return r;
}

inline VerificationReport check_vertical_split(const SlicingWorkspace& ws) {
  VerificationReport r;
  r.identity = IdentityId::kVerticalSplit;
  r.n = ws.ctx->n();
  r.convention = ws.ctx->convention();
  r.lhs = ws.expression;
  r.rhs = vertical_split(ws.calc, ws.g, ws.omega);
  r.residuals.push_back({"lhs - rhs", r.lhs - r.rhs});
  r.line_audit = detail::vertical_chain_audit(ws);
  const auto dg = ws.calc.d(ws.calc.scalar(ws.g));
  detail::diagnose_graded_sign(r, r.residuals.front().form, wedge(dg, ws.omega));
  return r;
}

inline VerificationReport check_theta_normal_form(const SlicingWorkspace& ws) {
  VerificationReport r;
  r.identity = IdentityId::kThetaNormalForm;
  r.n = ws.ctx->n();
  r.convention = ws.ctx->convention();
  r.lhs = ws.expression;
  r.rhs = theta_normal_form(ws.calc, ws.g, ws.omega);
  r.residuals.push_back({"lhs - rhs", r.lhs - r.rhs});
  r.line_audit = detail::theta_chain_audit(ws);
  const auto dg = ws.calc.d(ws.calc.scalar(ws.g));
  detail::diagnose_graded_sign(r, r.residuals.front().form, wedge(dg, ws.omega));
  return r;
}

// Term-by-term comparison for n = 1 with w' = w1 dx + w2 dy the theta-free part
// of the workspace form. The checked
// identity is the slicing expression against the coefficient form with engine
// signs; the written display enters through the audit.
inline VerificationReport check_h1_coefficients(const SlicingWorkspace& ws) {
  if (ws.ctx->n() != 1) throw std::domain_error("h1-explicit requires n = 1");
  VerificationReport r;
  r.identity = IdentityId::kH1Coefficients;
  r.n = 1;
  r.convention = ws.ctx->convention();
  const auto& calc = ws.calc;
  detail::Chain c(calc);
  const ScalarExpr& g = ws.g;
  const auto horizontal = decompose_theta(ws.omega).horizontal;
  const ScalarExpr w1 = horizontal.coefficient(bit_of(1));
  const ScalarExpr w2 = horizontal.coefficient(bit_of(2));
  const auto dx = SymbolicForm::covector(1, 1);
  const auto dy = SymbolicForm::covector(1, 2);
  const auto th = c.th;
  const auto wp = w1 * dx + w2 * dy;
  const auto W = [&](int j, const ScalarExpr& e) { return calc.frame_derivative(j, e); };
  const ScalarExpr xg = W(1, g), yg = W(2, g), tg = W(3, g);
  const ScalarExpr a = xg * w2 - yg * w1;
  const ScalarExpr b = W(1, w2) - W(2, w1);

  const auto E = slicing_expression(calc, g, wp);
  r.lhs = E;
  r.rhs = h1_coefficient_form(calc, g, w1, w2);
  r.residuals.push_back({"lhs - rhs", r.lhs - r.rhs});
  if (!(E == theta_normal_form(calc, g, wp)))
    r.notes.push_back("slicing expression differs from the theta normal form at n = 1");

  const auto dg = c.d(calc.scalar(g));
  const auto dgwp = c.W(dg, wp);
  const auto dwp = c.d(wp);
  const auto S = [&](const ScalarExpr& e) { return calc.scalar(e); };
  auto& A = r.line_audit;
  A.push_back(audit_line("first component", "-T(g) w'^th", -(tg * c.W(wp, th)),
                         {{"T(g)*w1 dx^th", 1, tg * w1 * c.W(dx, th)},
                          {"T(g)*w2 dy^th", 1, tg * w2 * c.W(dy, th)}}));
  A.push_back(audit_line("dg^w'", "dg^w'", dgwp,
                         {{"X(g)*w2 dx^dy", 1, xg * w2 * c.W(dx, dy)},
                          {"Y(g)*w1 dy^dx", 1, yg * w1 * c.W(dy, dx)},
                          {"T(g)*w1 th^dx", 1, tg * w1 * c.W(th, dx)},
                          {"T(g)*w2 th^dy", 1, tg * w2 * c.W(th, dy)}}));
  A.push_back(audit_line("h(dg^w')", "h(dg^w')", horizontal_part(dgwp),
                         {{"(X(g)*w2 - Y(g)*w1) dx^dy", 1, a * c.W(dx, dy)}}));
  A.push_back(audit_line("h(dg^w') via dtheta", "h(dg^w')", horizontal_part(dgwp),
                         {{"(X(g)*w2 - Y(g)*w1) dth", -1, a * c.dth}}));
  A.push_back(audit_line("-Linv(h(dg^w'))", "-Linv(h(dg^w'))", -c.Li(horizontal_part(dgwp)),
                         {{"X(g)*w2 - Y(g)*w1", 1, S(a)}}));
  const auto minus_dli = -c.d(c.Li(horizontal_part(dgwp)));
  A.push_back(audit_line("-d Linv(h(dg^w'))", "-d(Linv(h(dg^w')))", minus_dli,
                         {{"X(A) dx", 1, W(1, a) * dx}, {"Y(A) dy", 1, W(2, a) * dy}, {"T(A) th", 1, W(3, a) * th}}));
  A.push_back(audit_line("second component", "-d(Linv(h(dg^w')))^th", c.W(minus_dli, th),
                         {{"X(A) dx^th", 1, W(1, a) * c.W(dx, th)}, {"Y(A) dy^th", 1, W(2, a) * c.W(dy, th)}}));
  A.push_back(audit_line("dw'", "dw'", dwp,
                         {{"Y(w1) dy^dx", 1, W(2, w1) * c.W(dy, dx)},
                          {"T(w1) th^dx", 1, W(3, w1) * c.W(th, dx)},
                          {"X(w2) dx^dy", 1, W(1, w2) * c.W(dx, dy)},
                          {"T(w2) th^dy", 1, W(3, w2) * c.W(th, dy)}}));
  A.push_back(audit_line("h(dw')", "h(dw')", horizontal_part(dwp), {{"(X(w2) - Y(w1)) dx^dy", 1, b * c.W(dx, dy)}}));
  A.push_back(audit_line("h(dw') via dtheta", "h(dw')", horizontal_part(dwp), {{"(X(w2) - Y(w1)) dth", -1, b * c.dth}}));
  A.push_back(audit_line("-Linv(h(dw))", "-Linv(h(dw))", -c.Li(horizontal_part(c.d(wp))), {{"X(w2) - Y(w1)", 1, S(b)}}));
  A.push_back(audit_line("third component", "-dg^Linv(-h(dw))^th",
                         -c.W(c.W(dg, c.Li(-horizontal_part(c.d(wp)))), th),
                         {{"B*X(g) dx^th", 1, b * xg * c.W(dx, th)}, {"B*Y(g) dy^th", 1, b * yg * c.W(dy, th)}}));
  const Monomial mx = bit_of(1) | bit_of(3);
  const Monomial my = bit_of(2) | bit_of(3);
  A.push_back(audit_line("dx^theta coefficient", "[E]_(dx^th)", S(E.coefficient(mx)),
                         {{"T(g)*w1", 1, S(tg * w1)}, {"X(A)", 1, S(W(1, a))}, {"B*X(g)", 1, S(b * xg)}}));
  A.push_back(audit_line("dy^theta coefficient", "[E]_(dy^th)", S(E.coefficient(my)),
                         {{"T(g)*w2", 1, S(tg * w2)}, {"Y(A)", 1, S(W(2, a))}, {"B*Y(g)", 1, S(b * yg)}}));
  return r;
}

// True when every divergence in the two final coefficient lines is a sign flip
// and the same term positions flip in both (one correction explains all).
inline bool h1_audit_consistent(const VerificationReport& r) {
  const AuditLine* x = nullptr;
  const AuditLine* y = nullptr;
  for (auto& l : r.line_audit) {
    if (l.label == "dx^theta coefficient") x = &l;
    if (l.label == "dy^theta coefficient") y = &l;
  }
  if (!x || !y) return false;
  if (x->verdict == AuditVerdict::kMismatch || y->verdict == AuditVerdict::kMismatch) return false;
  return x->flipped == y->flipped;
}

// Exploratory: perturbs w by generic a ^ theta and c ^ dtheta (elements of
// I^n) and reports how the theta normal form changes.
inline VerificationReport check_class_invariance(const SlicingWorkspace& ws) {
  const int n = ws.ctx->n();
  if (n > 2) throw std::domain_error("class-invariance is limited to n <= 2");
  VerificationReport r;
  r.identity = IdentityId::kClassInvariance;
  r.n = n;
  r.convention = ws.ctx->convention();
  r.exploratory = true;
  const auto& calc = ws.calc;
  const auto alpha = generic_form(n, n - 1, "a");
  const auto via_theta = wedge(alpha, calc.theta());
  SymbolicForm via_dtheta(n, n);
  if (n >= 2) via_dtheta = wedge(generic_form(n, n - 2, "c"), calc.dtheta());
  const auto base = theta_normal_form(calc, ws.g, ws.omega);
  const auto e_theta = theta_normal_form(calc, ws.g, ws.omega + via_theta);
  const auto e_dtheta = theta_normal_form(calc, ws.g, ws.omega + via_dtheta);
  r.lhs = theta_normal_form(calc, ws.g, ws.omega + via_theta + via_dtheta);
  r.rhs = base;
  r.residuals.push_back({"change under a^th", e_theta - base});
  r.residuals.push_back({"change under c^dth", e_dtheta - base});
  r.residuals.push_back({"change under a^th + c^dth", r.lhs - base});
  r.notes.push_back("exploratory: reports the dependence on the representative of [w]; no claim is checked");
  return r;
}

inline VerificationReport run_checker(IdentityId id, const SlicingWorkspace& ws) {
  const auto [lo, hi] = supported_n(id);
  if (ws.ctx->n() < lo || ws.ctx->n() > hi)
    throw std::domain_error(std::string(external_name(id)) + " supports n in " + std::to_string(lo) +
                            ".." + std::to_string(hi));
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  switch (id) {
    case IdentityId::kLeibnizDefect: r = check_leibniz_defect(ws); break;
    case IdentityId::kJMembership: r = check_j_membership(ws); break;
    case IdentityId::kVerticalSplit: r = check_vertical_split(ws); break;
    case IdentityId::kThetaNormalForm: r = check_theta_normal_form(ws); break;
    case IdentityId::kH1Coefficients: r = check_h1_coefficients(ws); break;
    case IdentityId::kClassInvariance: r = check_class_invariance(ws); break;
  }
  r.status = r.holds() ? Status::kVerified : Status::kFailed;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Workspaces for both convention profiles of one n.
struct WorkspacePair {
  WorkspacePtr standard;
  WorkspacePtr flipped;
};

inline WorkspacePair make_workspaces(int n) {
  return {make_workspace(n, ConventionProfile::standard()), make_workspace(n, ConventionProfile::flipped())};
}

// Default profile first; on failure the flipped profile. At most two runs.
inline VerificationReport verify_identity(IdentityId id, const WorkspacePair& ws) {
  VerificationReport first = run_checker(id, *ws.standard);
  if (first.status == Status::kVerified || first.exploratory) return first;
  VerificationReport second = run_checker(id, *ws.flipped);
  if (second.status == Status::kVerified) {
    second.status = Status::kVerifiedUnderProfile;
    second.wall_time += first.wall_time;
    return second;
  }
  first.notes.push_back("also fails under the flipped convention profile (dtheta sign +1)");
  first.wall_time += second.wall_time;
  return first;
}

inline VerificationReport verify_identity(IdentityId id, int n) { return verify_identity(id, make_workspaces(n)); }

struct SuiteRequest {
  IdentityId id;
  int n;
};

// Every (identity, n) pair within the supported ranges, ordered by id then n.
inline std::vector<SuiteRequest> full_suite() {
  std::vector<SuiteRequest> out;
  for (auto id : kAllIdentities) {
    const auto [lo, hi] = supported_n(id);
    for (int n = lo; n <= hi; ++n) out.push_back({id, n});
  }
  return out;
}

// Runs the requests concurrently; results come back in request order.
inline std::vector<VerificationReport> run_suite(const std::vector<SuiteRequest>& requests) {
  std::map<int, WorkspacePair> spaces;
  for (auto& req : requests)
    if (!spaces.count(req.n)) spaces.emplace(req.n, make_workspaces(req.n));
  std::vector<std::future<VerificationReport>> futures;
  futures.reserve(requests.size());
  for (auto& req : requests) {
    const WorkspacePair& pair = spaces.at(req.n);
    futures.push_back(std::async(std::launch::async, [id = req.id, &pair] { return verify_identity(id, pair); }));
  }
  std::vector<VerificationReport> out;
  out.reserve(requests.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

// 0 if every non-exploratory report verified (under either profile), 1 otherwise.
inline int suite_exit_code(const std::vector<VerificationReport>& reports) {
  for (auto& r : reports)
    if (!r.exploratory && r.status == Status::kFailed) return 1;
  return 0;
}

}  // namespace heis
