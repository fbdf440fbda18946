#include <gtest/gtest.h>

#include <cmath>

#include "heis/numeric_lab.hpp"
#include "support.hpp"

namespace heis {
namespace {

using testing::sym;

Polynomial var(int n, int v) { return Polynomial::variable(2 * n + 1, v); }

std::vector<Rational> point(std::initializer_list<int> xs) {
  std::vector<Rational> p;
  for (int x : xs) p.emplace_back(x);
  return p;
}

TEST(Polynomial, Arithmetic) {
  const auto x = var(1, 0), t = var(1, 2);
  const auto p = x * x * t + Polynomial(3, Rational(2));
  EXPECT_EQ(p.total_degree(), 3);
  EXPECT_EQ(p.partial(0), x * t * Rational(2));
  EXPECT_EQ(p.evaluate(point({2, 5, 3})), Rational(14));
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{2, 5, 3}), 14.0);
}

TEST(BindAndEval, HandValues) {
  const int n = 1;
  const auto frame = coordinate_frame(n);
  const Bindings b{{"f", var(n, 2)}};
  const auto p = point({1, 2, 3});
  const auto f = sym("f");
  EXPECT_EQ(bind_and_eval(derive(3, f, n), b, p, frame), Rational(1));
  // X = d/dx - (y/2) d/dt on t gives -y/2.
  EXPECT_EQ(bind_and_eval(derive(1, f, n), b, p, frame), Rational(-1));
  EXPECT_EQ(bind_and_eval(derive(2, f, n), b, p, frame), Rational(1, 2));
  // [X, Y] t - T t vanishes.
  const auto bracket = derive(1, derive(2, f, n), n) - derive(2, derive(1, f, n), n) - derive(3, f, n);
  EXPECT_TRUE(bracket.is_zero());
  const auto raw = ScalarExpr::applied({{x_letter(1), y_letter(1)}}, "f");
  EXPECT_EQ(bind_and_eval(raw, b, p, frame) - bind_and_eval(ScalarExpr::applied({{y_letter(1), x_letter(1)}}, "f"), b, p, frame),
            bind_and_eval(derive(3, f, n), b, p, frame));
}

TEST(BindAndEval, Errors) {
  const auto frame = coordinate_frame(1);
  EXPECT_THROW(bind_and_eval(sym("f"), {}, point({0, 0, 0}), frame), UnboundSymbolError);
  EXPECT_THROW(bind_and_eval(sym("f"), {{"f", var(1, 0)}}, point({0, 0}), frame), std::invalid_argument);
}

TEST(FiniteDiff, QuadraticTimesT) {
  const int n = 1;
  const auto frame = coordinate_frame(n);
  const auto x = var(n, 0), t = var(n, 2);
  const Bindings b{{"f", x * x * t}};
  const auto f = sym("f");
  ScalarExpr all;
  for (int j = 1; j <= 3; ++j) all += derive(j, f, n);
  const auto r = finite_diff_check(all, b, point({1, 2, 3}), 1e-5, frame);
  EXPECT_EQ(r.checked, 3);
  EXPECT_LT(r.max_rel, 1e-6);
}

TEST(FiniteDiff, ConstantGivesZero) {
  const auto frame = coordinate_frame(1);
  const Bindings b{{"f", Polynomial(3, Rational(5))}};
  const auto r = finite_diff_check(derive(1, sym("f"), 1), b, point({1, 2, 3}), 1e-5, frame);
  EXPECT_EQ(r.max_abs, 0.0);
}

TEST(FiniteDiff, ErrorShrinksWithStep) {
  const int n = 2;
  const auto frame = coordinate_frame(n);
  auto rng = trial_rng(3, 0);
  // Cubic with nonzero third derivatives so the truncation error is visible.
  const auto x1 = var(n, 0), y1 = var(n, 2), t = var(n, 4);
  const Bindings b{{"f", x1 * x1 * x1 * Rational(50) + y1 * y1 * t * Rational(30) + random_polynomial(rng, 5)}};
  const auto p = point({1, -2, 3, 1, 2});
  const auto e = derive(1, sym("f"), n) + derive(3, sym("f"), n);
  const double e3 = finite_diff_check(e, b, p, 1e-3, frame).max_abs;
  const double e4 = finite_diff_check(e, b, p, 1e-4, frame).max_abs;
  const double e5 = finite_diff_check(e, b, p, 1e-5, frame).max_abs;
  EXPECT_LT(e4, e3);
  EXPECT_LT(e5, 1e-6);
  EXPECT_THROW(finite_diff_check(e, b, p, 0.0, frame), std::invalid_argument);
}

TEST(CoordinateModel, ConsistentForBothProfiles) {
  for (int n = 1; n <= 3; ++n)
    for (auto p : {ConventionProfile::standard(), ConventionProfile::flipped()}) {
      const auto r = check_coordinate_model(n, 20, 5, 1e-5, p);
      EXPECT_TRUE(r.ok()) << "n=" << n << " bracket " << r.bracket_fd_max_rel << " deriv " << r.derivative_fd_max_rel;
    }
}

TEST(CoordinateModel, BracketMatchesSymbolicRule) {
  const auto frame = coordinate_frame(2);
  EXPECT_EQ(expected_bracket(1, 3, 2, 1), 1);
  EXPECT_EQ(expected_bracket(3, 1, 2, 1), -1);
  EXPECT_EQ(expected_bracket(1, 4, 2, 1), 0);
  auto rng = trial_rng(4, 0);
  EXPECT_TRUE(brackets_hold_exactly(frame, random_polynomial(rng, 5)));
  // The flipped frame violates the standard bracket.
  CoordinateFrame wrong{2, +1};
  const auto f = var(2, 4);
  EXPECT_FALSE((wrong.apply(1, wrong.apply(3, f)) - wrong.apply(3, wrong.apply(1, f)) - wrong.apply(5, f)).is_zero());
}

TEST(RandomCheck, VerifiedIdentitiesHaveNoViolations) {
  RandomCheckOptions opt;
  opt.trials = 25;
  for (int n : {1, 3})
    for (auto id : {IdentityId::kLeibnizDefect, IdentityId::kJMembership, IdentityId::kThetaNormalForm})
      EXPECT_EQ(random_identity_check(id, n, opt).nonzero, 0) << external_name(id) << " n=" << n;
  EXPECT_EQ(random_identity_check(IdentityId::kH1Coefficients, 1, opt).nonzero, 0);
}

TEST(RandomCheck, EvenNFailureIsSeenNumerically) {
  RandomCheckOptions opt;
  opt.trials = 10;
  EXPECT_GT(random_identity_check(IdentityId::kThetaNormalForm, 2, opt).nonzero, 5);
  EXPECT_EQ(random_identity_check(IdentityId::kLeibnizDefect, 2, opt).nonzero, 0);
}

TEST(RandomCheck, MutationIsCaught) {
  RandomCheckOptions opt;
  opt.trials = 40;
  opt.corrupt_rhs = true;
  for (auto id : {IdentityId::kLeibnizDefect, IdentityId::kJMembership, IdentityId::kVerticalSplit,
                  IdentityId::kThetaNormalForm}) {
    const auto r = random_identity_check(id, 1, opt);
    EXPECT_GE(r.nonzero, 38) << external_name(id);
    EXPECT_TRUE(r.corrupted);
  }
}

TEST(RandomCheck, ZeroBindingsGiveZero) {
  RandomCheckOptions opt;
  opt.trials = 5;
  opt.zero_bindings = true;
  opt.corrupt_rhs = true;
  EXPECT_EQ(random_identity_check(IdentityId::kThetaNormalForm, 2, opt).nonzero, 0);
}

TEST(RandomCheck, SeededAndThreadIndependent) {
  RandomCheckOptions a;
  a.trials = 12;
  a.seed = 99;
  a.corrupt_rhs = true;
  a.threads = 1;
  RandomCheckOptions b = a;
  b.threads = 4;
  EXPECT_EQ(random_identity_check(IdentityId::kVerticalSplit, 1, a).failing_trials,
            random_identity_check(IdentityId::kVerticalSplit, 1, b).failing_trials);
  EXPECT_THROW(random_identity_check(IdentityId::kClassInvariance, 1, a), std::invalid_argument);
}

// n = 1, g = g(x), w = w1 dx: the dx^theta coefficient is -Y(w1) X(g) and the
// dy^theta coefficient vanishes.
TEST(H1Specialization, CoefficientsInCoordinates) {
  const int n = 1;
  const auto ctx = make_context(n);
  const auto calc = polynomial_calculus(ctx);
  const auto& frame = calc.frame();
  const auto x = var(n, 0), y = var(n, 1), t = var(n, 2);
  const Polynomial g = x * x * x + x * Rational(2);
  const Polynomial w1 = x * y * t + y * y + t * Rational(3);
  const PolynomialForm omega = PolynomialForm::monomial(n, bit_of(1), w1);
  const auto e = slicing_expression(calc, g, omega);
  const auto expected_dx = -(frame.apply(2, w1) * frame.apply(1, g));
  EXPECT_TRUE((e.coefficient(bit_of(1) | bit_of(3)) - expected_dx).is_zero());
  EXPECT_TRUE(e.coefficient(bit_of(2) | bit_of(3)).is_zero());
  EXPECT_TRUE(horizontal_part(e).is_zero());
}

TEST(Gamma, Branches) {
  const SlicingProfile p{1.0, 0.5, 0.1};
  EXPECT_EQ(gamma_h(0.9, p), 0.0);
  EXPECT_EQ(gamma_h(1.0, p), 0.0);
  EXPECT_DOUBLE_EQ(gamma_h(1.25, p), 0.5);
  EXPECT_EQ(gamma_h(1.5, p), 1.0);
  EXPECT_EQ(gamma_h(7.0, p), 1.0);
  EXPECT_EQ(gamma_h<Rational>(Rational(6, 5), Rational(1), Rational(1, 2)), Rational(2, 5));
  EXPECT_THROW(gamma_h(0.0, SlicingProfile{0, 0, 0.1}), ProfileError);
}

TEST(SmoothRamp, ShapeAndSlope) {
  const SlicingProfile p{0.0, 1.0, 0.125};
  EXPECT_EQ(smooth_ramp(-0.1, p), 0.0);
  EXPECT_EQ(smooth_ramp(1.1, p), 1.0);
  EXPECT_NEAR(smooth_ramp(0.5, p), 0.5, 1e-15);
  EXPECT_EQ(smooth_ramp_derivative(-0.5, p), 0.0);
  EXPECT_EQ(smooth_ramp_derivative(1.5, p), 0.0);
  EXPECT_NEAR(smooth_ramp_derivative(0.5, p), 1.0 / 0.75, 1e-12);
  double prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = smooth_ramp(i / 1000.0, p);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
  // Derivative against a central difference.
  for (double s : {0.05, 0.12, 0.2, 0.5, 0.9})
    EXPECT_NEAR(smooth_ramp_derivative(s, p), (smooth_ramp(s + 1e-6, p) - smooth_ramp(s - 1e-6, p)) / 2e-6, 1e-6);
}

TEST(SmoothRamp, RejectsBadProfiles) {
  EXPECT_THROW(smooth_ramp(0.0, SlicingProfile{0, 1, 0.5}), ProfileError);
  EXPECT_THROW(smooth_ramp(0.0, SlicingProfile{0, 1, 0}), ProfileError);
  EXPECT_THROW(smooth_ramp_derivative(0.0, SlicingProfile{0, -1, 0.1}), ProfileError);
}

TEST(Lipschitz, LinearFunction) {
  EXPECT_NEAR(lipschitz_estimate([](double s) { return 3 * s; }, 0, 1, 100), 3.0, 1e-12);
  EXPECT_THROW(lipschitz_estimate([](double s) { return s; }, 0, 1, 1), std::invalid_argument);
}

}  // namespace
}  // namespace heis
