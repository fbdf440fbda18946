#include <gtest/gtest.h>

#include <random>

#include "heis/scalar_expr.hpp"
#include "support.hpp"

namespace heis {
namespace {

using testing::random_raw;
using testing::random_scalar;
using testing::sym;

ScalarExpr X(int j, const ScalarExpr& e, int n = 1) { return derive(j, e, n); }
ScalarExpr Y(int j, const ScalarExpr& e, int n = 1) { return derive(j + n, e, n); }
ScalarExpr T(const ScalarExpr& e, int n = 1) { return derive(2 * n + 1, e, n); }

TEST(ScalarAlgebra, BracketXYIsT) {
  const auto f = sym("f");
  EXPECT_EQ(X(1, Y(1, f)) - Y(1, X(1, f)), T(f));
}

TEST(ScalarAlgebra, BracketFollowsConventionSign) {
  const auto f = sym("f");
  EXPECT_EQ(derive(1, derive(2, f, 1, -1), 1, -1) - derive(2, derive(1, f, 1, -1), 1, -1), -T(f));
}

TEST(ScalarAlgebra, TIsCentral) {
  const int n = 2;
  const auto f = sym("f");
  for (int j = 1; j <= 2 * n; ++j)
    EXPECT_TRUE((derive(j, T(f, n), n) - T(derive(j, f, n), n)).is_zero()) << j;
}

TEST(ScalarAlgebra, DistinctPairsCommute) {
  const int n = 2;
  const auto f = sym("f");
  // X1 with X2, Y2; Y1 with X2, Y2.
  for (int a : {1, 3})
    for (int b : {2, 4}) EXPECT_TRUE((derive(a, derive(b, f, n), n) - derive(b, derive(a, f, n), n)).is_zero());
}

TEST(ScalarAlgebra, ProductsCommute) {
  const auto f = sym("f"), g = sym("g");
  EXPECT_TRUE((f * g - g * f).is_zero());
  EXPECT_TRUE(scalar_eq(X(1, f) * g, g * X(1, f)));
}

TEST(ScalarAlgebra, ScalarEqExamples) {
  const auto f = sym("f");
  EXPECT_FALSE(scalar_eq(X(1, Y(1, f)), Y(1, X(1, f))));
  EXPECT_TRUE(scalar_eq(ScalarExpr(), f - f));
}

TEST(ScalarAlgebra, LeibnizOnProduct) {
  const auto f = sym("f"), g = sym("g");
  EXPECT_EQ(X(1, f * g), X(1, f) * g + f * X(1, g));
}

TEST(ScalarAlgebra, DerivativeOfConstantVanishes) {
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(derive(2 * n + 1, ScalarExpr(Rational(7, 3)), n).is_zero());
}

TEST(ScalarAlgebra, IndexOutOfRangeThrows) {
  EXPECT_THROW(derive(4, sym("f"), 1), std::out_of_range);
  EXPECT_THROW(derive(0, sym("f"), 1), std::out_of_range);
}

TEST(ScalarAlgebra, StoredWordsAreCanonical) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto e = random_scalar(rng, 2);
    for (auto& [p, c] : e.terms()) {
      EXPECT_FALSE(is_zero(c));
      EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
      for (auto& f : p) EXPECT_TRUE(f.word.canonical());
    }
  }
}

// Y1 X1 X1 f = X1 X1 Y1 f - 2 X1 T f, by hand: Y X = X Y - T twice.
TEST(ScalarAlgebra, HandRewrittenWord) {
  const auto f = sym("f");
  const ScalarExpr lhs = ScalarExpr::applied({{y_letter(1), x_letter(1), x_letter(1)}}, "f");
  const ScalarExpr rhs = ScalarExpr::applied({{x_letter(1), x_letter(1), y_letter(1)}}, "f") -
                         Rational(2) * ScalarExpr::applied({{x_letter(1), kT}}, "f");
  EXPECT_EQ(lhs, rhs);
}

TEST(ScalarAlgebraProperty, Idempotence) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto e = random_scalar(rng, 2);
    EXPECT_EQ(normalize(to_raw(e)), e);
  }
}

TEST(ScalarAlgebraProperty, ConfluenceUnderRandomRewriteOrder) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 2; ++n)
    for (int i = 0; i < 200; ++i) {
      const auto raw = random_raw(rng, n, 3, 2, 4);
      std::mt19937_64 order(static_cast<std::uint64_t>(i) * 7919u + n);
      DescentChooser chooser = [&order](const std::vector<std::size_t>& d) { return d[order() % d.size()]; };
      EXPECT_EQ(normalize(raw, 1, &chooser), normalize(raw, 1));
      DescentChooser last = [](const std::vector<std::size_t>& d) { return d.back(); };
      EXPECT_EQ(normalize(raw, 1, &last), normalize(raw, 1));
    }
}

TEST(ScalarAlgebraProperty, Linearity) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto a = random_raw(rng, 2), b = random_raw(rng, 2);
    RawScalarExpr joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    EXPECT_EQ(normalize(joined), normalize(a) + normalize(b));
  }
}

TEST(ScalarAlgebraProperty, LeibnizConsistency) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 60; ++i) {
      const auto a = random_scalar(rng, n), b = random_scalar(rng, n);
      for (int j = 1; j <= 2 * n + 1; ++j)
        EXPECT_EQ(derive(j, a * b, n), derive(j, a, n) * b + a * derive(j, b, n));
    }
}

TEST(ScalarAlgebraRender, Text) {
  const auto f = sym("f"), g = sym("g");
  EXPECT_EQ(to_text(X(1, Y(1, f))), "X1(Y1(f))");
  EXPECT_EQ(to_text(Rational(3, 2) * f * g), "3/2*f*g");
  EXPECT_EQ(to_text(-f), "-f");
  EXPECT_EQ(to_text(ScalarExpr()), "0");
  EXPECT_EQ(to_text(Y(1, X(1, f))), "X1(Y1(f)) - T(f)");
}

}  // namespace
}  // namespace heis
