#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "heis/cli.hpp"
#include "heis/dsl.hpp"
#include "cli_cases.hpp"
#include "support.hpp"

namespace heis {
namespace {

using testing::cov;
using testing::random_form;
using testing::random_scalar;
using testing::sym;

TEST(Dsl, ParsesDifferentialOfF) {
  const auto calc = symbolic_calculus(make_context(1));
  EXPECT_EQ(parse_form("X1(f)*dx1 + Y1(f)*dy1 + T(f)*theta", 1), calc.d(calc.scalar(sym("f"))));
}

TEST(Dsl, WedgeAndStarAgree) {
  EXPECT_EQ(parse_form("f*dx1^dy2", 2), parse_form("f^dx1*dy2", 2));
  EXPECT_EQ(parse_form("dy1^dx1", 1), -wedge(cov(1, 1), cov(1, 2)));
  EXPECT_EQ(parse_form("-(1/2)*dx1 + 3/2*dx1", 1), cov(1, 1));
}

TEST(Dsl, ProfileChangesBracket) {
  const auto a = parse_scalar("X1(Y1(f)) - Y1(X1(f))", 1);
  const auto b = parse_scalar("X1(Y1(f)) - Y1(X1(f))", 1, ConventionProfile::flipped());
  EXPECT_EQ(a, derive(3, sym("f"), 1));
  EXPECT_EQ(b, -derive(3, sym("f"), 1));
}

TEST(Dsl, FrameIndexAlias) {
  EXPECT_EQ(parse_scalar("W2(f)", 2), parse_scalar("X2(f)", 2));
  EXPECT_EQ(parse_scalar("w5(f)", 2), parse_scalar("T(f)", 2));
  EXPECT_EQ(parse_scalar("w1", 1), sym("w1"));
}

void expect_error(const std::string& src, int n, int line, int column, const std::string& fragment) {
  try {
    parse_form(src, n);
    ADD_FAILURE() << "no error for " << src;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << src;
    EXPECT_EQ(e.column(), column) << src;
    EXPECT_NE(e.message().find(fragment), std::string::npos) << e.what();
  }
}

TEST(Dsl, Errors) {
  expect_error("w1(f)*dx1^dy1 + g*theta", 1, 1, 17, "mixed degrees");
  expect_error("dx2", 1, 1, 1, "out of range");
  expect_error("X2(f)", 1, 1, 1, "out of range");
  expect_error("f +\n  * g", 1, 2, 3, "unexpected");
  expect_error("1/0", 1, 1, 3, "zero denominator");
  expect_error("X1(dx1)", 1, 1, 4, "applies to scalars");
  expect_error("theta^dx1^dy1^dx1", 1, 1, 14, "exceeds");
  expect_error("f $ g", 1, 1, 3, "unexpected character");
  expect_error("(f + g", 1, 1, 7, "expected ')'");
  expect_error("T + f", 1, 1, 1, "reserved");
  expect_error("Q(f)", 1, 1, 1, "unknown operator");
  EXPECT_THROW(parse_form("f", 5), std::out_of_range);
  EXPECT_THROW(parse_form("dx1", 1, ConventionProfile::standard(), 2), ParseError);
  EXPECT_EQ(parse_form("0", 1, ConventionProfile::standard(), 2), SymbolicForm(1, 2));
}

TEST(DslProperty, RoundTrip) {
  for (int n = 1; n <= 2; ++n) {
    std::mt19937_64 rng(40 + n);
    for (int i = 0; i < 1000; ++i) {
      const auto s = random_scalar(rng, n, 1, 3, 3);
      ASSERT_EQ(parse_scalar(to_text(s), n), s) << to_text(s);
      const int k = static_cast<int>(rng() % (2 * n + 2));
      const auto f = random_form(rng, n, k);
      ASSERT_EQ(parse_form(to_text(f), n, ConventionProfile::standard(), k), f) << to_text(f);
      const auto ff = random_form(rng, n, k, -1);
      ASSERT_EQ(parse_form(to_text(ff), n, ConventionProfile::flipped(), k), ff) << to_text(ff);
    }
  }
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, SpecifiedOutputs) {
  auto r = cli({"d", "--n", "1", "f"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "X1(f)*dx1 + Y1(f)*dy1 + T(f)*theta\n");
  r = cli({"Linv", "--n", "1", "dx1^dy1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "-1\n");
  r = cli({"L", "--n", "1", "--format", "latex", "1"});
  EXPECT_EQ(r.out, "-dx_1 \\wedge dy_1\n");
  r = cli({"d", "--n", "1", "0"});
  EXPECT_EQ(r.out, "0\n");
}

TEST(Cli, StructuredVerifyReport) {
  const auto r = cli({"verify", "leibniz-defect", "--n", "2", "--format", "structured"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = Json::parse(r.out);
  for (auto* key : {"identity", "n", "convention", "status", "result", "line_audit", "seed", "wall_time"})
    EXPECT_TRUE(doc.contains(key)) << key;
  EXPECT_EQ(doc["status"], "verified");
  EXPECT_EQ(doc["identity"], std::string(external_name(IdentityId::kLeibnizDefect)));
}

TEST(Cli, StructuredOutputIsDeterministic) {
  auto strip = [](const std::string& s) {
    auto j = Json::parse(s);
    j.erase("wall_time");
    return j.dump();
  };
  const std::vector<std::string> args{"verify", "vertical-split", "--n", "1", "--trials", "5", "--seed", "3",
                                      "--format", "structured"};
  EXPECT_EQ(strip(cli(args).out), strip(cli(args).out));
}

TEST(Cli, ExitCodeMatrix) {
  for (auto& c : testing::cli_exit_cases()) {
    const auto r = cli(c.args);
    EXPECT_EQ(r.code, c.code) << testing::joined(c.args) << "\n" << r.err;
    if (c.code == kExitUsage) {
      EXPECT_FALSE(r.err.empty()) << testing::joined(c.args);
    }
  }
}

TEST(Cli, EvalValues) {
  auto r = cli({"eval", "--n", "1", "X1(f)", "--bind", "f=t", "--at", "1,2,3"});
  EXPECT_EQ(r.out, "-1\n");
  r = cli({"eval", "--n", "1", "X1(Y1(f)) - Y1(X1(f))", "--bind", "f=x1*x1*t", "--at", "1,2,3"});
  EXPECT_EQ(r.out, "1\n");
}

TEST(Cli, PolynomialAndPointParsing) {
  const auto p = parse_polynomial("x1*x1*t - 1/2*y1", 1);
  EXPECT_EQ(p.evaluate(std::vector<Rational>{Rational(2), Rational(4), Rational(3)}), Rational(10));
  EXPECT_THROW(parse_point("1,2", 1), UsageError);
  EXPECT_EQ(parse_point("1/2, -3, 0", 1)[0], Rational(1, 2));
}

}  // namespace
}  // namespace heis
