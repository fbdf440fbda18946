#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "heis/identities.hpp"
#include "support.hpp"

namespace heis {
namespace {

using testing::sym;

class Suite : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto requests = full_suite();
    const auto reports = run_suite(requests);
    results_ = new std::map<std::pair<IdentityId, int>, VerificationReport>;
    for (std::size_t i = 0; i < requests.size(); ++i) results_->emplace(std::pair{requests[i].id, requests[i].n}, reports[i]);
  }
  static void TearDownTestSuite() {
    delete results_;
    results_ = nullptr;
  }
  static const VerificationReport& at(IdentityId id, int n) { return results_->at({id, n}); }
  static bool has_note(const VerificationReport& r, const std::string& needle) {
    return std::any_of(r.notes.begin(), r.notes.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  }

  static std::map<std::pair<IdentityId, int>, VerificationReport>* results_;
};
std::map<std::pair<IdentityId, int>, VerificationReport>* Suite::results_ = nullptr;

TEST_F(Suite, LeibnizDefectVerifiesForAllN) {
  for (int n = 1; n <= 3; ++n) {
    const auto& r = at(IdentityId::kLeibnizDefect, n);
    EXPECT_EQ(r.status, Status::kVerified) << n;
    EXPECT_EQ(r.convention, ConventionProfile::standard());
    for (auto& line : r.line_audit) EXPECT_EQ(line.verdict, AuditVerdict::kMatch) << line.label;
  }
}

TEST_F(Suite, OddNVerifiesUnderDefaultProfile) {
  for (auto id : {IdentityId::kJMembership, IdentityId::kVerticalSplit, IdentityId::kThetaNormalForm})
    for (int n : {1, 3}) EXPECT_EQ(at(id, n).status, Status::kVerified) << external_name(id) << " n=" << n;
}

TEST_F(Suite, EvenNFailsUnderBothProfilesWithDiagnosis) {
  for (auto id : {IdentityId::kJMembership, IdentityId::kVerticalSplit, IdentityId::kThetaNormalForm}) {
    const auto& r = at(id, 2);
    EXPECT_EQ(r.status, Status::kFailed) << external_name(id);
    EXPECT_TRUE(has_note(r, "also fails under the flipped convention profile")) << external_name(id);
    EXPECT_TRUE(has_note(r, "residual equals")) << external_name(id);
  }
}

TEST_F(Suite, EvenNResidualIsTwiceDgWedgeOmega) {
  const auto ws = make_workspace(2);
  const auto dgw = wedge(ws->calc.d(ws->calc.scalar(ws->g)), ws->omega);
  EXPECT_EQ(at(IdentityId::kVerticalSplit, 2).difference(), Rational(2) * horizontal_part(dgw));
  EXPECT_EQ(at(IdentityId::kThetaNormalForm, 2).difference(), Rational(2) * dgw);
  EXPECT_EQ(at(IdentityId::kJMembership, 2).difference(), wedge(Rational(2) * horizontal_part(dgw), ws->calc.theta()));
}

TEST_F(Suite, H1CoefficientsVerifyWithConsistentAudit) {
  const auto& r = at(IdentityId::kH1Coefficients, 1);
  EXPECT_EQ(r.status, Status::kVerified);
  EXPECT_TRUE(h1_audit_consistent(r));
  for (auto& line : r.line_audit)
    if (line.label == "dx^theta coefficient" || line.label == "dy^theta coefficient") {
      EXPECT_EQ(line.verdict, AuditVerdict::kSignMismatch) << line.label;
      EXPECT_EQ(line.flipped, std::vector<std::size_t>{0}) << line.label;
    }
}

TEST_F(Suite, ClassInvarianceIsExploratoryAndReportsNoChange) {
  for (int n = 1; n <= 2; ++n) {
    const auto& r = at(IdentityId::kClassInvariance, n);
    EXPECT_TRUE(r.exploratory);
    EXPECT_EQ(r.residuals.size(), 3u);
    EXPECT_TRUE(r.holds()) << n;
  }
}

TEST_F(Suite, ExitCodeReflectsEvenNFailures) {
  std::vector<VerificationReport> all;
  for (auto& [key, r] : *results_) all.push_back(r);
  EXPECT_EQ(suite_exit_code(all), 1);
  std::vector<VerificationReport> odd;
  for (auto& [key, r] : *results_)
    if (key.second != 2) odd.push_back(r);
  EXPECT_EQ(suite_exit_code(odd), 0);
}

TEST(Identities, Names) {
  for (auto id : kAllIdentities) {
    EXPECT_EQ(parse_identity(external_name(id)), id);
    EXPECT_EQ(parse_identity(alias_name(id)), id);
  }
  EXPECT_FALSE(parse_identity("no-such-identity").has_value());
}

TEST(Identities, OutOfRangeNThrows) {
  EXPECT_THROW(run_checker(IdentityId::kH1Coefficients, *make_workspace(2)), std::domain_error);
  EXPECT_THROW(run_checker(IdentityId::kClassInvariance, *make_workspace(3)), std::domain_error);
}

TEST(Identities, ConstantGAndZeroOmegaAreTrivial) {
  for (int n = 1; n <= 2; ++n) {
    const auto ctx = make_context(n);
    const SlicingWorkspace constant_g(ctx, ScalarExpr(Rational(3)), generic_form(n, n, "w"));
    const SlicingWorkspace zero_omega(ctx, sym("g"), SymbolicForm(n, n));
    for (auto* ws : {&constant_g, &zero_omega}) {
      EXPECT_TRUE(ws->expression.is_zero());
      for (auto id : {IdentityId::kLeibnizDefect, IdentityId::kJMembership, IdentityId::kVerticalSplit,
                      IdentityId::kThetaNormalForm})
        EXPECT_EQ(run_checker(id, *ws).status, Status::kVerified) << external_name(id) << " n=" << n;
    }
  }
}

TEST(Identities, WorkspaceRejectsWrongDegree) {
  EXPECT_THROW(SlicingWorkspace(make_context(2), sym("g"), generic_form(2, 1, "w")), std::invalid_argument);
}

// With beta = 0 the normal form loses only its beta terms; at odd n the
// slicing expression still equals it.
TEST(Identities, ThetaFreeOmega) {
  for (int n : {1, 3}) {
    const SlicingWorkspace ws(make_context(n), sym("g"), generic_form(n, n, "w", true));
    EXPECT_EQ(run_checker(IdentityId::kThetaNormalForm, ws).status, Status::kVerified) << n;
  }
}

TEST(Identities, Deterministic) {
  const auto a = run_checker(IdentityId::kThetaNormalForm, *make_workspace(2));
  const auto b = run_checker(IdentityId::kThetaNormalForm, *make_workspace(2));
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.rhs, b.rhs);
  ASSERT_EQ(a.line_audit.size(), b.line_audit.size());
  for (std::size_t i = 0; i < a.line_audit.size(); ++i) {
    EXPECT_EQ(a.line_audit[i].engine, b.line_audit[i].engine);
    EXPECT_EQ(a.line_audit[i].verdict, b.line_audit[i].verdict);
  }
}

TEST(AuditLine, ClassifiesSigns) {
  const auto x = SymbolicForm::covector(1, 1), y = SymbolicForm::covector(1, 2);
  EXPECT_EQ(audit_line("l", "x+y", x + y, {{"x", 1, x}, {"y", 1, y}}).verdict, AuditVerdict::kMatch);
  const auto flipped = audit_line("l", "x-y", x - y, {{"x", 1, x}, {"y", 1, y}});
  EXPECT_EQ(flipped.verdict, AuditVerdict::kSignMismatch);
  EXPECT_EQ(flipped.flipped, std::vector<std::size_t>{1});
  EXPECT_EQ(audit_line("l", "2x", Rational(2) * x, {{"x", 1, x}}).verdict, AuditVerdict::kMismatch);
}

}  // namespace
}  // namespace heis
