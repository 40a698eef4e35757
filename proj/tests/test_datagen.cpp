#include <gtest/gtest.h>

#include <sstream>

#include "seqspec/datagen.hpp"

using namespace seqspec;
using Eigen::MatrixXd;

TEST(BuildCovariance, NullIsIdentity) {
  EXPECT_TRUE(build_covariance(CovarianceSpec::identity(4)).isApprox(MatrixXd::Identity(4, 4), 0.0));
}

TEST(BuildCovariance, DiagShift) {
  const MatrixXd m = build_covariance(CovarianceSpec::diag_shift(0.5, 4));
  MatrixXd want = MatrixXd::Zero(4, 4);
  want.diagonal() << 1, 1, 1.5, 1.5;
  EXPECT_EQ(m, want);
}

TEST(BuildCovariance, ScaledTridiag) {
  const MatrixXd m = build_covariance(CovarianceSpec::scaled_tridiag(0.1, 3));
  MatrixXd want(3, 3);
  want << 1.1, 0.1, 0, 0.1, 1.1, 0.1, 0, 0.1, 1.1;
  EXPECT_LT((m - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildCovariance, DiagShiftOffdiagCouplesUpperHalfIndices) {
  const MatrixXd m = build_covariance(CovarianceSpec::diag_shift_offdiag(0.2, 6));
  // 1-based couplings (4,3), (5,4), (6,5).
  MatrixXd want = MatrixXd::Identity(6, 6);
  want.diagonal().tail(3).setConstant(1.2);
  for (int j : {4, 5, 6}) {
    want(j - 1, j - 2) = 0.2;
    want(j - 2, j - 1) = 0.2;
  }
  EXPECT_LT((m - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildCovariance, ZeroParameterGivesIdentity) {
  for (auto spec : {CovarianceSpec::diag_shift(0, 6), CovarianceSpec::diag_shift_offdiag(0, 6),
                    CovarianceSpec::scaled_identity_eps(0, 6), CovarianceSpec::scaled_tridiag(0, 6)})
    EXPECT_EQ(build_covariance(spec), MatrixXd::Identity(6, 6));
}

TEST(BuildCovariance, Errors) {
  EXPECT_THROW(build_covariance(CovarianceSpec::diag_shift(0.5, 5)), DomainError);
  EXPECT_THROW(build_covariance(CovarianceSpec::scaled_tridiag(-0.6, 10)), DomainError);
  EXPECT_THROW(build_covariance(CovarianceSpec::scaled_identity(-1.0, 3)), DomainError);
}

TEST(MatrixSqrt, Examples) {
  EXPECT_EQ(matrix_sqrt(MatrixXd::Identity(4, 4)), MatrixXd::Identity(4, 4));
  MatrixXd d = MatrixXd::Zero(2, 2);
  d.diagonal() << 4, 9;
  MatrixXd want = MatrixXd::Zero(2, 2);
  want.diagonal() << 2, 3;
  EXPECT_EQ(matrix_sqrt(d), want);
  MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  const MatrixXd r = matrix_sqrt(m);
  EXPECT_LT((r * r - m).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(r, r.transpose());
}

TEST(MatrixSqrt, TridiagonalSquaresBack) {
  const MatrixXd m = build_covariance(CovarianceSpec::scaled_tridiag(0.3, 40));
  const MatrixXd r = matrix_sqrt(m);
  EXPECT_LT((r * r - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MatrixSqrt, RejectsBadInput) {
  MatrixXd a(2, 2);
  a << 1, 0.5, 0.2, 1;
  EXPECT_THROW(matrix_sqrt(a), DomainError);
  MatrixXd b(2, 2);
  b << 1, 2, 2, 1;
  EXPECT_THROW(matrix_sqrt(b), DomainError);
}

TEST(SphericityLimits, MatchDenseTraces) {
  for (auto spec : {CovarianceSpec::scaled_identity(2.0, 10), CovarianceSpec::diag_shift(0.7, 10),
                    CovarianceSpec::diag_shift_offdiag(0.4, 10), CovarianceSpec::scaled_identity_eps(0.3, 7),
                    CovarianceSpec::scaled_tridiag(0.25, 9)}) {
    const MatrixXd m = build_covariance(spec);
    const auto [g, h] = sphericity_limits(spec);
    const double p = static_cast<double>(spec.p);
    EXPECT_NEAR(g, m.trace() / p, 1e-14);
    EXPECT_NEAR(h, (m * m).trace() / p, 1e-13);
    EXPECT_GE(h, g * g - 1e-14);
    if (spec.kind == CovarianceKind::scaled_identity || spec.kind == CovarianceKind::scaled_identity_eps) {
      EXPECT_NEAR(h, g * g, 1e-14);
    } else {
      EXPECT_GT(h, g * g);
    }
  }
}

TEST(SphericityLimits, ClosedForms) {
  auto [g, h] = sphericity_limits(CovarianceSpec::diag_shift(1.0, 100));
  EXPECT_DOUBLE_EQ(g, 1.5);
  EXPECT_DOUBLE_EQ(h, 2.5);
  std::tie(g, h) = sphericity_limits(CovarianceSpec::scaled_tridiag(0.1, 5));
  EXPECT_NEAR(g, 1.1, 1e-15);
  EXPECT_NEAR(h, 1.21 + 2 * 0.01 * 4 / 5.0, 1e-15);
}

TEST(DrawSample, NullCovarianceConverges) {
  const Dimensions dims(1000, 2);
  const auto b = draw_sample(ChangePointScenario::null(2), dims, 11);
  const MatrixXd s = b.data * b.data.transpose() / 1000.0;
  EXPECT_LT((s - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.15);
}

TEST(DrawSample, ChangeDoublesSecondHalfEnergy) {
  const Dimensions dims(2000, 50);
  const auto scn = ChangePointScenario::change(CovarianceSpec::scaled_identity(2.0, 50), 0.5);
  const auto b = draw_sample(scn, dims, 3);
  const double first = b.data.leftCols(1000).squaredNorm() / (1000.0 * 50);
  const double second = b.data.rightCols(1000).squaredNorm() / (1000.0 * 50);
  EXPECT_NEAR(first, 1.0, 0.1);
  EXPECT_NEAR(second, 2.0, 0.1);
}

TEST(DrawSample, DenseFactorGivesTargetCovariance) {
  const std::int64_t p = 6;
  const Dimensions dims(40000, p);
  const auto spec = CovarianceSpec::scaled_tridiag(0.4, p);
  const auto b = draw_sample(ChangePointScenario{spec, spec, 1.0}, dims, 5);
  const MatrixXd s = b.data * b.data.transpose() / static_cast<double>(dims.n);
  EXPECT_LT((s - build_covariance(spec)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(DrawSample, PerCoordinateVarianceInCltBand) {
  const Dimensions dims(20000, 8);
  const auto b = draw_sample(ChangePointScenario::null(8), dims, 77);
  const double band = 5.0 * std::sqrt(2.0 / 20000.0);
  for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(b.data.row(j).squaredNorm() / 20000.0, 1.0, band);
}

TEST(DrawSample, Deterministic) {
  const Dimensions dims(50, 10);
  const auto scn = ChangePointScenario::change(CovarianceSpec::diag_shift_offdiag(0.5, 10), 0.6);
  EXPECT_EQ(draw_sample(scn, dims, 9, 4).data, draw_sample(scn, dims, 9, 4).data);
  EXPECT_NE(draw_sample(scn, dims, 9, 4).data, draw_sample(scn, dims, 9, 5).data);
}

TEST(DrawSample, DimensionMismatch) {
  EXPECT_THROW(draw_sample(ChangePointScenario::null(3), Dimensions(10, 4), 1), DomainError);
}

TEST(BatchCsv, RoundTripIsBitExact) {
  const Dimensions dims(17, 5);
  const auto b = draw_sample(ChangePointScenario::null(5), dims, 2);
  std::stringstream ss;
  write_batch_csv(ss, b);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 15), "x1,x2,x3,x4,x5\n");
  EXPECT_EQ(text.find('\r'), std::string::npos);
  const auto back = read_batch_csv(ss);
  EXPECT_EQ(back.data, b.data);
}

TEST(BatchCsv, RejectsMalformedFiles) {
  std::stringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_batch_csv(bad_header), DomainError);
  std::stringstream ragged("x1,x2\n1,2\n3\n");
  EXPECT_THROW(read_batch_csv(ragged), DomainError);
  std::stringstream nan("x1\nnan\n");
  EXPECT_THROW(read_batch_csv(nan), DomainError);
  std::stringstream empty("x1,x2\n");
  EXPECT_THROW(read_batch_csv(empty), DomainError);
}
