#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "seqspec/rng.hpp"
#include "seqspec/seqcov.hpp"

using namespace seqspec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

MatrixXd gaussian_columns(std::int64_t p, std::int64_t n, std::uint64_t seed) {
  MatrixXd x(p, n);
  NormalStream g(seed, 0);
  g.fill(x.data(), x.data() + x.size());
  return x;
}

}  // namespace

TEST(SeqCov, TracesMatchDenseAfterEveryPush) {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t p = 1 + static_cast<std::int64_t>(gen() % 20);
    const std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 50);
    const MatrixXd x = gaussian_columns(p, n, gen());
    const Dimensions dims(n, p);
    SeqCovState st(p);
    for (std::int64_t k = 1; k <= n; ++k) {
      st.push(x.col(k - 1));
      const MatrixXd b = x.leftCols(k) * x.leftCols(k).transpose() / static_cast<double>(n);
      const auto snap = st.snapshot(dims);
      EXPECT_EQ(snap.count, k);
      EXPECT_LT(rel(snap.tr_b, b.trace()), 1e-10);
      EXPECT_LT(rel(snap.tr_b2, (b * b).trace()), 1e-10);
      EXPECT_LT(rel(snap.tr_b4, (b * b * b * b).trace()), 1e-9);
      if (k > p) {
        ASSERT_TRUE(snap.logdet_b.has_value()) << "p=" << p << " k=" << k;
        Eigen::LLT<MatrixXd> llt(b);
        const double ld = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        EXPECT_NEAR(*snap.logdet_b, ld, 1e-8 * std::max(1.0, std::abs(ld)));
      }
      if (k < p) {
        EXPECT_FALSE(snap.logdet_b.has_value());
      }
    }
  }
}

TEST(SeqCov, PermutationInvariantFinalState) {
  const std::int64_t p = 12, n = 40;
  const MatrixXd x = gaussian_columns(p, n, 5);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(3));
  SeqCovState a(p), b(p);
  for (int i = 0; i < n; ++i) {
    a.push(x.col(i));
    b.push(x.col(perm[static_cast<std::size_t>(i)]));
  }
  const Dimensions dims(n, p);
  const auto sa = a.snapshot(dims), sb = b.snapshot(dims);
  EXPECT_LT(rel(sa.tr_b, sb.tr_b), 1e-12);
  EXPECT_LT(rel(sa.tr_b2, sb.tr_b2), 1e-12);
  EXPECT_LT(rel(sa.tr_b4, sb.tr_b4), 1e-11);
  EXPECT_NEAR(*sa.logdet_b, *sb.logdet_b, 1e-10);
}

TEST(SeqCov, IdentityColumnsGiveExactTraces) {
  // Pushing e_1..e_p gives S = I.
  const std::int64_t p = 5;
  SeqCovState st(p);
  for (std::int64_t j = 0; j < p; ++j) st.push(VectorXd::Unit(p, j));
  const auto snap = st.snapshot(Dimensions(p, p));
  EXPECT_DOUBLE_EQ(snap.tr_b, 1.0);
  EXPECT_DOUBLE_EQ(snap.tr_b2, 1.0 / p);
  ASSERT_TRUE(snap.logdet_b.has_value());
  EXPECT_NEAR(*snap.logdet_b, -p * std::log(static_cast<double>(p)), 1e-12);
}

TEST(SeqCov, RankDeficientHasNoLogdet) {
  const std::int64_t p = 4;
  SeqCovState st(p);
  const VectorXd v = VectorXd::Ones(p);
  for (int i = 0; i < 10; ++i) st.push(v * (i + 1.0));
  EXPECT_FALSE(st.snapshot(Dimensions(10, p)).logdet_b.has_value());
}

TEST(SeqCov, LongStreamStaysAccurate) {
  const std::int64_t p = 8, n = 3000;
  const MatrixXd x = gaussian_columns(p, n, 8);
  SeqCovState st(p);
  for (std::int64_t i = 0; i < n; ++i) st.push(x.col(i));
  const MatrixXd s = x * x.transpose();
  EXPECT_LT(rel(st.tr2(), (s * s).trace()), 1e-12);
  EXPECT_LT(rel(st.tr4(), (s * s * s * s).trace()), 1e-11);
  EXPECT_LT((st.s() - s).cwiseAbs().maxCoeff() / s.cwiseAbs().maxCoeff(), 1e-13);
  const MatrixXd l = st.cholesky_factor();
  EXPECT_LT((l * l.transpose() - s).cwiseAbs().maxCoeff() / s.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SeqCov, TracesOnlySkipsOptionalCaches) {
  SeqCovState st(3, Tracking::traces_only());
  for (int i = 0; i < 10; ++i) st.push(VectorXd::Constant(3, i + 1.0) + VectorXd::Unit(3, i % 3));
  EXPECT_FALSE(st.has_cholesky());
  EXPECT_FALSE(st.snapshot(Dimensions(10, 3)).logdet_b.has_value());
}

TEST(SeqCov, Errors) {
  EXPECT_THROW(SeqCovState(0), DomainError);
  SeqCovState st(3);
  EXPECT_THROW(st.push(VectorXd::Ones(4)), DomainError);
  EXPECT_THROW(st.snapshot(Dimensions(5, 3)), DomainError);
  VectorXd bad = VectorXd::Ones(3);
  bad(1) = std::nan("");
  EXPECT_THROW(st.push(bad), DomainError);
  st.push(VectorXd::Ones(3));
  st.push(VectorXd::Ones(3));
  EXPECT_THROW(st.snapshot(Dimensions(1, 3)), DomainError);
}
