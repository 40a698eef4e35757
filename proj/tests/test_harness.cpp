#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "seqspec/harness.hpp"

using namespace seqspec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.dims = {{60, 30}, {40, 50}};
  c.deltas = {0.0, 0.5, 1.0};
  c.replications = 40;
  c.critval_draws = 2000;
  c.seed = 17;
  c.threads = 1;
  return c;
}

std::string csv_of(const PowerCurve& c) {
  std::ostringstream os;
  write_power_csv(os, c);
  return os.str();
}

}  // namespace

TEST(Harness, CsvLayout) {
  const auto curve = run_experiment(small_config());
  ASSERT_EQ(curve.rows.size(), 6u);
  const auto text = csv_of(curve);
  EXPECT_EQ(text.rfind("n,p,delta,rate,stderr\n", 0), 0u);
  for (const auto& r : curve.rows) {
    EXPECT_GE(r.rate, 0.0);
    EXPECT_LE(r.rate, 1.0);
    EXPECT_DOUBLE_EQ(r.std_err, std::sqrt(r.rate * (1 - r.rate) / 40));
  }
}

TEST(Harness, SameSeedSameBytesAnyThreadCount) {
  auto c = small_config();
  const auto a = csv_of(run_experiment(c));
  c.threads = 4;
  const auto b = csv_of(run_experiment(c));
  EXPECT_EQ(a, b);
  c.seed = 18;
  EXPECT_NE(a, csv_of(run_experiment(c)));
}

TEST(Harness, StrongAlternativeIsDetected) {
  auto c = small_config();
  c.dims = {{100, 50}};
  c.deltas = {0.0, 5.0};
  // p (Delta1 + Delta2) at t = 1 is about 22, well above c_alpha (about 11 here).
  const auto curve = run_experiment(c);
  EXPECT_LT(curve.rows[0].rate, 0.3);
  EXPECT_GT(curve.rows[1].rate, 0.9);
}

TEST(Harness, CriticalValueCache) {
  const auto dir = std::filesystem::temp_directory_path() / "seqspec_cache_test";
  std::filesystem::remove_all(dir);
  const Dimensions d(50, 20);
  const auto a = critical_value(StatisticId::u, d, 0.2, 0.05, 2000, 3, 1, dir);
  ASSERT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}), 1);
  const auto b = critical_value(StatisticId::u, d, 0.2, 0.05, 2000, 3, 1, dir);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto c = critical_value(StatisticId::u, d, 0.2, 0.05, 2000, 3, 1);
  EXPECT_EQ(a.value, c.value);
  critical_value(StatisticId::u, d, 0.2, 0.10, 2000, 3, 1, dir);
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}), 2);
  std::filesystem::remove_all(dir);
}

TEST(Harness, ConfigValidation) {
  auto c = small_config();
  c.deltas = {0.5, 1.0};
  EXPECT_THROW(run_experiment(c), DomainError);
  c = small_config();
  c.replications = 0;
  EXPECT_THROW(run_experiment(c), DomainError);
  c = small_config();
  c.dims.clear();
  EXPECT_THROW(run_experiment(c), DomainError);
}

TEST(Harness, AlternativeNames) {
  for (auto a : {Alternative::diag_shift, Alternative::diag_shift_offdiag, Alternative::scaled_identity,
                 Alternative::scaled_tridiag})
    EXPECT_EQ(alternative_from_string(to_string(a)), a);
  EXPECT_THROW(alternative_from_string("nope"), DomainError);
  EXPECT_EQ(alternative_covariance(Alternative::scaled_identity, 0.3, 4).kind, CovarianceKind::scaled_identity_eps);
}
