#include <gtest/gtest.h>

#include <cmath>

#include "seqspec/mp.hpp"

using namespace seqspec;

namespace {

// Root of z t s^2 + (z + t - y) s + 1 = 0 in the upper half-plane.
cplx quadratic_root(cplx z, double t, double y) {
  const cplx b = z + t - y;
  const cplx disc = std::sqrt(b * b - 4.0 * z * t);
  const cplx r1 = (-b + disc) / (2.0 * z * t);
  const cplx r2 = (-b - disc) / (2.0 * z * t);
  return r1.imag() > 0 ? r1 : r2;
}

}  // namespace

TEST(SpectralMeasure, Validation) {
  EXPECT_THROW(SpectralMeasure({}), DomainError);
  EXPECT_THROW(SpectralMeasure({{1.0, 0.5}}), DomainError);
  EXPECT_THROW(SpectralMeasure({{-1.0, 1.0}}), DomainError);
  const SpectralMeasure h({{3.0, 0.25}, {1.0, 0.75}});
  EXPECT_EQ(h.lambda_min(), 1.0);
  EXPECT_EQ(h.lambda_max(), 3.0);
}

TEST(CompanionStieltjes, MatchesQuadraticOnGrid) {
  const auto h = SpectralMeasure::identity();
  for (double t : {0.3, 0.7, 1.0})
    for (double y : {0.2, 0.5, 1.5})
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
          const cplx z(0.1 + 3.9 * i / 19.0, 0.1 + 1.9 * j / 19.0);
          const auto v = companion_stieltjes(z, t, y, h);
          EXPECT_LT(v.residual, 1e-10);
          EXPECT_LT(std::abs(v.s - quadratic_root(z, t, y)), 1e-10) << z << " t=" << t << " y=" << y;
        }
}

TEST(CompanionStieltjes, LargeZBehavesLikeMinusOneOverZ) {
  const cplx z(0.0, 1e6);
  const auto v = companion_stieltjes(z, 1.0, 0.5, SpectralMeasure::identity());
  EXPECT_LT(std::abs(v.s * z + 1.0), 1e-5);
}

TEST(CompanionStieltjes, ConjugateSymmetry) {
  const SpectralMeasure h({{0.5, 0.3}, {2.0, 0.7}});
  const cplx z(1.3, 0.4);
  const auto up = companion_stieltjes(z, 0.8, 0.6, h);
  const auto down = companion_stieltjes(std::conj(z), 0.8, 0.6, h);
  EXPECT_LT(std::abs(down.s - std::conj(up.s)), 1e-12);
  EXPECT_LT(down.s.imag(), 0.0);
}

TEST(CompanionStieltjes, ScaledAtomOracle) {
  // For H = delta_sigma, s~_H(z) = s~_{delta_1}(z / sigma) / sigma.
  const double sigma = 2.5;
  const SpectralMeasure h({{sigma, 1.0}});
  for (cplx z : {cplx(0.5, 0.1), cplx(3.0, 0.05), cplx(8.0, 1.0)}) {
    const auto v = companion_stieltjes(z, 0.6, 0.4, h);
    EXPECT_LT(std::abs(v.s - quadratic_root(z / sigma, 0.6, 0.4) / sigma), 1e-10);
  }
}

TEST(CompanionStieltjes, TwoAtomHerglotzAndResidual) {
  const SpectralMeasure h({{1.0, 0.5}, {4.0, 0.5}});
  for (double re = -1.0; re <= 12.0; re += 0.5)
    for (double im : {1e-3, 0.05, 1.0}) {
      const auto v = companion_stieltjes(cplx(re, im), 0.9, 0.3, h);
      EXPECT_GT(v.s.imag(), 0.0);
      EXPECT_LT(v.residual, 1e-10);
    }
}

TEST(CompanionStieltjes, RealZIsRejected) {
  EXPECT_THROW(companion_stieltjes(cplx(1.0, 0.0), 1.0, 0.5, SpectralMeasure::identity()), DomainError);
}

TEST(CompanionStieltjesDerivative, MatchesCentralDifferences) {
  const SpectralMeasure h({{1.0, 0.6}, {2.0, 0.4}});
  const double t = 0.7, y = 0.35, step = 1e-5;
  for (cplx z : {cplx(0.4, 0.3), cplx(2.0, 0.5), cplx(5.0, 1.5)}) {
    const auto v = companion_stieltjes(z, t, y, h);
    const cplx d = companion_stieltjes_derivative(z, t, y, h, v.s);
    const cplx fd = (companion_stieltjes(z + step, t, y, h).s - companion_stieltjes(z - step, t, y, h).s) /
                    (2.0 * step);
    EXPECT_LT(std::abs(d - fd), 1e-6);
  }
}

TEST(SupportInterval, Examples) {
  auto [lo, hi] = support_interval(1.0, 0.25, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(lo, 0.25);
  EXPECT_DOUBLE_EQ(hi, 2.25);
  std::tie(lo, hi) = support_interval(0.2, 0.6, 1.0, 1.0);
  EXPECT_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, (1.0 + std::sqrt(3.0)) * (1.0 + std::sqrt(3.0)));
  std::tie(lo, hi) = support_interval(0.5, 0.125, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(lo, 0.5 * 0.5 * 0.25);
  EXPECT_DOUBLE_EQ(hi, 2.0 * 2.25);
}

TEST(MpCentering, ClosedForms) {
  const Dimensions d(100, 20);
  EXPECT_DOUBLE_EQ(mp_centering(MomentFunction::x, 1.0, d), 1.0);
  EXPECT_DOUBLE_EQ(mp_centering(MomentFunction::x2, 1.0, d), 1.2);
  EXPECT_NEAR(mp_centering(MomentFunction::log, 1.0, d), -1.0 - 4.0 * std::log(0.8), 1e-14);
  EXPECT_NEAR(mp_centering(MomentFunction::x, 0.5, d), 0.5, 1e-15);
  EXPECT_NEAR(mp_centering(MomentFunction::x4, 1.0, d), 1 + 6 * 0.2 + 6 * 0.04 + 0.008, 1e-14);
  EXPECT_THROW(mp_centering(MomentFunction::log, 0.2, d), DomainError);
}

TEST(MpCentering, AgreesWithDensityIntegration) {
  // int f dF~^{y_k} where F~ is the MP law of B restricted to the first k samples,
  // i.e. the MP(y_k) law rescaled by k/n. Midpoint rule on the density.
  const Dimensions d(200, 60);
  const std::int64_t k = 150;
  const double yk = 60.0 / 150.0, c = 150.0 / 200.0;
  const double a = (1 - std::sqrt(yk)) * (1 - std::sqrt(yk)), b = (1 + std::sqrt(yk)) * (1 + std::sqrt(yk));
  const int m = 200000;
  double i1 = 0, i2 = 0, il = 0;
  for (int i = 0; i < m; ++i) {
    // substitution x = a + (b - a) sin^2(theta) removes the edge singularities
    const double th = (i + 0.5) / m * std::numbers::pi / 2;
    const double x = a + (b - a) * std::sin(th) * std::sin(th);
    const double dx = (b - a) * 2 * std::sin(th) * std::cos(th) * (std::numbers::pi / 2 / m);
    const double dens = std::sqrt((b - x) * (x - a)) / (2 * std::numbers::pi * yk * x);
    i1 += c * x * dens * dx;
    i2 += c * c * x * x * dens * dx;
    il += std::log(c * x) * dens * dx;
  }
  EXPECT_NEAR(mp_centering_at_index(MomentFunction::x, k, d), i1, 1e-8);
  EXPECT_NEAR(mp_centering_at_index(MomentFunction::x2, k, d), i2, 1e-8);
  EXPECT_NEAR(mp_centering_at_index(MomentFunction::log, k, d), il, 1e-8);
}
