#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "seqspec/error.hpp"
#include "seqspec/model.hpp"

namespace seqspec {

using cplx = std::complex<double>;

/// Finite discrete population spectral distribution H = sum_j w_j delta_{lambda_j}.
class SpectralMeasure {
 public:
  struct Atom {
    double lambda;
    double weight;
  };

  /// H = delta_1, the spectrum of T = I.
  static SpectralMeasure identity() { return SpectralMeasure({{1.0, 1.0}}); }

  explicit SpectralMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    detail::require(!atoms_.empty(), "spectral measure needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms_) {
      detail::require(std::isfinite(a.lambda) && a.lambda >= 0.0, "atoms must be finite and >= 0");
      detail::require(std::isfinite(a.weight) && a.weight > 0.0, "atom weights must be positive");
      total += a.weight;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "atom weights must sum to 1");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.lambda < b.lambda; });
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  double lambda_min() const { return atoms_.front().lambda; }
  double lambda_max() const { return atoms_.back().lambda; }

  /// sum_j w_j lambda_j^k / (1 + lambda_j t s)^m
  cplx moment(int k, int m, double t, cplx s) const {
    cplx acc = 0.0;
    for (const auto& a : atoms_) {
      const cplx den = 1.0 + a.lambda * t * s;
      acc += a.weight * std::pow(a.lambda, k) / std::pow(den, m);
    }
    return acc;
  }

 private:
  std::vector<Atom> atoms_;
};

/// Companion Stieltjes transform value s~_t(z) with its equation defect.
/// The p x p transform of the generalized MP law is recovered from it through
/// s~ = -(1 - y_t)/z + y_t s.
struct StieltjesValue {
  cplx z;
  cplx s;
  double residual = 0.0;
};

namespace detail {

/// Defect of z = -1/s + y sum_j w_j lambda_j / (1 + lambda_j t s),
/// measured relative to max(1, |z|).
inline double stieltjes_residual(cplx z, double t, double y, const SpectralMeasure& h, cplx s) {
  const cplx defect = z + 1.0 / s - y * h.moment(1, 1, t, s);
  return std::abs(defect) / std::max(1.0, std::abs(z));
}

inline bool newton_polish(cplx z, double t, double y, const SpectralMeasure& h, cplx& s,
                          int max_steps) {
  for (int k = 0; k < max_steps; ++k) {
    const cplx g = z + 1.0 / s - y * h.moment(1, 1, t, s);
    const cplx dg = -1.0 / (s * s) + y * t * h.moment(2, 2, t, s);
    if (std::abs(dg) < 1e-300) return false;
    const cplx step = g / dg;
    s -= step;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    if (std::abs(step) <= 1e-15 * std::abs(s)) return true;
  }
  return true;
}

/// Upper half-plane solve. The map F(s) = 1 / (y sum w lambda/(1+lambda t s) - z)
/// sends C+ into C+, so damped iteration from -1/z stays on the Herglotz branch.
inline StieltjesValue solve_upper(cplx z, double t, double y, const SpectralMeasure& h) {
  constexpr double kMix = 0.5;
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 10000;
  cplx s = -1.0 / z;
  bool converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    const cplx f = 1.0 / (y * h.moment(1, 1, t, s) - z);
    const cplx next = kMix * f + (1.0 - kMix) * s;
    const double change = std::abs(next - s);
    s = next;
    if (change <= kTol * std::abs(s)) {
      converged = true;
      break;
    }
  }
  cplx polished = s;
  const bool ok = newton_polish(z, t, y, h, polished, 50);
  if (ok && polished.imag() > 0.0 &&
      stieltjes_residual(z, t, y, h, polished) <= stieltjes_residual(z, t, y, h, s))
    s = polished;

  double res = stieltjes_residual(z, t, y, h, s);
  if (res >= 1e-10 || !(s.imag() > 0.0) || !converged) {
    // Continuation in Im z from a well-conditioned point back to z.
    const double target = z.imag();
    double im = std::max(1.0, target);
    cplx sc = -1.0 / cplx(z.real(), im);
    newton_polish(cplx(z.real(), im), t, y, h, sc, 100);
    while (im > target) {
      im = std::max(target, im * 0.5);
      if (!newton_polish(cplx(z.real(), im), t, y, h, sc, 100)) break;
    }
    const double cres = stieltjes_residual(z, t, y, h, sc);
    if (sc.imag() > 0.0 && cres < res) {
      s = sc;
      res = cres;
    }
  }
  if (!(res < 1e-10) || !(s.imag() > 0.0))
    throw NumericError("companion Stieltjes solver did not converge", res);
  return {z, s, res};
}

}  // namespace detail

/// Solves z = -1/s + y int lambda / (1 + lambda t s) dH(lambda) for the
/// companion Stieltjes transform, choosing the root with Im(s) Im(z) > 0.
/// Solutions in the lower half-plane are conjugates of upper ones.
inline StieltjesValue companion_stieltjes(cplx z, double t, double y, const SpectralMeasure& h) {
  detail::require(z.imag() != 0.0, "Stieltjes transform needs Im(z) != 0");
  detail::require(t > 0.0 && y > 0.0, "t and y must be positive");
  if (z.imag() < 0.0) {
    auto v = detail::solve_upper(std::conj(z), t, y, h);
    return {z, std::conj(v.s), v.residual};
  }
  return detail::solve_upper(z, t, y, h);
}

/// ds~/dz by implicit differentiation:
/// s~' = 1 / (1/s~^2 - y t int lambda^2 / (1 + lambda t s~)^2 dH).
inline cplx companion_stieltjes_derivative(cplx z, double t, double y, const SpectralMeasure& h,
                                           cplx s) {
  (void)z;
  const cplx den = 1.0 / (s * s) - y * t * h.moment(2, 2, t, s);
  if (std::abs(den) < 1e-14) throw NumericError("Stieltjes derivative is singular", std::abs(den));
  return 1.0 / den;
}

/// Interval enclosing the support of every F~^{y_t, H}, t in [t0, 1]:
/// [lambda_min 1(y_t0 < 1) t0 (1 - sqrt(y_t0))^2, lambda_max (1 + sqrt(y_t0))^2].
inline std::pair<double, double> support_interval(double t0, double y, double lambda_min,
                                                  double lambda_max) {
  detail::require(t0 > 0.0 && t0 <= 1.0, "t0 must lie in (0, 1]");
  detail::require(y > 0.0, "y must be positive");
  const double yt = y / t0;
  const double r = std::sqrt(yt);
  const double lower = yt < 1.0 ? lambda_min * t0 * (1.0 - r) * (1.0 - r) : 0.0;
  const double upper = lambda_max * (1.0 + r) * (1.0 + r);
  return {lower, upper};
}

inline std::pair<double, double> support_interval(double t0, double y, const SpectralMeasure& h) {
  return support_interval(t0, y, h.lambda_min(), h.lambda_max());
}

/// Test functions with closed-form MP centerings.
enum class MomentFunction { x, x2, x4, log };

/// int f dF~^{y_k, delta_1} with k = floor(n t), y_k = p/k: the deterministic
/// centering of the linear spectral statistic (1/p) tr f(B_{n,t}).
inline double mp_centering_at_index(MomentFunction f, std::int64_t k, const Dimensions& dims) {
  const double yk = aspect_ratio_at_index(k, dims);
  const double frac = static_cast<double>(k) / static_cast<double>(dims.n);
  switch (f) {
    case MomentFunction::x: return frac;
    case MomentFunction::x2: return frac * (frac + dims.ratio());
    case MomentFunction::x4: {
      const double f2 = frac * frac;
      return f2 * f2 * (1.0 + 6.0 * yk + 6.0 * yk * yk + yk * yk * yk);
    }
    case MomentFunction::log:
      if (!(yk < 1.0)) throw DomainError("log centering needs p < floor(n t)");
      return -1.0 - std::log1p(-yk) / yk + std::log(frac - dims.ratio());
  }
  return 0.0;
}

inline double mp_centering(MomentFunction f, double t, const Dimensions& dims) {
  return mp_centering_at_index(f, floor_index(t, dims.n), dims);
}

}  // namespace seqspec
