#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seqspec/error.hpp"
#include "seqspec/model.hpp"
#include "seqspec/mp.hpp"

namespace seqspec {

/// Limiting Gaussian process on [t0, 1]: mean m(t), kernel c(t1, t2).
struct LimitLaw {
  std::string name;
  std::function<double(double)> mean;
  std::function<double(double, double)> cov;
  SymmetryClass symmetry = SymmetryClass::real;
  TimeGrid domain;

  Eigen::VectorXd mean_vector(const TimeGrid& grid) const {
    Eigen::VectorXd m(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) m(static_cast<Eigen::Index>(i)) = mean(grid.time(i));
    return m;
  }

  Eigen::MatrixXd gram(const TimeGrid& grid) const {
    const auto m = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double c = cov(grid.time(static_cast<std::size_t>(i)), grid.time(static_cast<std::size_t>(j)));
        g(i, j) = c;
        g(j, i) = c;
      }
    return g;
  }
};

/// Test function f for linear spectral statistics. Functions are assumed
/// real on the real axis, so conj(f(z)) = f(conj z).
struct SpectralFunction {
  std::string name;
  std::function<cplx(cplx)> f;
  /// Branch cut on (-inf, 0]: contours must keep 0 outside.
  bool branch_at_origin = false;

  static SpectralFunction identity() { return {"x", [](cplx z) { return z; }, false}; }
  static SpectralFunction square() { return {"x2", [](cplx z) { return z * z; }, false}; }
  static SpectralFunction fourth() {
    return {"x4", [](cplx z) { return (z * z) * (z * z); }, false};
  }
  static SpectralFunction log() { return {"log", [](cplx z) { return std::log(z); }, true}; }

  static SpectralFunction from_name(std::string_view name) {
    if (name == "x") return identity();
    if (name == "x2") return square();
    if (name == "x4") return fourth();
    if (name == "log") return log();
    throw DomainError("unknown spectral function '" + std::string(name) + "' (x, x2, x4, log)");
  }
};

/// Axis-parallel rectangle [x_l, x_r] x [-v0, v0].
struct Rectangle {
  double x_l = 0.0;
  double x_r = 0.0;
  double v0 = 1.0;
};

struct ContourConfig {
  enum class Route { rectangle, circle };
  Route route = Route::rectangle;
  /// Gauss-Legendre nodes per edge (rectangle) or minimum trapezoid nodes per circle.
  int nodes = 256;
  double r1 = 1.05;
  double r2 = 1.10;
  /// Inner rectangle override; the default is built from the support interval.
  std::optional<Rectangle> rect;

  static ContourConfig rectangle(int nodes = 256) {
    ContourConfig c;
    c.route = Route::rectangle;
    c.nodes = nodes;
    return c;
  }
  static ContourConfig circle(int nodes = 2048, double r1 = 1.05, double r2 = 1.10) {
    ContourConfig c;
    c.route = Route::circle;
    c.nodes = nodes;
    c.r1 = r1;
    c.r2 = r2;
    return c;
  }
};

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre needs at least one node");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = r;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (r * p1 - p0) / (r * r - 1.0);
      const double step = p1 / dp;
      r -= step;
      if (std::abs(step) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = r;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (r * p1 - p0) / (r * r - 1.0);
    }
    const double wi = 2.0 / ((1.0 - r * r) * dp * dp);
    x[static_cast<std::size_t>(i)] = -r;
    x[static_cast<std::size_t>(n - 1 - i)] = r;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
  return {x, w};
}

/// Quadrature node on a contour: position and weight including dz.
struct ContourNode {
  cplx z;
  cplx w;
};

/// Positively oriented rectangle. Vertical edges are split at the real
/// axis so no node lands on it.
inline std::vector<ContourNode> rectangle_nodes(const Rectangle& r, int per_edge) {
  const auto [gx, gw] = gauss_legendre(per_edge);
  const cplx corners[] = {
      {r.x_r, -r.v0}, {r.x_r, 0.0}, {r.x_r, r.v0}, {r.x_l, r.v0}, {r.x_l, 0.0}, {r.x_l, -r.v0},
  };
  std::vector<ContourNode> out;
  out.reserve(6 * static_cast<std::size_t>(per_edge));
  for (int e = 0; e < 6; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 6];
    const cplx half = 0.5 * (b - a);
    const cplx mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < gx.size(); ++i) out.push_back({mid + half * gx[i], half * gw[i]});
  }
  return out;
}

/// Support bounds shared by the contour routes for times t in a set.
inline std::pair<double, double> support_for_times(std::initializer_list<double> times, double y,
                                                   const SpectralMeasure& h) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double t : times) {
    const double yt = y / t;
    const double r = std::sqrt(yt);
    const double l = yt < 1.0 ? h.lambda_min() * t * (1.0 - r) * (1.0 - r) : 0.0;
    lo = std::min(lo, l);
    hi = std::max(hi, h.lambda_max() * (1.0 + r) * (1.0 + r));
  }
  return {lo, hi};
}

inline Rectangle default_rectangle(double lo, double hi, bool branch_at_origin) {
  if (branch_at_origin && !(lo > 0.0))
    throw DomainError("log needs y/t < 1 and lambda_min > 0 so the contour can exclude 0");
  const double width = hi - lo;
  Rectangle r;
  r.x_l = lo - std::max(0.1, 0.25 * width);
  r.x_r = hi + 0.25 * width;
  r.v0 = 1.0;
  if (branch_at_origin) r.x_l = std::max(r.x_l, lo / 2.0);
  return r;
}

/// Second rectangle strictly enclosing the first.
inline Rectangle outer_rectangle(const Rectangle& inner, double lo, double hi, bool branch_at_origin) {
  const double width = hi - lo;
  Rectangle r;
  r.x_l = branch_at_origin ? inner.x_l / 2.0 : inner.x_l - std::max(0.1, 0.25 * width);
  r.x_r = inner.x_r + 0.25 * width;
  r.v0 = 2.0 * inner.v0;
  return r;
}

inline void check_rectangle(const Rectangle& r, double lo, double hi, bool branch_at_origin) {
  require(r.v0 > 0.0, "rectangle needs v0 > 0");
  require(r.x_l < lo && r.x_r > hi, "rectangle must enclose the support interval");
  if (branch_at_origin) require(r.x_l > 0.0, "rectangle must exclude 0 for log");
}

/// s~ and s~' on a list of contour points.
struct TransformTable {
  std::vector<cplx> s;
  std::vector<cplx> ds;
};

inline TransformTable transform_table(const std::vector<ContourNode>& nodes, double t, double y,
                                      const SpectralMeasure& h) {
  TransformTable tab;
  tab.s.reserve(nodes.size());
  tab.ds.reserve(nodes.size());
  for (const auto& nd : nodes) {
    const auto v = companion_stieltjes(nd.z, t, y, h);
    tab.s.push_back(v.s);
    tab.ds.push_back(companion_stieltjes_derivative(nd.z, t, y, h, v.s));
  }
  return tab;
}

/// sigma^2 from precomputed transforms.
///   a(z1,z2) = (s2 - s1 + (z1 - z2) s1 s2) / (t2 s2 - t1 s1)
///   sigma^2 = d^2/dz1 dz2 [-log(1 - min(t1,t2) a)]
inline cplx sigma_from_transforms(cplx z1, cplx s1, cplx d1, double t1, cplx z2, cplx s2, cplx d2,
                                  double t2) {
  const double m = std::min(t1, t2);
  const cplx dz = z1 - z2;
  const cplx N = s2 - s1 + dz * s1 * s2;
  const cplx D = t2 * s2 - t1 * s1;
  if (std::abs(D) < 1e-14) throw NumericError("sigma kernel: coincidence point", std::abs(D));
  const cplx N1 = -d1 + s1 * s2 + dz * d1 * s2;
  const cplx N2 = d2 - s1 * s2 + dz * s1 * d2;
  const cplx N12 = s1 * d2 - d1 * s2 + dz * d1 * d2;
  const cplx D1 = -t1 * d1;
  const cplx D2 = t2 * d2;
  const cplx D_2 = D * D;
  const cplx a = N / D;
  const cplx a1_num = N1 * D - N * D1;
  const cplx a1 = a1_num / D_2;
  const cplx a2 = (N2 * D - N * D2) / D_2;
  const cplx a12 = (N12 * D + N1 * D2 - N2 * D1) / D_2 - 2.0 * a1_num * D2 / (D_2 * D);
  const cplx q = 1.0 - m * a;
  if (std::abs(q) < 1e-14) throw NumericError("sigma kernel: singular denominator", std::abs(q));
  return m * a12 / q + m * m * a1 * a2 / (q * q);
}

inline double class_factor(SymmetryClass c) { return c == SymmetryClass::real ? 1.0 : 0.5; }

inline void check_imag(cplx v, const char* what) {
  if (std::abs(v.imag()) >= 1e-6 * std::max(1.0, std::abs(v.real())))
    throw NumericError(std::string(what) + ": imaginary defect too large, contour too tight",
                       std::abs(v.imag()));
}

}  // namespace detail

/// sigma^2_{t1,t2}(z1, z2), the mixed second derivative in (z1, z2) of
/// -log(1 - min(t1,t2) a(z1, z2)), with s~ and s~' from the fixed-point solver.
inline cplx sigma_kernel(cplx z1, cplx z2, double t1, double t2, double y, const SpectralMeasure& h) {
  const auto v1 = companion_stieltjes(z1, t1, y, h);
  const auto v2 = companion_stieltjes(z2, t2, y, h);
  const cplx d1 = companion_stieltjes_derivative(z1, t1, y, h, v1.s);
  const cplx d2 = companion_stieltjes_derivative(z2, t2, y, h, v2.s);
  return detail::sigma_from_transforms(z1, v1.s, d1, t1, z2, v2.s, d2, t2);
}

/// Limiting mean of X(f, t) for the real class:
/// -(1/2 pi i) oint f(z) t y int s~^3 l^2/(t s~ l + 1)^3 dH / (1 - t y int s~^2 l^2/(t s~ l + 1)^2 dH)^2 dz.
inline double lss_mean_general(const SpectralFunction& f, double t, double y, const SpectralMeasure& h,
                               const ContourConfig& cfg = ContourConfig::rectangle()) {
  detail::require(t > 0.0 && t <= 1.0, "t must lie in (0, 1]");
  detail::require(y > 0.0, "y must be positive");
  const auto [lo, hi] = detail::support_for_times({t}, y, h);
  Rectangle rect = cfg.rect ? *cfg.rect : detail::default_rectangle(lo, hi, f.branch_at_origin);
  detail::check_rectangle(rect, lo, hi, f.branch_at_origin);
  const auto nodes = detail::rectangle_nodes(rect, cfg.nodes);
  cplx acc = 0.0;
  for (const auto& nd : nodes) {
    const cplx s = companion_stieltjes(nd.z, t, y, h).s;
    const cplx num = t * y * s * s * s * h.moment(2, 3, t, s);
    const cplx den = 1.0 - t * y * s * s * h.moment(2, 2, t, s);
    acc += f.f(nd.z) * num / (den * den) * nd.w;
  }
  const cplx v = -acc / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
  detail::check_imag(v, "lss_mean_general");
  return v.real();
}

/// Limiting cov(X(f1, t1), X(f2, t2)):
/// (1/2 pi^2) oint oint f1(z1) conj(f2(z2)) sigma^2(z1, conj z2) dz1 conj(dz2),
/// halved for the complex class. Inner contour carries f1, outer carries f2.
inline double lss_cov_general(const SpectralFunction& f1, const SpectralFunction& f2, double t1,
                              double t2, double y, const SpectralMeasure& h,
                              SymmetryClass cls = SymmetryClass::real,
                              const ContourConfig& cfg = ContourConfig::rectangle()) {
  detail::require(t1 > 0.0 && t1 <= 1.0 && t2 > 0.0 && t2 <= 1.0, "times must lie in (0, 1]");
  detail::require(y > 0.0, "y must be positive");
  const bool branch = f1.branch_at_origin || f2.branch_at_origin;
  const auto [lo, hi] = detail::support_for_times({t1, t2}, y, h);
  Rectangle inner = cfg.rect ? *cfg.rect : detail::default_rectangle(lo, hi, branch);
  detail::check_rectangle(inner, lo, hi, branch);
  const Rectangle outer = detail::outer_rectangle(inner, lo, hi, branch);

  const auto n1 = detail::rectangle_nodes(inner, cfg.nodes);
  const auto n2 = detail::rectangle_nodes(outer, cfg.nodes);
  const auto tab1 = detail::transform_table(n1, t1, y, h);
  const auto tab2 = detail::transform_table(n2, t2, y, h);

  std::vector<cplx> g1(n1.size()), g2(n2.size()), z2c(n2.size()), s2c(n2.size()), d2c(n2.size());
  for (std::size_t i = 0; i < n1.size(); ++i) g1[i] = f1.f(n1[i].z) * n1[i].w;
  for (std::size_t j = 0; j < n2.size(); ++j) {
    g2[j] = std::conj(f2.f(n2[j].z) * n2[j].w);
    z2c[j] = std::conj(n2[j].z);
    s2c[j] = std::conj(tab2.s[j]);
    d2c[j] = std::conj(tab2.ds[j]);
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n1.size(); ++i) {
    cplx row = 0.0;
    for (std::size_t j = 0; j < n2.size(); ++j)
      row += g2[j] * detail::sigma_from_transforms(n1[i].z, tab1.s[i], tab1.ds[i], t1, z2c[j], s2c[j],
                                                   d2c[j], t2);
    acc += g1[i] * row;
  }
  const cplx v = acc / (2.0 * std::numbers::pi * std::numbers::pi) * detail::class_factor(cls);
  detail::check_imag(v, "lss_cov_general");
  return v.real();
}

namespace detail {

/// Unit-circle parametrization z = t(1 + h r xi + h/(r xi) + h^2), h = sqrt(y/t),
/// on which the T = I companion transform is s~ = -1/(t(1 + h r xi)).
struct CircleNodes {
  std::vector<cplx> z, s, ds, dz;  // dz = dz/dxi * dxi
};

inline CircleNodes circle_nodes(double t, double y, double r, int m) {
  const double h = std::sqrt(y / t);
  CircleNodes c;
  c.z.resize(static_cast<std::size_t>(m));
  c.s.resize(c.z.size());
  c.ds.resize(c.z.size());
  c.dz.resize(c.z.size());
  const cplx i2pi_m(0.0, 2.0 * std::numbers::pi / m);
  for (int k = 0; k < m; ++k) {
    const cplx xi = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
    const cplx u = 1.0 + h * r * xi;
    const cplx dzdxi = t * h * (r - 1.0 / (r * xi * xi));
    const cplx dsdxi = h * r / (t * u * u);
    const auto ks = static_cast<std::size_t>(k);
    c.z[ks] = t * (1.0 + h * r * xi + h / (r * xi) + h * h);
    c.s[ks] = -1.0 / (t * u);
    c.ds[ks] = dsdxi / dzdxi;
    c.dz[ks] = dzdxi * xi * i2pi_m;
  }
  return c;
}

/// Trapezoid node count so that aliasing from a singularity at distance
/// ratio rho from the circle is below e^-36.
inline int circle_node_count(int minimum, double log_ratio) {
  require(log_ratio > 0.0, "circle contour touches a singularity");
  const double need = 36.0 / log_ratio;
  int m = std::max(minimum, 64);
  if (need > m) m = static_cast<int>(std::ceil(need / 64.0)) * 64;
  return m;
}

inline double log_radius_cap(double h) { return 1.0 + 0.5 * (1.0 / h - 1.0); }

inline double circle_mean_at(const SpectralFunction& f, double t, double y, double r, int min_nodes) {
  const double h = std::sqrt(y / t);
  double lr = std::log(r);
  if (f.branch_at_origin) lr = std::min(lr, -std::log(h * r));
  const int m = circle_node_count(min_nodes, lr);
  const double rinv2 = 1.0 / (r * r);
  cplx acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const cplx xi = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
    const cplx z = t * (1.0 + h * r * xi + h / (r * xi) + h * h);
    acc += f.f(z) * (xi * xi / (xi * xi - rinv2) - 1.0);
  }
  return (acc / static_cast<double>(m)).real();
}

inline double circle_cov_at(const SpectralFunction& f1, const SpectralFunction& f2, double t1, double t2,
                            double y, double ra, double rb, int min_nodes) {
  const double h1 = std::sqrt(y / t1);
  const double h2 = std::sqrt(y / t2);
  double lr = std::min(std::log(ra), std::log(rb / ra));
  if (f1.branch_at_origin) lr = std::min(lr, -std::log(h1 * ra));
  if (f2.branch_at_origin) lr = std::min(lr, -std::log(h2 * rb));
  const int m = circle_node_count(min_nodes, lr);
  const auto c1 = circle_nodes(t1, y, ra, m);
  const auto c2 = circle_nodes(t2, y, rb, m);
  std::vector<cplx> g2(c2.z.size());
  for (std::size_t j = 0; j < g2.size(); ++j) g2[j] = f2.f(c2.z[j]) * c2.dz[j];
  cplx acc = 0.0;
  for (std::size_t i = 0; i < c1.z.size(); ++i) {
    cplx row = 0.0;
    for (std::size_t j = 0; j < c2.z.size(); ++j)
      row += g2[j] * sigma_from_transforms(c1.z[i], c1.s[i], c1.ds[i], t1, c2.z[j], c2.s[j], c2.ds[j], t2);
    acc += f1.f(c1.z[i]) * c1.dz[i] * row;
  }
  return (-acc / (2.0 * std::numbers::pi * std::numbers::pi)).real();
}

inline double richardson(double full, double half) {
  if (std::abs(full - half) >= 1e-3)
    throw NumericError("circle route: radius extrapolation disagreement", std::abs(full - half));
  return 2.0 * half - full;
}

}  // namespace detail

/// Limiting mean of X(f, t) for T = I through the unit-circle substitution,
/// evaluated at radii r and 1 + (r - 1)/2 and extrapolated toward r = 1.
inline double circle_mean(const SpectralFunction& f, double t, double y,
                          const ContourConfig& cfg = ContourConfig::circle()) {
  detail::require(t > 0.0 && t <= 1.0, "t must lie in (0, 1]");
  detail::require(y > 0.0, "y must be positive");
  detail::require(cfg.r1 > 1.0 && cfg.r2 > cfg.r1, "circle route needs 1 < r1 < r2");
  double r = cfg.r1;
  if (f.branch_at_origin) {
    if (!(y < t)) throw DomainError("log needs y/t < 1");
    r = std::min(r, detail::log_radius_cap(std::sqrt(y / t)));
  }
  const double full = detail::circle_mean_at(f, t, y, r, cfg.nodes);
  const double half = detail::circle_mean_at(f, t, y, 1.0 + (r - 1.0) / 2.0, cfg.nodes);
  return detail::richardson(full, half);
}

/// Limiting cov(X(f1, t1), X(f2, t2)) for T = I on two circles of radii
/// r1 < r2. Arguments are put in the order t2 <= t1 (swapping (f1, t1) with
/// (f2, t2), which leaves the covariance unchanged).
inline double circle_cov(const SpectralFunction& f1, const SpectralFunction& f2, double t1, double t2,
                         double y, SymmetryClass cls = SymmetryClass::real,
                         const ContourConfig& cfg = ContourConfig::circle()) {
  detail::require(t1 > 0.0 && t1 <= 1.0 && t2 > 0.0 && t2 <= 1.0, "times must lie in (0, 1]");
  detail::require(y > 0.0, "y must be positive");
  detail::require(cfg.r1 > 1.0 && cfg.r2 > cfg.r1, "circle route needs 1 < r1 < r2");
  const SpectralFunction* fa = &f1;
  const SpectralFunction* fb = &f2;
  if (t2 > t1) {
    std::swap(t1, t2);
    std::swap(fa, fb);
  }
  double ra = cfg.r1, rb = cfg.r2;
  if (fa->branch_at_origin || fb->branch_at_origin) {
    if (!(y < t2)) throw DomainError("log needs y/t < 1");
    const double cap = detail::log_radius_cap(std::sqrt(y / t2));
    rb = std::min(rb, cap);
    ra = std::min(ra, 1.0 + (rb - 1.0) / 2.0);
  }
  const double full = detail::circle_cov_at(*fa, *fb, t1, t2, y, ra, rb, cfg.nodes);
  const double half =
      detail::circle_cov_at(*fa, *fb, t1, t2, y, 1.0 + (ra - 1.0) / 2.0, 1.0 + (rb - 1.0) / 2.0, cfg.nodes);
  return detail::richardson(full, half) * detail::class_factor(cls);
}

/// U_t: mean y/t, kernel 4 (y / max(t1, t2))^2.
inline LimitLaw law_u(const Dimensions& dims, const TimeGrid& grid) {
  const double y = dims.ratio();
  return {"u", [y](double t) { return y / t; },
          [y](double t1, double t2) {
            const double r = y / std::max(t1, t2);
            return 4.0 * r * r;
          },
          SymmetryClass::real, grid};
}

/// U_t^(2), fourth-moment sphericity statistic.
inline LimitLaw law_u2(const Dimensions& dims, const TimeGrid& grid) {
  const double y = dims.ratio();
  auto mean = [y](double t) {
    return y * (4.0 * t * t + 7.0 * t * y + 4.0 * y * y) / (t * (t + y) * (t + y));
  };
  auto cov = [y](double ta, double tb) {
    const double a = std::max(ta, tb);  // printed t1
    const double b = std::min(ta, tb);  // printed t2
    const double y2 = y * y;
    const double brace = 4.0 * a * a * (2.0 * b * b + 3.0 * b * y + 2.0 * y2) +
                         6.0 * a * y * (4.0 * b * b + 5.0 * b * y + 2.0 * y2) +
                         y2 * (21.0 * b * b + 24.0 * b * y + 8.0 * y2);
    const double den = a * a * (a + y) * (a + y) * (b + y) * (b + y);
    return 8.0 * y2 * brace / den;
  };
  return {"u2", mean, cov, SymmetryClass::real, grid};
}

/// D(t), the centered log-determinant process. Needs y < t0.
inline LimitLaw law_logdet(const Dimensions& dims, const TimeGrid& grid,
                           SymmetryClass cls = SymmetryClass::real) {
  const double y = dims.ratio();
  if (!(y < grid.t0())) throw DomainError("log-det law requires p/n < t0");
  const double factor = cls == SymmetryClass::real ? 2.0 : 1.0;
  const bool real = cls == SymmetryClass::real;
  return {"logdet", [y, real](double t) { return real ? 0.5 * std::log1p(-y / t) : 0.0; },
          [y, factor](double t1, double t2) { return -factor * std::log1p(-y / std::max(t1, t2)); },
          cls, grid};
}

/// Joint limit of (X(x, t), X(x^2, t)) for T = I.
struct TracePairLaw {
  double y;
  TimeGrid domain;

  double mean_x(double) const { return 0.0; }
  double mean_x2(double t) const { return t * y; }
  double cov_x_x(double t1, double t2) const { return 2.0 * y * std::min(t1, t2); }
  double cov_x2_x2(double t1, double t2) const {
    const double m = std::min(t1, t2);
    return 4.0 * m * y * (2.0 * t1 * t2 + (m + 2.0 * (t1 + t2)) * y + 2.0 * y * y);
  }
  /// cov(X(x, t_x), X(x^2, t_x2)); the (t + y) factor follows the x^2 time.
  double cov_x_x2(double t_x, double t_x2) const {
    return 4.0 * std::min(t_x, t_x2) * y * (t_x2 + y);
  }
};

inline TracePairLaw law_trace_pair(const Dimensions& dims, const TimeGrid& grid) {
  return {dims.ratio(), grid};
}

}  // namespace seqspec
