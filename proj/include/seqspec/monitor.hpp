#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "seqspec/datagen.hpp"
#include "seqspec/error.hpp"
#include "seqspec/model.hpp"
#include "seqspec/seqcov.hpp"

namespace seqspec {

enum class StatisticId { u, u2, logdet };

inline std::string_view to_string(StatisticId s) {
  switch (s) {
    case StatisticId::u: return "u";
    case StatisticId::u2: return "u2";
    case StatisticId::logdet: return "logdet";
  }
  return "?";
}

inline StatisticId statistic_from_string(std::string_view s) {
  if (s == "u") return StatisticId::u;
  if (s == "u2") return StatisticId::u2;
  if (s == "logdet") return StatisticId::logdet;
  throw DomainError("unknown statistic '" + std::string(s) + "' (u, u2, logdet)");
}

struct ProcessTrajectory {
  TimeGrid grid;
  std::vector<double> values;
  StatisticId statistic = StatisticId::u;
};

struct TestReport {
  StatisticId statistic = StatisticId::u;
  double sup_value = 0.0;
  double critical_value = 0.0;
  double alpha = 0.0;
  bool reject = false;
  /// Earliest grid time attaining the supremum. A heuristic change-time
  /// indicator only.
  double argmax_time = 0.0;
  ProcessTrajectory trajectory;
};

/// p (U_{n,t} - 1 - y_k), U = (tr B^2 / p) / (tr B / p)^2, y_k = p / k.
inline double u_value(const CovSnapshot& snap, std::int64_t p) {
  if (!(snap.tr_b > 0.0)) throw DomainError("degenerate data: zero trace of the sample covariance");
  const double pd = static_cast<double>(p);
  const double m1 = snap.tr_b / pd;
  const double u = (snap.tr_b2 / pd) / (m1 * m1);
  return pd * (u - 1.0 - pd / static_cast<double>(snap.count));
}

/// p (U2 - (1 + 6y + 6y^2 + y^3) / (1 + y)^2), U2 = (tr B^4 / p) / (tr B^2 / p)^2.
inline double u2_value(const CovSnapshot& snap, std::int64_t p) {
  if (!(snap.tr_b2 > 0.0)) throw DomainError("degenerate data: zero trace of the squared sample covariance");
  const double pd = static_cast<double>(p);
  const double y = pd / static_cast<double>(snap.count);
  const double m2 = snap.tr_b2 / pd;
  const double u2 = (snap.tr_b4 / pd) / (m2 * m2);
  const double center = (1.0 + 6.0 * y + 6.0 * y * y + y * y * y) / ((1.0 + y) * (1.0 + y));
  return pd * (u2 - center);
}

/// log|B| + p + k log(1 - p/k) - p log(k/n - p/n).
inline double logdet_value(const CovSnapshot& snap, const Dimensions& dims) {
  const auto k = snap.count;
  if (!(dims.p < k)) throw DomainError("log-det statistic requires p < floor(n t)");
  if (!snap.logdet_b) throw DomainError("degenerate data: sample covariance is singular");
  const double pd = static_cast<double>(dims.p);
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(dims.n);
  return *snap.logdet_b + pd + kd * std::log1p(-pd / kd) - pd * std::log((kd - pd) / nd);
}

inline double statistic_value(StatisticId id, const CovSnapshot& snap, const Dimensions& dims) {
  switch (id) {
    case StatisticId::u: return u_value(snap, dims.p);
    case StatisticId::u2: return u2_value(snap, dims.p);
    case StatisticId::logdet: return logdet_value(snap, dims);
  }
  return 0.0;
}

inline Tracking tracking_for(StatisticId id) {
  switch (id) {
    case StatisticId::u: return Tracking::traces_only();
    case StatisticId::u2: return {true, false};
    case StatisticId::logdet: return {false, true};
  }
  return Tracking::all();
}

namespace detail {

inline void check_batch(const ObservationBatch& batch, const Dimensions& dims, const TimeGrid& grid) {
  require(batch.p() == dims.p && batch.n() == dims.n, "batch shape does not match (n, p)");
  require(grid.n() == dims.n, "time grid was built for a different n");
}

}  // namespace detail

/// Statistic trajectory over the grid in one streaming pass.
inline ProcessTrajectory trajectory(StatisticId id, const ObservationBatch& batch, const Dimensions& dims,
                                    const TimeGrid& grid) {
  detail::check_batch(batch, dims, grid);
  if (id == StatisticId::logdet && !(dims.ratio() < grid.t0()))
    throw DomainError("log-det test requires p < n t0");
  SeqCovState state(dims.p, tracking_for(id));
  ProcessTrajectory out{grid, {}, id};
  out.values.reserve(grid.size());
  std::size_t next = 0;
  for (Eigen::Index i = 0; i < dims.n && next < grid.size(); ++i) {
    state.push(batch.data.col(i));
    if (state.count() == grid.index(next)) {
      out.values.push_back(statistic_value(id, state.snapshot(dims), dims));
      ++next;
    }
  }
  return out;
}

inline ProcessTrajectory u_trajectory(const ObservationBatch& batch, const Dimensions& dims,
                                      const TimeGrid& grid) {
  return trajectory(StatisticId::u, batch, dims, grid);
}
inline ProcessTrajectory u2_trajectory(const ObservationBatch& batch, const Dimensions& dims,
                                       const TimeGrid& grid) {
  return trajectory(StatisticId::u2, batch, dims, grid);
}
inline ProcessTrajectory logdet_trajectory(const ObservationBatch& batch, const Dimensions& dims,
                                           const TimeGrid& grid) {
  return trajectory(StatisticId::logdet, batch, dims, grid);
}

/// Snapshot of the first k observations from scratch (Gram route, no streaming).
inline CovSnapshot batch_snapshot(const ObservationBatch& batch, const Dimensions& dims, std::int64_t k,
                                  Tracking tracking = Tracking::all()) {
  detail::require(k >= 1 && k <= batch.n(), "batch_snapshot needs 1 <= k <= n");
  const double n = static_cast<double>(dims.n);
  const auto cols = batch.data.leftCols(k);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dims.p, dims.p);
  b.selfadjointView<Eigen::Lower>().rankUpdate(cols, 1.0 / n);
  b = b.selfadjointView<Eigen::Lower>();
  CovSnapshot s;
  s.count = k;
  s.t = static_cast<double>(k) / n;
  s.tr_b = b.trace();
  s.tr_b2 = b.squaredNorm();
  if (tracking.tr4) s.tr_b4 = (b * b).squaredNorm();
  if (tracking.logdet) {
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() == Eigen::Success) {
      const auto diag = llt.matrixLLT().diagonal();
      if (diag.minCoeff() > 0.0) s.logdet_b = 2.0 * diag.array().log().sum();
    }
  }
  return s;
}

/// Statistic at a single time from batch recomputation.
inline double statistic_at(StatisticId id, const ObservationBatch& batch, const Dimensions& dims,
                           std::int64_t k) {
  return statistic_value(id, batch_snapshot(batch, dims, k, tracking_for(id)), dims);
}

/// Rejects when sup_t value > c_alpha. Ties in the argmax go to the earliest time.
inline TestReport run_test(const ProcessTrajectory& traj, double c_alpha, double alpha) {
  detail::require(!traj.values.empty() && traj.values.size() == traj.grid.size(),
                  "trajectory length does not match its grid");
  TestReport r;
  r.statistic = traj.statistic;
  r.critical_value = c_alpha;
  r.alpha = alpha;
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.values.size(); ++i)
    if (traj.values[i] > traj.values[best]) best = i;
  r.sup_value = traj.values[best];
  r.argmax_time = traj.grid.time(best);
  r.reject = r.sup_value > c_alpha;
  r.trajectory = traj;
  return r;
}

/// Limit of U_{n,t} after a change Sigma = sigma^2 I -> post at t_star.
struct AlternativeLimit {
  double limit = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

inline AlternativeLimit predict_alternative_limit(double t, const ChangePointScenario& scn, double y) {
  if (!(t > scn.t_star)) throw DomainError("alternative limit needs t > t_star");
  detail::require(t <= 1.0, "t must lie in (t_star, 1]");
  detail::require(y > 0.0, "y must be positive");
  if (!scn.pre.is_scaled_identity()) throw DomainError("alternative limit needs a spherical pre-change covariance");
  const double sigma2 = scn.pre.diagonal(0);
  const auto [g, h] = sphericity_limits(scn.post);
  const double ts = scn.t_star;
  const double dt = t - ts;
  const double den = ts * ts * sigma2 * sigma2 + dt * g * dt * g + 2.0 * ts * sigma2 * dt * g;
  AlternativeLimit out;
  out.delta1 = dt * dt * (h - g * g) / den;
  out.delta2 = (y / t) * ts * dt * (sigma2 - g) * (sigma2 - g) / den;
  out.limit = 1.0 + y / t + out.delta1 + out.delta2;
  return out;
}

}  // namespace seqspec
