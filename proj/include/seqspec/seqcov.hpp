#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>

#include "seqspec/error.hpp"
#include "seqspec/model.hpp"

namespace seqspec {

/// Which optional quantities a SeqCovState maintains. tr(S) and tr(S^2) are
/// always tracked; tr(S^4) costs one extra mat-vec per push, the Cholesky
/// factor one rank-1 update.
struct Tracking {
  bool tr4 = true;
  bool logdet = true;

  static Tracking all() { return {true, true}; }
  static Tracking traces_only() { return {false, false}; }
};

/// tr(B^k) and log|B| for B = S / n at t = count / n.
struct CovSnapshot {
  std::int64_t count = 0;
  double t = 0.0;
  double tr_b = 0.0;
  double tr_b2 = 0.0;
  double tr_b4 = 0.0;
  std::optional<double> logdet_b;
};

/// Streaming state of S = sum_{i <= count} y_i y_i^T, the unnormalized
/// sequential sample covariance. Each push costs O(p^2).
class SeqCovState {
 public:
  /// Interval (in pushes) between dense recomputations of the trace caches.
  static constexpr std::int64_t kRefreshInterval = 256;

  explicit SeqCovState(std::int64_t p, Tracking tracking = Tracking::all())
      : p_(p), tracking_(tracking), s_(Eigen::MatrixXd::Zero(p, p)), w1_(p), w2_(p) {
    detail::require(p >= 1, "dimension p must be >= 1");
  }

  std::int64_t p() const { return p_; }
  std::int64_t count() const { return count_; }
  const Tracking& tracking() const { return tracking_; }
  double tr1() const { return tr1_; }
  double tr2() const { return tr2_; }
  double tr4() const { return tr4_; }
  bool has_cholesky() const { return chol_valid_; }
  /// log det S, present once S is numerically positive definite.
  std::optional<double> logdet_s() const {
    if (!chol_valid_) return std::nullopt;
    return logdet_s_;
  }
  /// Full symmetric S.
  Eigen::MatrixXd s() const { return s_.selfadjointView<Eigen::Lower>(); }
  /// Lower Cholesky factor of S (only meaningful when has_cholesky()).
  Eigen::MatrixXd cholesky_factor() const { return llt_.matrixL(); }

  /// Absorbs one observation. With a = |y|^2 and b_k = y^T S^k y (old S):
  ///   tr(S+yy^T)   = tr S + a
  ///   tr(S+yy^T)^2 = tr S^2 + 2 b_1 + a^2
  ///   tr(S+yy^T)^4 = tr S^4 + 4 b_3 + 4 a b_2 + 2 b_1^2 + 4 a^2 b_1 + a^4
  void push(const Eigen::Ref<const Eigen::VectorXd>& y) {
    detail::require(y.size() == p_, "observation length " + std::to_string(y.size()) +
                                        " does not match p = " + std::to_string(p_));
    const double a = y.squaredNorm();
    detail::require(std::isfinite(a), "observation contains non-finite entries");

    if (count_ > 0) {
      w1_.noalias() = s_.selfadjointView<Eigen::Lower>() * y;
      const double b1 = y.dot(w1_);
      tr2_ += 2.0 * b1 + a * a;
      if (tracking_.tr4) {
        w2_.noalias() = s_.selfadjointView<Eigen::Lower>() * w1_;
        const double b2 = w1_.squaredNorm();
        const double b3 = w1_.dot(w2_);
        tr4_ += 4.0 * b3 + 4.0 * a * b2 + 2.0 * b1 * b1 + 4.0 * a * a * b1 + a * a * a * a;
      }
    } else {
      tr2_ = a * a;
      tr4_ = a * a * a * a;
    }
    tr1_ += a;
    s_.selfadjointView<Eigen::Lower>().rankUpdate(y);
    ++count_;

    if (tracking_.logdet) update_cholesky(y);
    if (count_ % kRefreshInterval == 0) refresh_traces();
  }

  /// Recomputes the trace caches from S.
  void refresh_traces() {
    const Eigen::MatrixXd full = s();
    tr1_ = full.trace();
    tr2_ = full.squaredNorm();
    if (tracking_.tr4) {
      const Eigen::MatrixXd sq = full * full;
      tr4_ = sq.squaredNorm();
    }
  }

  /// Traces of B = S / n and log|B| = log det S - p log n at t = count / n.
  CovSnapshot snapshot(const Dimensions& dims) const {
    detail::require(count_ >= 1, "snapshot needs at least one observation");
    detail::require(dims.p == p_, "snapshot dimensions do not match the state");
    detail::require(count_ <= dims.n, "more observations than the sample size n");
    const double n = static_cast<double>(dims.n);
    CovSnapshot out;
    out.count = count_;
    out.t = static_cast<double>(count_) / n;
    out.tr_b = tr1_ / n;
    out.tr_b2 = tr2_ / (n * n);
    out.tr_b4 = tr4_ / (n * n * n * n);
    if (tracking_.logdet && chol_valid_)
      out.logdet_b = logdet_s_ - static_cast<double>(p_) * std::log(n);
    return out;
  }

 private:
  void update_cholesky(const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (count_ < p_) return;
    if (chol_valid_) {
      llt_.rankUpdate(y);
      if (llt_.info() != Eigen::Success || !pivots_healthy()) rebuild_cholesky();
    } else {
      rebuild_cholesky();
    }
    if (chol_valid_) logdet_s_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  }

  void rebuild_cholesky() {
    llt_.compute(s());
    chol_valid_ = llt_.info() == Eigen::Success && pivots_healthy();
  }

  // A pivot L_kk below 1e-12 times its row norm sqrt(S_kk) marks S as
  // numerically singular.
  bool pivots_healthy() const {
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index k = 0; k < p_; ++k) {
      const double pivot = l(k, k);
      const double row = std::sqrt(std::max(s_(k, k), 0.0));
      if (!(pivot > 1e-12 * row) || !std::isfinite(pivot)) return false;
    }
    return true;
  }

  std::int64_t p_;
  Tracking tracking_;
  Eigen::MatrixXd s_;  // lower triangle is authoritative
  Eigen::VectorXd w1_, w2_;
  std::int64_t count_ = 0;
  double tr1_ = 0.0, tr2_ = 0.0, tr4_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool chol_valid_ = false;
  double logdet_s_ = 0.0;
};

}  // namespace seqspec
