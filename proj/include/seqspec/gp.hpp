#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "seqspec/error.hpp"
#include "seqspec/limits.hpp"
#include "seqspec/model.hpp"
#include "seqspec/parallel.hpp"
#include "seqspec/rng.hpp"

namespace seqspec {

/// Critical value estimate from the maxima of simulated paths.
struct QuantileEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
  std::size_t grid_size = 0;
  double alpha = 0.0;
};

/// Draws discretized paths of a LimitLaw on a TimeGrid: mean + L zeta with
/// L the Cholesky factor of the grid Gram matrix.
class GpSampler {
 public:
  /// Draws per RNG shard. Shard j always reads stream mix(seed, j), so the
  /// paths do not depend on the thread count.
  static constexpr std::size_t kShard = 2048;

  GpSampler(LimitLaw law, TimeGrid grid, std::uint64_t seed)
      : law_(std::move(law)), grid_(std::move(grid)), seed_(seed) {
    mean_ = law_.mean_vector(grid_);
    factorize(law_.gram(grid_));
  }

  const LimitLaw& law() const { return law_; }
  const TimeGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Lower-triangular L with L L^T = Gram + jitter I.
  const Eigen::MatrixXd& factor() const { return chol_; }
  double jitter() const { return jitter_; }

  /// count x |grid| matrix; row j is one path.
  Eigen::MatrixXd sample_paths(std::size_t count, unsigned threads = default_thread_count()) const {
    detail::require(count >= 1, "sample_paths needs count >= 1");
    const auto m = static_cast<Eigen::Index>(grid_.size());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), m);
    const std::size_t shards = (count + kShard - 1) / kShard;
    parallel_for(shards, threads, [&](std::size_t s) {
      const std::size_t first = s * kShard;
      const auto rows = static_cast<Eigen::Index>(std::min(kShard, count - first));
      out.middleRows(static_cast<Eigen::Index>(first), rows) = shard_paths(s, rows).transpose();
    });
    return out;
  }

  /// Maxima over the grid of `count` paths, in draw order.
  std::vector<double> sample_maxima(std::size_t count, unsigned threads = default_thread_count()) const {
    detail::require(count >= 1, "sample_maxima needs count >= 1");
    std::vector<double> out(count);
    const std::size_t shards = (count + kShard - 1) / kShard;
    parallel_for(shards, threads, [&](std::size_t s) {
      const std::size_t first = s * kShard;
      const auto rows = static_cast<Eigen::Index>(std::min(kShard, count - first));
      const Eigen::MatrixXd paths = shard_paths(s, rows);
      for (Eigen::Index j = 0; j < rows; ++j)
        out[first + static_cast<std::size_t>(j)] = paths.col(j).maxCoeff();
    });
    return out;
  }

  /// (1 - alpha)-quantile of sup_t over the grid: the order statistic of rank
  /// ceil((1 - alpha) count). The standard error is half the spread of the
  /// order statistics d = ceil(sqrt(count alpha (1 - alpha))) ranks away,
  /// i.e. one binomial standard deviation of the empirical CDF.
  QuantileEstimate sup_quantile(double alpha, std::size_t count,
                                unsigned threads = default_thread_count()) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    detail::require(count >= 1000, "sup_quantile needs at least 1000 draws");
    auto maxima = sample_maxima(count, threads);
    std::sort(maxima.begin(), maxima.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(count) - 1e-9));
    const std::size_t idx = std::clamp<std::size_t>(rank, 1, count) - 1;
    const auto d = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(count) * alpha * (1.0 - alpha))));
    const std::size_t lo = idx >= d ? idx - d : 0;
    const std::size_t hi = std::min(count - 1, idx + d);
    QuantileEstimate q;
    q.value = maxima[idx];
    q.std_error = 0.5 * (maxima[hi] - maxima[lo]);
    q.draws = count;
    q.grid_size = grid_.size();
    q.alpha = alpha;
    return q;
  }

 private:
  // |grid| x rows block of paths for shard s.
  Eigen::MatrixXd shard_paths(std::size_t s, Eigen::Index rows) const {
    const auto m = static_cast<Eigen::Index>(grid_.size());
    Eigen::MatrixXd z(m, rows);
    NormalStream rng(seed_, mix_stream(0x6770u, s));
    rng.fill(z.data(), z.data() + z.size());
    Eigen::MatrixXd paths = chol_.triangularView<Eigen::Lower>() * z;
    paths.colwise() += mean_;
    return paths;
  }

  void factorize(const Eigen::MatrixXd& gram) {
    const auto m = gram.rows();
    const double scale = m > 0 ? gram.diagonal().cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) {
      chol_ = Eigen::MatrixXd::Zero(m, m);
      jitter_ = 0.0;
      return;
    }
    for (double rel : {0.0, 1e-12, 1e-10, 1e-8}) {
      Eigen::MatrixXd a = gram;
      a.diagonal().array() += rel * scale;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) continue;
      Eigen::MatrixXd l = llt.matrixL();
      if (!l.allFinite() || !(l.diagonal().minCoeff() > 0.0)) continue;
      chol_ = std::move(l);
      jitter_ = rel * scale;
      return;
    }
    throw NumericError("covariance kernel is not positive semidefinite on the grid", scale);
  }

  LimitLaw law_;
  TimeGrid grid_;
  std::uint64_t seed_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;
  double jitter_ = 0.0;
};

}  // namespace seqspec
