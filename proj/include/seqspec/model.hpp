#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqspec/error.hpp"

namespace seqspec {

/// Sample size n and dimension p.
struct Dimensions {
  std::int64_t n = 1;
  std::int64_t p = 1;

  Dimensions() = default;
  Dimensions(std::int64_t n_, std::int64_t p_) : n(n_), p(p_) {
    detail::require(n >= 1, "sample size n must be >= 1");
    detail::require(p >= 1, "dimension p must be >= 1");
  }

  /// y_n = p / n.
  double ratio() const { return static_cast<double>(p) / static_cast<double>(n); }
};

/// Real entries (E x^4 = 3) or complex entries (E x^2 = 0, E|x|^4 = 2).
enum class SymmetryClass { real, complex };

inline std::string_view to_string(SymmetryClass c) {
  return c == SymmetryClass::real ? "real" : "complex";
}

/// floor(n t) for a decimal t. A 1e-9 guard absorbs binary representation
/// error, so floor_index(0.6, 200) is 120 and not 119.
inline std::int64_t floor_index(double t, std::int64_t n) {
  detail::require(n >= 1, "n must be >= 1");
  detail::require(t >= 0.0 && t <= 1.0, "time t must lie in [0, 1]");
  return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t + 1e-9));
}

/// y_{floor(nt)} = p / floor(nt) for an exact index k = floor(nt).
inline double aspect_ratio_at_index(std::int64_t k, const Dimensions& dims) {
  if (k < 1) throw DomainError("aspect ratio undefined: floor(n t) = 0");
  return static_cast<double>(dims.p) / static_cast<double>(k);
}

inline double aspect_ratio_at(double t, const Dimensions& dims) {
  return aspect_ratio_at_index(floor_index(t, dims.n), dims);
}

/// Ordered monitoring times t_k in [t0, 1]. Points on the canonical grid are
/// stored as integer indices k (t = k/n) so floor(n t) is exact.
class TimeGrid {
 public:
  /// The one-point grid {1} with n = 1.
  TimeGrid() : TimeGrid(1, 1.0, {1}) {}

  /// { k/n : k = ceil(n t0), ..., n }. The monitored processes only change at
  /// these points, so the supremum over [t0, 1] is a maximum over the grid.
  static TimeGrid canonical(std::int64_t n, double t0) {
    detail::require(n >= 1, "n must be >= 1");
    detail::require(t0 > 0.0 && t0 <= 1.0, "t0 must lie in (0, 1]");
    auto first = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * t0 - 1e-9));
    if (first < 1) first = 1;
    std::vector<std::int64_t> idx;
    idx.reserve(static_cast<std::size_t>(n - first + 1));
    for (std::int64_t k = first; k <= n; ++k) idx.push_back(k);
    return TimeGrid(n, t0, std::move(idx));
  }

  /// Sub-grid from explicit indices; must be strictly increasing and end at n.
  static TimeGrid from_indices(std::int64_t n, double t0, std::vector<std::int64_t> idx) {
    return TimeGrid(n, t0, std::move(idx));
  }

  std::int64_t n() const { return n_; }
  double t0() const { return t0_; }
  std::size_t size() const { return idx_.size(); }
  const std::vector<std::int64_t>& indices() const { return idx_; }
  std::int64_t index(std::size_t i) const { return idx_[i]; }
  double time(std::size_t i) const {
    return static_cast<double>(idx_[i]) / static_cast<double>(n_);
  }
  std::vector<double> times() const {
    std::vector<double> t(idx_.size());
    for (std::size_t i = 0; i < idx_.size(); ++i) t[i] = time(i);
    return t;
  }

 private:
  TimeGrid(std::int64_t n, double t0, std::vector<std::int64_t> idx)
      : n_(n), t0_(t0), idx_(std::move(idx)) {
    detail::require(n_ >= 1, "n must be >= 1");
    detail::require(t0_ > 0.0 && t0_ <= 1.0, "t0 must lie in (0, 1]");
    detail::require(!idx_.empty(), "time grid is empty");
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      detail::require(idx_[i] >= 1 && idx_[i] <= n_, "grid index out of range");
      detail::require(static_cast<double>(idx_[i]) >= t0_ * static_cast<double>(n_) - 1e-9,
                      "grid point below t0");
      if (i > 0) detail::require(idx_[i] > idx_[i - 1], "grid must be strictly increasing");
    }
    detail::require(idx_.back() == n_, "grid must end at t = 1");
  }

  std::int64_t n_;
  double t0_;
  std::vector<std::int64_t> idx_;
};

}  // namespace seqspec
