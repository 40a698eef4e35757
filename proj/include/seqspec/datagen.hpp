#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "seqspec/csv.hpp"
#include "seqspec/error.hpp"
#include "seqspec/model.hpp"
#include "seqspec/rng.hpp"

namespace seqspec {

/// Population covariance families of the simulation study.
///   scaled_identity      sigma2 * I
///   diag_shift           I + diag(0,...,0, d,...,d)         (p/2 zeros)
///   diag_shift_offdiag   diag_shift(d) + d at (j, j-1), (j-1, j) for p/2 < j <= p
///   scaled_identity_eps  (1 + e) I
///   scaled_tridiag       (1 + e) I + e at (j, j-1), (j-1, j) for 1 < j <= p
enum class CovarianceKind {
  scaled_identity,
  diag_shift,
  diag_shift_offdiag,
  scaled_identity_eps,
  scaled_tridiag
};

inline std::string_view to_string(CovarianceKind k) {
  switch (k) {
    case CovarianceKind::scaled_identity: return "scaled-identity";
    case CovarianceKind::diag_shift: return "diag-shift";
    case CovarianceKind::diag_shift_offdiag: return "diag-shift-offdiag";
    case CovarianceKind::scaled_identity_eps: return "scaled-identity-eps";
    case CovarianceKind::scaled_tridiag: return "scaled-tridiag";
  }
  return "?";
}

inline CovarianceKind covariance_kind_from_string(std::string_view s) {
  for (auto k : {CovarianceKind::scaled_identity, CovarianceKind::diag_shift,
                 CovarianceKind::diag_shift_offdiag, CovarianceKind::scaled_identity_eps,
                 CovarianceKind::scaled_tridiag})
    if (to_string(k) == s) return k;
  throw DomainError("unknown covariance family '" + std::string(s) + "'");
}

struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::scaled_identity;
  double param = 1.0;  // sigma2 for scaled_identity, delta or epsilon otherwise
  std::int64_t p = 1;

  static CovarianceSpec identity(std::int64_t p) { return {CovarianceKind::scaled_identity, 1.0, p}; }
  static CovarianceSpec scaled_identity(double sigma2, std::int64_t p) {
    return {CovarianceKind::scaled_identity, sigma2, p};
  }
  static CovarianceSpec diag_shift(double delta, std::int64_t p) {
    return {CovarianceKind::diag_shift, delta, p};
  }
  static CovarianceSpec diag_shift_offdiag(double delta, std::int64_t p) {
    return {CovarianceKind::diag_shift_offdiag, delta, p};
  }
  static CovarianceSpec scaled_identity_eps(double eps, std::int64_t p) {
    return {CovarianceKind::scaled_identity_eps, eps, p};
  }
  static CovarianceSpec scaled_tridiag(double eps, std::int64_t p) {
    return {CovarianceKind::scaled_tridiag, eps, p};
  }

  bool is_scaled_identity() const {
    return kind == CovarianceKind::scaled_identity || kind == CovarianceKind::scaled_identity_eps ||
           param == 0.0;
  }
  bool is_diagonal() const {
    return is_scaled_identity() || kind == CovarianceKind::diag_shift;
  }
  /// Diagonal entry j (0-based).
  double diagonal(std::int64_t j) const {
    switch (kind) {
      case CovarianceKind::scaled_identity: return param;
      case CovarianceKind::diag_shift:
      case CovarianceKind::diag_shift_offdiag: return j >= p / 2 ? 1.0 + param : 1.0;
      case CovarianceKind::scaled_identity_eps:
      case CovarianceKind::scaled_tridiag: return 1.0 + param;
    }
    return 1.0;
  }
};

namespace detail {

inline void validate(const CovarianceSpec& spec) {
  require(spec.p >= 1, "covariance dimension p must be >= 1");
  require(std::isfinite(spec.param), "covariance parameter must be finite");
  if (spec.kind == CovarianceKind::diag_shift || spec.kind == CovarianceKind::diag_shift_offdiag)
    require(spec.p % 2 == 0, "diag-shift families need an even dimension p");
}

}  // namespace detail

/// Dense Sigma for a structured spec. Throws DomainError unless positive definite.
inline Eigen::MatrixXd build_covariance(const CovarianceSpec& spec) {
  detail::validate(spec);
  const Eigen::Index p = spec.p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) m(j, j) = spec.diagonal(j);
  const double d = spec.param;
  if (spec.kind == CovarianceKind::diag_shift_offdiag) {
    // 1-based j with p/2 < j <= p couples (j, j-1); j = p/2 + 1 bridges the two blocks.
    for (Eigen::Index j = p / 2 + 1; j <= p; ++j) {
      if (j - 1 < 1) continue;
      m(j - 1, j - 2) = d;
      m(j - 2, j - 1) = d;
    }
  } else if (spec.kind == CovarianceKind::scaled_tridiag) {
    for (Eigen::Index j = 2; j <= p; ++j) {
      m(j - 1, j - 2) = d;
      m(j - 2, j - 1) = d;
    }
  }
  double eigmin = m.diagonal().minCoeff();
  if (!spec.is_diagonal()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    eigmin = es.eigenvalues().minCoeff();
  }
  if (!(eigmin > 0.0))
    throw DomainError("covariance '" + std::string(to_string(spec.kind)) + "' with parameter " +
                      csv::fmt(spec.param) + " is not positive definite");
  return m;
}

/// Symmetric square root R (R R = M) of a symmetric positive definite matrix,
/// through the symmetric eigendecomposition. Diagonal inputs take the
/// elementwise root.
inline Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& m) {
  detail::require(m.rows() == m.cols(), "matrix_sqrt needs a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  detail::require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                  "matrix_sqrt needs a symmetric matrix");
  const bool diagonal = (m - Eigen::MatrixXd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    detail::require(m.diagonal().minCoeff() > 0.0, "matrix_sqrt needs a positive definite matrix");
    return Eigen::MatrixXd(m.diagonal().cwiseSqrt().asDiagonal());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigendecomposition failed");
  detail::require(es.eigenvalues().minCoeff() > 0.0, "matrix_sqrt needs a positive definite matrix");
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd r = v * es.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

/// (g, h) = (tr(Sigma)/p, tr(Sigma^2)/p) from the structured form.
inline std::pair<double, double> sphericity_limits(const CovarianceSpec& spec) {
  detail::validate(spec);
  const double d = spec.param;
  const double p = static_cast<double>(spec.p);
  switch (spec.kind) {
    case CovarianceKind::scaled_identity: return {d, d * d};
    case CovarianceKind::scaled_identity_eps: return {1.0 + d, (1.0 + d) * (1.0 + d)};
    case CovarianceKind::diag_shift:
      return {1.0 + d / 2.0, (1.0 + (1.0 + d) * (1.0 + d)) / 2.0};
    case CovarianceKind::diag_shift_offdiag:
      // p/2 off-diagonal pairs, each contributing 2 d^2 to tr(Sigma^2).
      return {1.0 + d / 2.0, (1.0 + (1.0 + d) * (1.0 + d)) / 2.0 + d * d};
    case CovarianceKind::scaled_tridiag:
      return {1.0 + d, (1.0 + d) * (1.0 + d) + 2.0 * d * d * (p - 1.0) / p};
  }
  return {0.0, 0.0};
}

/// Sigma_i = pre for i <= floor(n t_star), post afterwards; t_star = 1 is no change.
struct ChangePointScenario {
  CovarianceSpec pre;
  CovarianceSpec post;
  double t_star = 1.0;

  static ChangePointScenario null(std::int64_t p) {
    return {CovarianceSpec::identity(p), CovarianceSpec::identity(p), 1.0};
  }
  static ChangePointScenario change(const CovarianceSpec& post, double t_star) {
    return {CovarianceSpec::identity(post.p), post, t_star};
  }
};

/// p x n observations; column i is y_i.
struct ObservationBatch {
  Eigen::MatrixXd data;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::int64_t p() const { return data.rows(); }
  std::int64_t n() const { return data.cols(); }
};

namespace detail {

/// Applies Sigma^{1/2} to a block of columns, using the cheapest exact form.
class SqrtFactor {
 public:
  explicit SqrtFactor(const CovarianceSpec& spec) {
    if (spec.is_scaled_identity()) {
      detail::validate(spec);
      const double v = spec.diagonal(0);
      require(v > 0.0, "covariance scale must be positive");
      scalar_ = std::sqrt(v);
      kind_ = Kind::scalar;
    } else if (spec.is_diagonal()) {
      diag_ = build_covariance(spec).diagonal().cwiseSqrt();
      kind_ = Kind::diagonal;
    } else {
      dense_ = matrix_sqrt(build_covariance(spec));
      kind_ = Kind::dense;
    }
  }

  void apply(Eigen::Ref<Eigen::MatrixXd> block) const {
    switch (kind_) {
      case Kind::scalar:
        if (scalar_ != 1.0) block *= scalar_;
        break;
      case Kind::diagonal: block = diag_.asDiagonal() * block; break;
      case Kind::dense: block = (dense_ * block).eval(); break;
    }
  }

 private:
  enum class Kind { scalar, diagonal, dense };
  Kind kind_ = Kind::scalar;
  double scalar_ = 1.0;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd dense_;
};

}  // namespace detail

/// Draws y_i = Sigma_i^{1/2} x_i with x_i i.i.d. standard normal. Observation i
/// reads its own Philox stream (seed, mix(stream, i)), so a batch depends only
/// on (scenario, dims, seed, stream).
inline ObservationBatch draw_sample(const ChangePointScenario& scn, const Dimensions& dims,
                                    std::uint64_t seed, std::uint64_t stream = 0) {
  detail::require(scn.pre.p == dims.p && scn.post.p == dims.p,
                  "scenario dimension does not match p");
  detail::require(scn.t_star > 0.0 && scn.t_star <= 1.0, "change fraction t_star must lie in (0, 1]");
  const detail::SqrtFactor pre(scn.pre);
  const detail::SqrtFactor post(scn.post);

  ObservationBatch batch;
  batch.seed = seed;
  batch.stream = stream;
  batch.data.resize(dims.p, dims.n);
  for (Eigen::Index i = 0; i < dims.n; ++i) {
    NormalStream rng(seed, mix_stream(stream, static_cast<std::uint64_t>(i)));
    auto col = batch.data.col(i);
    rng.fill(col.data(), col.data() + col.size());
  }
  const std::int64_t change = floor_index(scn.t_star, dims.n);
  if (change > 0) pre.apply(batch.data.leftCols(change));
  if (change < dims.n) post.apply(batch.data.rightCols(dims.n - change));
  return batch;
}

/// CSV: n rows x p columns, header x1,...,xp.
inline void write_batch_csv(std::ostream& os, const ObservationBatch& batch) {
  for (Eigen::Index j = 0; j < batch.data.rows(); ++j) {
    if (j) os << ',';
    os << 'x' << (j + 1);
  }
  os << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < batch.data.cols(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < batch.data.rows(); ++j) {
      if (j) line += ',';
      line += csv::fmt(batch.data(j, i));
    }
    line += '\n';
    os << line;
  }
}

inline ObservationBatch read_batch_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("observation CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = csv::split(line);
  const auto p = static_cast<Eigen::Index>(header.size());
  for (Eigen::Index j = 0; j < p; ++j)
    if (header[j] != "x" + std::to_string(j + 1))
      throw DomainError("observation CSV header must be x1,...,xp");
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (static_cast<Eigen::Index>(cells.size()) != p)
      throw DomainError("observation CSV row " + std::to_string(rows + 1) + " has " +
                        std::to_string(cells.size()) + " fields, expected " + std::to_string(p));
    for (auto c : cells) {
      const double v = csv::parse_double(c);
      if (!std::isfinite(v)) throw DomainError("observation CSV contains a non-finite value");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DomainError("observation CSV has no rows");
  ObservationBatch batch;
  batch.data = Eigen::Map<Eigen::MatrixXd>(values.data(), p, rows);
  return batch;
}

inline ObservationBatch read_batch_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open observation file '" + path + "'");
  return read_batch_csv(in);
}

}  // namespace seqspec
