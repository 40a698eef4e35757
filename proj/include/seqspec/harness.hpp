#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqspec/csv.hpp"
#include "seqspec/datagen.hpp"
#include "seqspec/error.hpp"
#include "seqspec/gp.hpp"
#include "seqspec/limits.hpp"
#include "seqspec/model.hpp"
#include "seqspec/monitor.hpp"
#include "seqspec/parallel.hpp"
#include "seqspec/rng.hpp"

namespace seqspec {

/// Post-change families of the simulation study, indexed by the parameter delta.
enum class Alternative {
  diag_shift,          // I + delta diag(0,...,0,1,...,1)
  diag_shift_offdiag,  // the same plus delta/2 couplings in the lower half
  scaled_identity,     // (1 + delta) I
  scaled_tridiag,      // (1 + delta) I + delta (sub/super-diagonal)
};

inline std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::diag_shift: return "diag-shift";
    case Alternative::diag_shift_offdiag: return "diag-shift-offdiag";
    case Alternative::scaled_identity: return "scaled-identity";
    case Alternative::scaled_tridiag: return "scaled-tridiag";
  }
  return "?";
}

inline Alternative alternative_from_string(std::string_view s) {
  for (auto a : {Alternative::diag_shift, Alternative::diag_shift_offdiag, Alternative::scaled_identity,
                 Alternative::scaled_tridiag})
    if (s == to_string(a)) return a;
  throw DomainError("unknown alternative '" + std::string(s) +
                    "' (diag-shift, diag-shift-offdiag, scaled-identity, scaled-tridiag)");
}

inline CovarianceSpec alternative_covariance(Alternative a, double delta, std::int64_t p) {
  switch (a) {
    case Alternative::diag_shift: return CovarianceSpec::diag_shift(delta, p);
    case Alternative::diag_shift_offdiag: return CovarianceSpec::diag_shift_offdiag(delta, p);
    case Alternative::scaled_identity: return CovarianceSpec::scaled_identity_eps(delta, p);
    case Alternative::scaled_tridiag: return CovarianceSpec::scaled_tridiag(delta, p);
  }
  return CovarianceSpec::identity(p);
}

struct ExperimentConfig {
  std::vector<Dimensions> dims{{200, 120}, {150, 300}, {200, 300}};
  Alternative alternative = Alternative::diag_shift;
  std::vector<double> deltas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double t_star = 0.6;
  double t0 = 0.2;
  double alpha = 0.05;
  int replications = 500;
  std::size_t critval_draws = 100000;
  std::uint64_t seed = 1;
  StatisticId statistic = StatisticId::u;
  unsigned threads = default_thread_count();
  /// Directory for cached critical values; none disables caching.
  std::optional<std::filesystem::path> cache_dir;

  void validate() const {
    detail::require(!dims.empty(), "experiment needs at least one (n, p) pair");
    detail::require(!deltas.empty(), "experiment needs a delta grid");
    bool has_zero = false;
    for (double d : deltas) {
      detail::require(std::isfinite(d) && d >= 0.0, "deltas must be finite and >= 0");
      has_zero = has_zero || d == 0.0;
    }
    detail::require(has_zero, "delta grid must include 0 (the null case)");
    detail::require(replications >= 1, "replications must be >= 1");
    detail::require(t_star > 0.0 && t_star < 1.0, "t_star must lie in (0, 1)");
    detail::require(t0 > 0.0 && t0 <= 1.0, "t0 must lie in (0, 1]");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    detail::require(critval_draws >= 1000, "critical values need at least 1000 draws");
  }
};

struct PowerRow {
  std::int64_t n = 0;
  std::int64_t p = 0;
  double delta = 0.0;
  double rate = 0.0;
  double std_err = 0.0;
};

struct PowerCurve {
  std::vector<PowerRow> rows;
};

inline void write_power_csv(std::ostream& os, const std::vector<PowerRow>& rows) {
  os << "n,p,delta,rate,stderr\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.p << ',' << csv::fmt(r.delta) << ',' << csv::fmt(r.rate) << ','
       << csv::fmt(r.std_err) << '\n';
}

inline void write_power_csv(std::ostream& os, const PowerCurve& curve) { write_power_csv(os, curve.rows); }

/// Limit law of a statistic on the canonical grid.
inline LimitLaw statistic_law(StatisticId id, const Dimensions& dims, const TimeGrid& grid) {
  switch (id) {
    case StatisticId::u: return law_u(dims, grid);
    case StatisticId::u2: return law_u2(dims, grid);
    case StatisticId::logdet: return law_logdet(dims, grid);
  }
  throw DomainError("unknown statistic");
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

/// c_alpha for (statistic, n, p, t0) from `draws` simulated sup values.
/// Cached under cache_dir, keyed by a hash of every input.
inline QuantileEstimate critical_value(StatisticId id, const Dimensions& dims, double t0, double alpha,
                                       std::size_t draws, std::uint64_t seed, unsigned threads,
                                       const std::optional<std::filesystem::path>& cache_dir = {}) {
  std::ostringstream key;
  key << "critval-v1 " << to_string(id) << " n=" << dims.n << " p=" << dims.p << " t0=" << csv::fmt(t0)
      << " alpha=" << csv::fmt(alpha) << " draws=" << draws << " seed=" << seed;
  std::filesystem::path file;
  if (cache_dir) {
    char name[40];
    std::snprintf(name, sizeof name, "critval-%016llx.txt",
                  static_cast<unsigned long long>(detail::fnv1a(key.str())));
    file = *cache_dir / name;
    std::ifstream in(file);
    std::string stored, value, se, grid;
    if (in && std::getline(in, stored) && stored == key.str() && std::getline(in, value) &&
        std::getline(in, se) && std::getline(in, grid)) {
      QuantileEstimate q;
      q.value = csv::parse_double(value);
      q.std_error = csv::parse_double(se);
      q.draws = draws;
      q.grid_size = static_cast<std::size_t>(std::stoull(grid));
      q.alpha = alpha;
      return q;
    }
  }
  const auto grid = TimeGrid::canonical(dims.n, t0);
  const GpSampler sampler(statistic_law(id, dims, grid), grid, seed);
  const auto q = sampler.sup_quantile(alpha, draws, threads);
  if (cache_dir) {
    std::filesystem::create_directories(*cache_dir);
    const auto tmp = file.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << key.str() << '\n' << csv::fmt(q.value) << '\n' << csv::fmt(q.std_error) << '\n'
          << q.grid_size << '\n';
    }
    std::filesystem::rename(tmp, file);
  }
  return q;
}

/// Rejection rates of the sup test over the delta grid.
/// Replication r of pair (n, p) uses stream mix(n, p, r) for every delta and
/// every alternative (common random numbers), so curves are comparable and
/// independent of the thread count.
inline PowerCurve run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PowerCurve curve;
  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const Dimensions& dims = cfg.dims[di];
    const auto grid = TimeGrid::canonical(dims.n, cfg.t0);
    const auto cv = critical_value(cfg.statistic, dims, cfg.t0, cfg.alpha, cfg.critval_draws,
                                   mix_stream(cfg.seed, 0xC417u), cfg.threads, cfg.cache_dir);
    for (double delta : cfg.deltas) {
      const auto scn = delta == 0.0
                           ? ChangePointScenario::null(dims.p)
                           : ChangePointScenario::change(alternative_covariance(cfg.alternative, delta, dims.p),
                                                         cfg.t_star);
      std::vector<char> reject(static_cast<std::size_t>(cfg.replications), 0);
      parallel_for(reject.size(), cfg.threads, [&](std::size_t r) {
        const auto stream = mix_stream(static_cast<std::uint64_t>(dims.n), static_cast<std::uint64_t>(dims.p), r);
        const auto batch = draw_sample(scn, dims, cfg.seed, stream);
        const auto traj = trajectory(cfg.statistic, batch, dims, grid);
        reject[r] = run_test(traj, cv.value, cfg.alpha).reject ? 1 : 0;
      });
      std::size_t hits = 0;
      for (char c : reject) hits += static_cast<std::size_t>(c);
      PowerRow row;
      row.n = dims.n;
      row.p = dims.p;
      row.delta = delta;
      row.rate = static_cast<double>(hits) / static_cast<double>(cfg.replications);
      row.std_err = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(cfg.replications));
      curve.rows.push_back(row);
    }
  }
  return curve;
}

}  // namespace seqspec
