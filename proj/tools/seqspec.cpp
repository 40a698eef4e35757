// seqspec: command-line front end for the sequential sphericity tests.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqspec/seqspec.hpp"

using namespace seqspec;

namespace {

struct Range {
  double lo = 0.0, hi = 0.0;
  int count = 1;
};

// "a:b:k" -> k points from a to b.
Range parse_range(const std::string& s, const std::string& flag) {
  const auto parts = csv::split(s, ':');
  if (parts.size() != 3) throw DomainError(flag + " expects lo:hi:count, got '" + s + "'");
  Range r;
  r.lo = csv::parse_double(parts[0]);
  r.hi = csv::parse_double(parts[1]);
  const double c = csv::parse_double(parts[2]);
  if (!(c >= 1) || c != std::floor(c)) throw DomainError(flag + ": count must be a positive integer");
  r.count = static_cast<int>(c);
  return r;
}

double range_at(const Range& r, int i) {
  return r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.count - 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (auto part : csv::split(s, ',')) {
    try {
      out.push_back(csv::parse_double(part));
    } catch (const DomainError&) {
      throw DomainError(flag + ": malformed number '" + std::string(part) + "'");
    }
  }
  return out;
}

std::vector<Dimensions> parse_dims(const std::string& s) {
  std::vector<Dimensions> out;
  for (auto part : csv::split(s, ',')) {
    const auto np = csv::split(part, 'x');
    if (np.size() != 2) throw DomainError("--dims expects NxP pairs such as 200x120, got '" + std::string(part) + "'");
    const double n = csv::parse_double(np[0]), p = csv::parse_double(np[1]);
    out.emplace_back(static_cast<std::int64_t>(n), static_cast<std::int64_t>(p));
  }
  return out;
}

std::vector<SpectralMeasure::Atom> parse_atoms(const std::string& s) {
  std::vector<SpectralMeasure::Atom> atoms;
  for (auto part : csv::split(s, ',')) {
    const auto lw = csv::split(part, ':');
    if (lw.size() != 2) throw DomainError("--atoms expects lambda:weight pairs, got '" + std::string(part) + "'");
    atoms.push_back({csv::parse_double(lw[0]), csv::parse_double(lw[1])});
  }
  return atoms;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file '" + path + "'");
  return out;
}

void print_report(std::ostream& os, const TestReport& r, const QuantileEstimate& q) {
  os << "statistic=" << to_string(r.statistic) << '\n'
     << "sup_value=" << csv::fmt(r.sup_value) << '\n'
     << "critical_value=" << csv::fmt(r.critical_value) << '\n'
     << "critical_value_std_err=" << csv::fmt(q.std_error) << '\n'
     << "alpha=" << csv::fmt(r.alpha) << '\n'
     << "reject=" << (r.reject ? "true" : "false") << '\n'
     << "argmax_time=" << csv::fmt(r.argmax_time) << '\n'
     << "argmax_time_note=heuristic\n"
     << "draws=" << q.draws << '\n'
     << "grid_size=" << q.grid_size << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential sphericity tests for high-dimensional covariance matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = default_thread_count();
  app.add_option("--threads", threads, "Worker threads (default: SEQSPEC_THREADS or hardware)")
      ->check(CLI::PositiveNumber);

  // critval
  auto* crit = app.add_subcommand("critval", "Critical value c_alpha of sup_t over [t0, 1] of a limit process");
  std::string crit_law = "u";
  std::int64_t crit_n = 0, crit_p = 0;
  double crit_t0 = 0.2, crit_alpha = 0.05;
  std::size_t crit_draws = 100000;
  std::uint64_t crit_seed = 1;
  std::string crit_class = "real";
  crit->add_option("--law", crit_law, "Limit law: u, u2 or logdet")->check(CLI::IsMember({"u", "u2", "logdet"}));
  crit->add_option("--n", crit_n, "Sample size n (observations)")->required();
  crit->add_option("--p", crit_p, "Dimension p")->required();
  crit->add_option("--t0", crit_t0, "Start of the monitoring window, fraction of n in (0, 1]");
  crit->add_option("--alpha", crit_alpha, "Test level in (0, 1)");
  crit->add_option("--draws", crit_draws, "Monte Carlo draws of the limit process");
  crit->add_option("--seed", crit_seed, "RNG seed");
  crit->add_option("--class", crit_class, "Entry class for logdet: real or complex")
      ->check(CLI::IsMember({"real", "complex"}));

  // test
  auto* test = app.add_subcommand("test", "Run a sup test on an observation CSV");
  std::string test_stat = "u", test_data, test_out;
  double test_t0 = 0.2, test_alpha = 0.05;
  std::size_t test_draws = 100000;
  std::uint64_t test_seed = 1;
  test->add_option("--statistic", test_stat, "Statistic: u, u2 or logdet")->check(CLI::IsMember({"u", "u2", "logdet"}));
  test->add_option("--data", test_data, "Observation CSV (header x1..xp, one row per observation)")->required();
  test->add_option("--t0", test_t0, "Start of the monitoring window, fraction of n in (0, 1]");
  test->add_option("--alpha", test_alpha, "Test level in (0, 1)");
  test->add_option("--draws", test_draws, "Monte Carlo draws for the critical value");
  test->add_option("--seed", test_seed, "RNG seed for the critical value");
  test->add_option("--out", test_out, "Write the trajectory as CSV (t,value) to this path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw an observation CSV from a change-point scenario");
  std::int64_t sim_n = 0, sim_p = 0;
  std::string sim_family = "scaled-identity", sim_out;
  double sim_param = 1.0, sim_tstar = 1.0;
  std::uint64_t sim_seed = 1, sim_stream = 0;
  sim->add_option("--n", sim_n, "Sample size n (observations)")->required();
  sim->add_option("--p", sim_p, "Dimension p")->required();
  sim->add_option("--family", sim_family,
                  "Post-change covariance: scaled-identity (param = sigma^2), diag-shift, diag-shift-offdiag, "
                  "scaled-identity-eps, scaled-tridiag (param = delta or epsilon)");
  sim->add_option("--param", sim_param, "Family parameter");
  sim->add_option("--t-star", sim_tstar, "Change fraction in (0, 1]; before it the covariance is I. With 1 the family covariance is used throughout");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--stream", sim_stream, "RNG stream index");
  sim->add_option("--out", sim_out, "Output CSV path (default: stdout)");

  // figures
  auto* fig = app.add_subcommand("figures", "Monte Carlo rejection rates over a delta grid, one CSV per (n, p, alternative)");
  std::string fig_alt = "all", fig_dims = "200x120,150x300,200x300", fig_deltas = "0,0.2,0.4,0.6,0.8,1";
  std::string fig_out = ".", fig_stat = "u", fig_cache;
  int fig_reps = 500;
  bool fig_full = false;
  double fig_tstar = 0.6, fig_t0 = 0.2, fig_alpha = 0.05;
  std::size_t fig_draws = 100000;
  std::uint64_t fig_seed = 1;
  fig->add_option("--alternative", fig_alt,
                  "diag-shift, diag-shift-offdiag, scaled-identity, scaled-tridiag, or all");
  fig->add_option("--dims", fig_dims, "Comma-separated NxP pairs");
  fig->add_option("--deltas", fig_deltas, "Comma-separated delta grid (must include 0)");
  fig->add_option("--replications", fig_reps, "Replications per point");
  fig->add_flag("--full-scale", fig_full, "Use 2000 replications");
  fig->add_option("--t-star", fig_tstar, "Change fraction t*");
  fig->add_option("--t0", fig_t0, "Start of the monitoring window");
  fig->add_option("--alpha", fig_alpha, "Test level");
  fig->add_option("--draws", fig_draws, "Monte Carlo draws for each critical value");
  fig->add_option("--seed", fig_seed, "RNG seed");
  fig->add_option("--statistic", fig_stat, "Statistic: u or u2")->check(CLI::IsMember({"u", "u2"}));
  fig->add_option("--out-dir", fig_out, "Directory for the CSV files");
  fig->add_option("--cache-dir", fig_cache, "Directory for cached critical values");

  // mp
  auto* mp = app.add_subcommand("mp", "Companion Stieltjes transform s~_t(z) on a grid of z");
  double mp_t = 1.0, mp_y = 0.5;
  std::string mp_re = "0.1:4:20", mp_im = "0.1:2:20", mp_atoms = "1:1";
  mp->add_option("--t", mp_t, "Time t in (0, 1]");
  mp->add_option("--y", mp_y, "Aspect ratio y = p/n");
  mp->add_option("--grid-re", mp_re, "Real parts lo:hi:count");
  mp->add_option("--grid-im", mp_im, "Imaginary parts lo:hi:count (nonzero)");
  mp->add_option("--atoms", mp_atoms, "Population spectrum as lambda:weight pairs");

  // kernels
  auto* ker = app.add_subcommand("kernels", "Mean and covariance kernel tables of a limit law");
  std::string ker_law = "u", ker_route = "closed", ker_f = "x2", ker_class = "real";
  std::int64_t ker_n = 0, ker_p = 0;
  double ker_t0 = 0.2;
  int ker_points = 9;
  ker->add_option("--law", ker_law, "u, u2, logdet, trace-pair, or lss (general f via --f)")
      ->check(CLI::IsMember({"u", "u2", "logdet", "trace-pair", "lss"}));
  ker->add_option("--n", ker_n, "Sample size n")->required();
  ker->add_option("--p", ker_p, "Dimension p")->required();
  ker->add_option("--t0", ker_t0, "Start of the time range");
  ker->add_option("--points", ker_points, "Number of equally spaced times in [t0, 1]")->check(CLI::PositiveNumber);
  ker->add_option("--f", ker_f, "Test function for --law lss: x, x2, x4, log");
  ker->add_option("--route", ker_route, "For --law lss: rectangle or circle")
      ->check(CLI::IsMember({"closed", "rectangle", "circle"}));
  ker->add_option("--class", ker_class, "real or complex")->check(CLI::IsMember({"real", "complex"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*crit) {
      const Dimensions dims(crit_n, crit_p);
      const auto grid = TimeGrid::canonical(dims.n, crit_t0);
      const auto id = statistic_from_string(crit_law);
      const auto cls = crit_class == "real" ? SymmetryClass::real : SymmetryClass::complex;
      const LimitLaw law = id == StatisticId::logdet ? law_logdet(dims, grid, cls) : statistic_law(id, dims, grid);
      const auto q = GpSampler(law, grid, crit_seed).sup_quantile(crit_alpha, crit_draws, threads);
      std::cout << "c_alpha=" << csv::fmt(q.value) << '\n'
                << "std_err=" << csv::fmt(q.std_error) << '\n'
                << "draws=" << q.draws << '\n'
                << "grid_size=" << q.grid_size << '\n';
    } else if (*test) {
      const auto batch = read_batch_csv(test_data);
      const Dimensions dims(batch.n(), batch.p());
      const auto grid = TimeGrid::canonical(dims.n, test_t0);
      const auto id = statistic_from_string(test_stat);
      const auto traj = trajectory(id, batch, dims, grid);
      const auto q = GpSampler(statistic_law(id, dims, grid), grid, test_seed)
                         .sup_quantile(test_alpha, test_draws, threads);
      const auto report = run_test(traj, q.value, test_alpha);
      print_report(std::cout, report, q);
      if (!test_out.empty()) {
        auto out = open_out(test_out);
        out << "t,value\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
          out << csv::fmt(grid.time(i)) << ',' << csv::fmt(traj.values[i]) << '\n';
      }
    } else if (*sim) {
      const Dimensions dims(sim_n, sim_p);
      const CovarianceSpec post{covariance_kind_from_string(sim_family), sim_param, sim_p};
      const ChangePointScenario scn =
          sim_tstar >= 1.0 ? ChangePointScenario{post, post, 1.0} : ChangePointScenario::change(post, sim_tstar);
      const auto batch = draw_sample(scn, dims, sim_seed, sim_stream);
      if (sim_out.empty()) {
        write_batch_csv(std::cout, batch);
      } else {
        auto out = open_out(sim_out);
        write_batch_csv(out, batch);
      }
    } else if (*fig) {
      ExperimentConfig cfg;
      cfg.dims = parse_dims(fig_dims);
      cfg.deltas = parse_list(fig_deltas, "--deltas");
      cfg.replications = fig_full ? 2000 : fig_reps;
      cfg.t_star = fig_tstar;
      cfg.t0 = fig_t0;
      cfg.alpha = fig_alpha;
      cfg.critval_draws = fig_draws;
      cfg.seed = fig_seed;
      cfg.statistic = statistic_from_string(fig_stat);
      cfg.threads = threads;
      if (!fig_cache.empty()) cfg.cache_dir = fig_cache;
      std::vector<Alternative> alts;
      if (fig_alt == "all")
        alts = {Alternative::diag_shift, Alternative::diag_shift_offdiag, Alternative::scaled_identity,
                Alternative::scaled_tridiag};
      else
        alts = {alternative_from_string(fig_alt)};
      std::filesystem::create_directories(fig_out);
      for (auto alt : alts) {
        cfg.alternative = alt;
        const auto curve = run_experiment(cfg);
        for (const auto& dims : cfg.dims) {
          std::vector<PowerRow> rows;
          for (const auto& r : curve.rows)
            if (r.n == dims.n && r.p == dims.p) rows.push_back(r);
          const auto path = std::filesystem::path(fig_out) /
                            ("power_" + std::string(to_string(alt)) + "_n" + std::to_string(dims.n) + "_p" +
                             std::to_string(dims.p) + ".csv");
          auto out = open_out(path.string());
          write_power_csv(out, rows);
          std::cout << path.string() << '\n';
        }
      }
    } else if (*mp) {
      const SpectralMeasure h(parse_atoms(mp_atoms));
      const auto re = parse_range(mp_re, "--grid-re");
      const auto im = parse_range(mp_im, "--grid-im");
      std::cout << "z_re,z_im,s_re,s_im,residual\n";
      for (int i = 0; i < re.count; ++i)
        for (int j = 0; j < im.count; ++j) {
          const cplx z(range_at(re, i), range_at(im, j));
          const auto v = companion_stieltjes(z, mp_t, mp_y, h);
          std::cout << csv::fmt(z.real()) << ',' << csv::fmt(z.imag()) << ',' << csv::fmt(v.s.real()) << ','
                    << csv::fmt(v.s.imag()) << ',' << csv::fmt(v.residual) << '\n';
        }
    } else if (*ker) {
      const Dimensions dims(ker_n, ker_p);
      const auto grid = TimeGrid::canonical(dims.n, ker_t0);
      const auto cls = ker_class == "real" ? SymmetryClass::real : SymmetryClass::complex;
      std::vector<double> ts;
      for (int i = 0; i < ker_points; ++i)
        ts.push_back(ker_points == 1 ? 1.0 : ker_t0 + (1.0 - ker_t0) * i / (ker_points - 1));
      if (ker_law == "trace-pair") {
        const auto law = law_trace_pair(dims, grid);
        std::cout << "t1,t2,mean_x_t1,mean_x2_t1,cov_x_x,cov_x2_x2,cov_x_x2\n";
        for (double a : ts)
          for (double b : ts)
            std::cout << csv::fmt(a) << ',' << csv::fmt(b) << ',' << csv::fmt(law.mean_x(a)) << ','
                      << csv::fmt(law.mean_x2(a)) << ',' << csv::fmt(law.cov_x_x(a, b)) << ','
                      << csv::fmt(law.cov_x2_x2(a, b)) << ',' << csv::fmt(law.cov_x_x2(a, b)) << '\n';
      } else if (ker_law == "lss") {
        const auto f = SpectralFunction::from_name(ker_f);
        const double y = dims.ratio();
        const auto h = SpectralMeasure::identity();
        std::cout << "t1,t2,mean_t1,cov\n";
        for (double a : ts) {
          const double mean = ker_route == "circle" ? circle_mean(f, a, y) : lss_mean_general(f, a, y, h);
          for (double b : ts) {
            const double c = ker_route == "circle" ? circle_cov(f, f, a, b, y, cls)
                                                   : lss_cov_general(f, f, a, b, y, h, cls);
            std::cout << csv::fmt(a) << ',' << csv::fmt(b) << ',' << csv::fmt(mean) << ',' << csv::fmt(c) << '\n';
          }
        }
      } else {
        const auto id = statistic_from_string(ker_law);
        const LimitLaw law = id == StatisticId::logdet ? law_logdet(dims, grid, cls) : statistic_law(id, dims, grid);
        std::cout << "t1,t2,mean_t1,cov\n";
        for (double a : ts)
          for (double b : ts)
            std::cout << csv::fmt(a) << ',' << csv::fmt(b) << ',' << csv::fmt(law.mean(a)) << ','
                      << csv::fmt(law.cov(a, b)) << '\n';
      }
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << " (residual " << e.residual() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
