#ifndef DAQP__HARNESS__BENCHMARK_HPP_
#define DAQP__HARNESS__BENCHMARK_HPP_

/**
 * @file
 * @brief Conditioning sweep: plain and proximal solves on random problems, with worst-case
 * summaries per condition number.
 *
 * Record CSV columns, in order:
 *
 *     variant,kappa,instance,n,m,me,status,iterations,outer_iterations,time_s,err_x,
 *     stationarity,primal,dual,complementarity,equality,bound_gap
 *
 * `time_s` is the median wall time of transform + solve over `repeat` runs and is the only
 * nondeterministic column. `err_x` is |x - x_ref|_2. `bound_gap` is J(x) minus the last lower
 * bound (plain variant; `nan` for prox, whose bounds refer to the regularized problem).
 *
 * Summary CSV columns: variant,kappa,count,optimal,worst_time_s,worst_err_x
 */

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "../oracle.hpp"
#include "../problem.hpp"
#include "../prox.hpp"
#include "../settings.hpp"
#include "../solver.hpp"
#include "generator.hpp"
#include "problem_io.hpp"
#include "rng.hpp"

namespace daqp::harness {

enum class Variant { plain, prox };

inline constexpr std::string_view to_string(Variant v) noexcept { return v == Variant::plain ? "plain" : "prox"; }

struct BenchConfig
{
  std::vector<double> kappas;
  int count = 100;
  Eigen::Index n = 25;
  Eigen::Index m = 100;
  Eigen::Index me = 0;
  bool two_sided = false;
  std::vector<Variant> variants{Variant::plain, Variant::prox};
  int repeat = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Settings settings;
};

struct BenchRecord
{
  Variant variant = Variant::plain;
  double kappa = 1;
  int instance = 0;
  Eigen::Index n = 0, m = 0, me = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  int outer_iterations = 0;
  double time_s = 0;
  double err_x = 0;
  KKTReport kkt;
  double bound_gap = std::numeric_limits<double>::quiet_NaN();
};

struct BenchSummary
{
  Variant variant = Variant::plain;
  double kappa = 1;
  int count = 0;
  int optimal = 0;
  double worst_time_s = 0;
  double worst_err_x = 0;
};

struct BenchReport
{
  std::vector<BenchRecord> records;
  std::vector<BenchSummary> summary;
};

/// Seed of instance `instance` in the `kappa_index`-th sweep entry.
inline std::uint64_t instance_seed(std::uint64_t base, std::size_t kappa_index, int instance)
{
  return mix_seed(base ^ mix_seed((static_cast<std::uint64_t>(kappa_index) << 32) | static_cast<std::uint32_t>(instance)));
}

/// Reference solution: enumeration when small enough, else a tightly converged proximal solve.
inline Eigen::VectorXd reference_solution(const QProblem & qp, const Settings & settings)
{
  if (qp.n() <= 8 && qp.m() <= 14) {
    try {
      return brute_force_solve(qp).x;
    } catch (const Error &) {
    }
  }
  Settings tight       = settings;
  tight.prox_eps       = 1e-6;
  tight.prox_eta       = 1e-10;
  tight.prox_outer_max = 1000;
  return prox_solve(qp, tight).x;
}

inline SolveResult run_variant(const QProblem & qp, Variant variant, const Settings & settings)
{
  try {
    if (variant == Variant::plain) { return solve(transform(qp), settings); }
    return prox_solve(qp, settings);
  } catch (const Error &) {
    SolveResult failed;
    failed.status = SolveStatus::NumericalFailure;
    failed.x      = Eigen::VectorXd::Constant(qp.n(), std::numeric_limits<double>::quiet_NaN());
    failed.lambda = Eigen::VectorXd::Zero(qp.m());
    failed.nu     = Eigen::VectorXd::Zero(qp.me());
    return failed;
  }
}

inline BenchRecord bench_instance(const QProblem & qp, const Eigen::VectorXd & x_ref, Variant variant, const BenchConfig & cfg)
{
  BenchRecord rec;
  rec.variant = variant;
  rec.n       = qp.n();
  rec.m       = qp.m();
  rec.me      = qp.me();

  std::vector<double> times;
  SolveResult res;
  for (int r = 0; r < std::max(1, cfg.repeat); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    res           = run_variant(qp, variant, cfg.settings);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  rec.time_s           = times[times.size() / 2];
  rec.status           = res.status;
  rec.iterations       = res.iterations;
  rec.outer_iterations = res.diagnostics.outer_iterations;
  rec.err_x            = (res.x - x_ref).norm();
  rec.kkt              = kkt_residual(qp, res.x, res.lambda, res.nu);
  if (variant == Variant::plain && !res.lower_bounds.empty()) {
    rec.bound_gap = qp.objective(res.x) - res.lower_bounds.back();
  }
  return rec;
}

inline BenchReport run_benchmark(const BenchConfig & cfg)
{
  struct Job
  {
    std::size_t kappa_index;
    int instance;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < cfg.kappas.size(); ++k) {
    for (int i = 0; i < cfg.count; ++i) { jobs.push_back({k, i}); }
  }

  const std::size_t nv = cfg.variants.size();
  std::vector<BenchRecord> records(jobs.size() * nv);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto [k, i] = jobs[j];
      GeneratorConfig gc;
      gc.n         = cfg.n;
      gc.m         = cfg.m;
      gc.me        = cfg.me;
      gc.kappa     = cfg.kappas[k];
      gc.two_sided = cfg.two_sided;
      gc.seed      = instance_seed(cfg.seed, k, i);
      const QProblem qp          = generate_random(gc);
      const Eigen::VectorXd xref = reference_solution(qp, cfg.settings);
      for (std::size_t v = 0; v < nv; ++v) {
        BenchRecord rec = bench_instance(qp, xref, cfg.variants[v], cfg);
        rec.kappa       = cfg.kappas[k];
        rec.instance    = i;
        records[j * nv + v] = rec;
      }
    }
  };
  const unsigned nthreads = std::max(1u, cfg.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) { pool.emplace_back(worker); }
    for (auto & th : pool) { th.join(); }
  }

  BenchReport report;
  report.records = std::move(records);
  for (std::size_t k = 0; k < cfg.kappas.size(); ++k) {
    for (const Variant v : cfg.variants) {
      BenchSummary s;
      s.variant = v;
      s.kappa   = cfg.kappas[k];
      for (const auto & rec : report.records) {
        if (rec.variant != v || rec.kappa != cfg.kappas[k]) { continue; }
        ++s.count;
        s.optimal += rec.status == SolveStatus::Optimal;
        s.worst_time_s = std::max(s.worst_time_s, rec.time_s);
        s.worst_err_x  = std::isfinite(rec.err_x) ? std::max(s.worst_err_x, rec.err_x)
                                                  : std::numeric_limits<double>::infinity();
      }
      report.summary.push_back(s);
    }
  }
  return report;
}

inline constexpr std::string_view bench_csv_header =
  "variant,kappa,instance,n,m,me,status,iterations,outer_iterations,time_s,err_x,"
  "stationarity,primal,dual,complementarity,equality,bound_gap";

inline std::string to_csv(const std::vector<BenchRecord> & records)
{
  using detail::format_double;
  std::ostringstream os;
  os << bench_csv_header << '\n';
  for (const auto & r : records) {
    os << to_string(r.variant) << ',' << format_double(r.kappa) << ',' << r.instance << ',' << r.n << ',' << r.m << ','
       << r.me << ',' << to_string(r.status) << ',' << r.iterations << ',' << r.outer_iterations << ','
       << format_double(r.time_s) << ',' << format_double(r.err_x) << ',' << format_double(r.kkt.stationarity) << ','
       << format_double(r.kkt.primal_ineq) << ',' << format_double(r.kkt.dual) << ','
       << format_double(r.kkt.complementarity) << ',' << format_double(r.kkt.equality) << ','
       << format_double(r.bound_gap) << '\n';
  }
  return os.str();
}

inline std::string to_csv(const std::vector<BenchSummary> & summary)
{
  using detail::format_double;
  std::ostringstream os;
  os << "variant,kappa,count,optimal,worst_time_s,worst_err_x\n";
  for (const auto & s : summary) {
    os << to_string(s.variant) << ',' << format_double(s.kappa) << ',' << s.count << ',' << s.optimal << ','
       << format_double(s.worst_time_s) << ',' << format_double(s.worst_err_x) << '\n';
  }
  return os.str();
}

}  // namespace daqp::harness

#endif  // DAQP__HARNESS__BENCHMARK_HPP_
