// Command line front end: solve, generate, benchmark, warm-start sequences and KKT checks.
//
// Exit codes: 0 Optimal (or success), 2 PrimalInfeasible, 3 any other failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "daqp/daqp.hpp"
#include "daqp/harness.hpp"

namespace {

constexpr int exit_infeasible = 2;
constexpr int exit_failure    = 3;

std::string read_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) { throw std::runtime_error("cannot open " + path); }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string & path, const std::string & text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) { throw std::runtime_error("cannot write " + path); }
  out << text;
}

std::uint64_t default_seed()
{
  const char * env = std::getenv("DAQP_SEED");
  return env ? std::strtoull(env, nullptr, 10) : 0;
}

void print_vector(std::ostream & os, const char * label, const Eigen::VectorXd & v)
{
  os << label;
  for (const double x : v) { os << ' ' << daqp::harness::detail::format_double(x); }
  os << '\n';
}

int status_exit_code(daqp::SolveStatus s)
{
  switch (s) {
  case daqp::SolveStatus::Optimal: return 0;
  case daqp::SolveStatus::PrimalInfeasible: return exit_infeasible;
  default: return exit_failure;
  }
}

struct SolveArgs
{
  std::string problem;
  std::string warm;
  std::string out;
  bool prox = false;
  daqp::Settings settings;
};

int run_solve(const SolveArgs & args)
{
  using namespace daqp;
  const QProblem qp = harness::parse_problem(read_file(args.problem));
  SolveResult res;
  if (args.prox) {
    std::optional<Eigen::VectorXd> x0;
    if (!args.warm.empty()) { x0 = harness::parse_solution(read_file(args.warm)).x; }
    res = prox_solve(qp, args.settings, x0);
  } else {
    std::optional<WarmStart> warm;
    if (!args.warm.empty()) {
      warm = harness::warm_start_from(harness::parse_solution(read_file(args.warm)), qp.m(), qp.me());
    }
    res = solve(transform(qp), args.settings, warm);
  }

  std::cout << "status " << to_string(res.status) << '\n' << "iterations " << res.iterations << '\n';
  if (args.prox) { std::cout << "outer_iterations " << res.diagnostics.outer_iterations << '\n'; }
  if (!res.lower_bounds.empty()) {
    std::cout << "lower_bound " << harness::detail::format_double(res.lower_bounds.back()) << '\n';
  }
  std::cout << "objective " << harness::detail::format_double(qp.objective(res.x)) << '\n';
  print_vector(std::cout, "x", res.x);
  print_vector(std::cout, "lambda", res.lambda);
  if (qp.me() > 0) { print_vector(std::cout, "nu", res.nu); }
  if (res.certificate) { print_vector(std::cout, "certificate", res.certificate->lambda); }
  if (!args.out.empty()) { write_output(args.out, harness::write_solution(res)); }
  return status_exit_code(res.status);
}

int run_check(const std::string & problem, const std::string & solution)
{
  const daqp::QProblem qp = daqp::harness::parse_problem(read_file(problem));
  const auto sol          = daqp::harness::parse_solution(read_file(solution));
  const Eigen::VectorXd nu = sol.nu.size() == qp.me() ? sol.nu : Eigen::VectorXd::Zero(qp.me());
  const auto rep          = daqp::kkt_residual(qp, sol.x, sol.lambda, nu);
  using daqp::harness::detail::format_double;
  std::cout << "stationarity " << format_double(rep.stationarity) << '\n'
            << "primal_ineq " << format_double(rep.primal_ineq) << '\n'
            << "dual " << format_double(rep.dual) << '\n'
            << "complementarity " << format_double(rep.complementarity) << '\n'
            << "equality " << format_double(rep.equality) << '\n'
            << "stationarity_scale " << format_double(rep.stationarity_scale) << '\n'
            << "complementarity_scale " << format_double(rep.complementarity_scale) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Dense dual active-set QP solver"};
  app.require_subcommand(1);

  SolveArgs sargs;
  auto * solve_cmd = app.add_subcommand("solve", "solve a problem file");
  solve_cmd->add_option("problem", sargs.problem, "problem file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_flag("--prox", sargs.prox, "use proximal-point outer iterations");
  solve_cmd->add_option("--warm", sargs.warm, "solution file to warm start from")->check(CLI::ExistingFile);
  solve_cmd->add_option("--eps-primal", sargs.settings.eps_primal, "primal feasibility tolerance");
  solve_cmd->add_option("--eps", sargs.settings.prox_eps, "proximal regularization");
  solve_cmd->add_option("--eta", sargs.settings.prox_eta, "proximal termination tolerance");
  solve_cmd->add_option("--iter-max", sargs.settings.iter_max, "inner iteration limit");
  solve_cmd->add_option("--outer-max", sargs.settings.prox_outer_max, "outer iteration limit");
  solve_cmd->add_option("--out", sargs.out, "write a solution file");

  daqp::harness::GeneratorConfig gcfg;
  gcfg.seed = default_seed();
  bool infeasible = false;
  std::string gen_out;
  auto * gen_cmd = app.add_subcommand("gen", "write a random problem");
  gen_cmd->add_option("--n", gcfg.n, "variables");
  gen_cmd->add_option("--m", gcfg.m, "inequality rows");
  gen_cmd->add_option("--me", gcfg.me, "equality rows");
  gen_cmd->add_option("--kappa", gcfg.kappa, "condition number of H");
  gen_cmd->add_option("--seed", gcfg.seed, "seed (default: DAQP_SEED or 0)");
  gen_cmd->add_flag("--two-sided", gcfg.two_sided, "lower and upper bounds");
  gen_cmd->add_flag("--infeasible", infeasible, "append a contradictory pair of rows");
  gen_cmd->add_option("--out", gen_out, "output file (default stdout)");

  daqp::harness::BenchConfig bcfg;
  bcfg.seed = default_seed();
  std::vector<std::string> variants;
  std::string bench_out, summary_out;
  auto * bench_cmd = app.add_subcommand("bench", "conditioning sweep, CSV output");
  bench_cmd->add_option("--kappa", bcfg.kappas, "condition numbers (repeatable)");
  bench_cmd->add_option("--count", bcfg.count, "instances per condition number");
  bench_cmd->add_option("--n", bcfg.n, "variables");
  bench_cmd->add_option("--m", bcfg.m, "inequality rows");
  bench_cmd->add_option("--me", bcfg.me, "equality rows");
  bench_cmd->add_flag("--two-sided", bcfg.two_sided, "two-sided bounds");
  bench_cmd->add_option("--variant", variants, "plain and/or prox (default both)")
    ->check(CLI::IsMember({"plain", "prox"}));
  bench_cmd->add_option("--repeat", bcfg.repeat, "timing runs per instance (median reported)");
  bench_cmd->add_option("--seed", bcfg.seed, "seed (default: DAQP_SEED or 0)");
  bench_cmd->add_option("--threads", bcfg.threads, "worker threads");
  bench_cmd->add_option("--eps-primal", bcfg.settings.eps_primal, "primal feasibility tolerance");
  bench_cmd->add_option("--iter-max", bcfg.settings.iter_max, "inner iteration limit");
  bench_cmd->add_option("--out", bench_out, "record CSV (default stdout)");
  bench_cmd->add_option("--summary", summary_out, "summary CSV (default stderr)");

  std::string seq_problem, seq_out;
  daqp::harness::SequenceConfig qcfg;
  qcfg.seed = default_seed();
  auto * seq_cmd = app.add_subcommand("seq", "cold versus warm solves on a perturbed sequence");
  seq_cmd->add_option("problem", seq_problem, "base problem file")->required()->check(CLI::ExistingFile);
  seq_cmd->add_option("--steps", qcfg.steps, "sequence length");
  seq_cmd->add_option("--scale", qcfg.perturb_scale, "relative perturbation size");
  seq_cmd->add_option("--seed", qcfg.seed, "seed (default: DAQP_SEED or 0)");
  seq_cmd->add_option("--out", seq_out, "CSV output (default stdout)");

  std::string check_problem, check_solution;
  auto * check_cmd = app.add_subcommand("check", "KKT residuals of a solution file");
  check_cmd->add_option("problem", check_problem, "problem file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("solution", check_solution, "solution file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) { return run_solve(sargs); }
    if (*gen_cmd) {
      gcfg.feasible = !infeasible;
      write_output(gen_out, daqp::harness::write_problem(daqp::harness::generate_random(gcfg)));
      return 0;
    }
    if (*bench_cmd) {
      if (!variants.empty()) {
        bcfg.variants.clear();
        for (const auto & v : variants) {
          bcfg.variants.push_back(v == "plain" ? daqp::harness::Variant::plain : daqp::harness::Variant::prox);
        }
      }
      const auto report = daqp::harness::run_benchmark(bcfg);
      write_output(bench_out, daqp::harness::to_csv(report.records));
      const std::string summary = daqp::harness::to_csv(report.summary);
      if (summary_out.empty()) {
        std::cerr << summary;
      } else {
        write_output(summary_out, summary);
      }
      return 0;
    }
    if (*seq_cmd) {
      const auto base = daqp::harness::parse_problem(read_file(seq_problem));
      write_output(seq_out, daqp::harness::to_csv(daqp::harness::run_sequence(base, qcfg)));
      return 0;
    }
    if (*check_cmd) { return run_check(check_problem, check_solution); }
  } catch (const std::exception & err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_failure;
  }
  return exit_failure;
}
