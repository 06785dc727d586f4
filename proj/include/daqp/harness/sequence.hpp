#ifndef DAQP__HARNESS__SEQUENCE_HPP_
#define DAQP__HARNESS__SEQUENCE_HPP_

/**
 * @file
 * @brief Sequences of problems sharing H, A and G (as in MPC): cold versus warm started solves.
 *
 * CSV columns: step,cold_status,cold_iterations,warm_status,warm_iterations,x_diff
 */

#include <Eigen/Core>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "../problem.hpp"
#include "../settings.hpp"
#include "../solver.hpp"
#include "problem_io.hpp"
#include "rng.hpp"

namespace daqp::harness {

struct SequenceConfig
{
  int steps = 50;
  /// perturbation size relative to 1 + |f|_inf (resp. 1 + |b|_inf) of the base problem
  double perturb_scale = 0.01;
  std::uint64_t seed = 0;
  Settings settings;
};

struct SequenceRecord
{
  int step = 0;
  SolveStatus cold_status = SolveStatus::NumericalFailure;
  int cold_iterations = 0;
  SolveStatus warm_status = SolveStatus::NumericalFailure;
  int warm_iterations = 0;
  /// |x_cold - x_warm|_inf
  double x_diff = 0;
};

/**
 * @brief Random walk on (f, b) starting from `base`.
 *
 * Step 0 solves the base problem; step k > 0 adds scale (1 + |f0|) g_f to f and
 * scale (1 + |b0|) g_b to both bounds. The cold solve starts from lambda = 0; the warm solve
 * continues from the previous step's working set and factorization.
 */
inline std::vector<SequenceRecord> run_sequence(const QProblem & base, const SequenceConfig & cfg)
{
  const LDProblem base_ldp = transform(base);
  Rng rng(cfg.seed);
  const auto inf_norm = [](const Eigen::VectorXd & v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  const double f_scale = cfg.perturb_scale * (1 + inf_norm(base.f));
  const double b_scale = cfg.perturb_scale * (1 + inf_norm(base.bu));

  Eigen::VectorXd f = base.f, bu = base.bu, bl = base.bl;
  Solver warm(base_ldp, cfg.settings);
  std::vector<SequenceRecord> out;
  for (int step = 0; step < cfg.steps; ++step) {
    if (step > 0) {
      f += f_scale * rng.normal_vector(f.size());
      const Eigen::VectorXd shift = b_scale * rng.normal_vector(bu.size());
      bu += shift;
      if (base.two_sided) { bl += shift; }
    }
    const LDProblem ldp = update_linear_terms(base_ldp, f, bu, bl, base.h);

    SequenceRecord rec;
    rec.step              = step;
    const SolveResult cold = solve(ldp, cfg.settings);
    rec.cold_status       = cold.status;
    rec.cold_iterations   = cold.iterations;

    warm.set_problem_data(ldp);
    const SolveResult hot = warm.solve();
    rec.warm_status       = hot.status;
    rec.warm_iterations   = hot.iterations;
    rec.x_diff            = (cold.x - hot.x).cwiseAbs().maxCoeff();
    if (hot.status != SolveStatus::Optimal) { warm.reset(); }
    out.push_back(rec);
  }
  return out;
}

inline std::string to_csv(const std::vector<SequenceRecord> & records)
{
  std::ostringstream os;
  os << "step,cold_status,cold_iterations,warm_status,warm_iterations,x_diff\n";
  for (const auto & r : records) {
    os << r.step << ',' << to_string(r.cold_status) << ',' << r.cold_iterations << ',' << to_string(r.warm_status)
       << ',' << r.warm_iterations << ',' << detail::format_double(r.x_diff) << '\n';
  }
  return os.str();
}

}  // namespace daqp::harness

#endif  // DAQP__HARNESS__SEQUENCE_HPP_
