#ifndef DAQP__PROX_HPP_
#define DAQP__PROX_HPP_

/**
 * @file
 * @brief Outer proximal-point iterations around the dual active-set solver.
 */

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>

#include "problem.hpp"
#include "settings.hpp"
#include "solver.hpp"

namespace daqp {

/// Outer iteration state, exposed to the optional observer of prox_solve().
struct ProxState
{
  Eigen::VectorXd x;
  int outer_k = 0;
  SolveResult last_result;
};

/**
 * @brief Solve qp through a sequence of problems with Hessian H + eps I and linear term
 * f - eps x_k.
 *
 * H + eps I is factored once and the inner solver keeps its working set and LDL^T factor across
 * outer passes; only v and d are recomputed. Terminates when |x_{k+1} - x_k|_2 < eta.
 * The returned diagnostics carry the number of outer passes and the inner factorization count;
 * iterations sums the inner iterations.
 */
template<typename Callback = std::nullptr_t>
SolveResult prox_solve(
  const QProblem & qp,
  const Settings & settings = {},
  const std::optional<Eigen::VectorXd> & x0 = {},
  Callback && on_outer = nullptr)
{
  settings.validate();
  const double eps = settings.prox_eps;
  Solver solver(transform(qp, eps), settings);

  ProxState state;
  state.x = x0 ? *x0 : Eigen::VectorXd::Zero(qp.n());
  if (state.x.size() != qp.n()) { throw Error(ErrorCode::DimensionMismatch, "prox_solve: x0 has wrong length"); }

  int inner_total = 0;
  while (true) {
    solver.set_linear_terms(qp.f - eps * state.x, qp.bu, qp.bl, qp.h);
    SolveResult res = solver.solve();
    inner_total += res.iterations;
    ++state.outer_k;

    const double step = (res.x - state.x).norm();
    state.x           = res.x;
    state.last_result = res;
    if constexpr (!std::is_same_v<std::decay_t<Callback>, std::nullptr_t>) { on_outer(std::as_const(state)); }

    const bool done = res.status != SolveStatus::Optimal || step < settings.prox_eta
                      || state.outer_k >= settings.prox_outer_max;
    if (done) {
      if (res.status == SolveStatus::Optimal && step >= settings.prox_eta) { res.status = SolveStatus::IterationLimit; }
      res.iterations                    = inner_total;
      res.diagnostics.outer_iterations  = state.outer_k;
      res.diagnostics.factorizations    = solver.factorizations();
      return res;
    }
  }
}

}  // namespace daqp

#endif  // DAQP__PROX_HPP_
