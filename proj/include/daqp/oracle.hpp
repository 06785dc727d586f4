#ifndef DAQP__ORACLE_HPP_
#define DAQP__ORACLE_HPP_

/**
 * @file
 * @brief Reference machinery independent of the solver: KKT residuals and an active-set
 * enumeration solver for small problems.
 */

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "problem.hpp"

namespace daqp {

/// Optimality residuals of a primal-dual pair.
struct KKTReport
{
  /// |H x + A^T lambda + G^T nu + f|_inf
  double stationarity = 0;
  /// largest bound violation of A x
  double primal_ineq = 0;
  /// largest sign violation of lambda (lambda_i < 0 on a one-sided row, or a multiplier on an infinite bound)
  double dual = 0;
  /// largest |slack_i lambda_i| against the bound the sign of lambda_i selects
  double complementarity = 0;
  /// |G x - h|_inf
  double equality = 0;

  /// 1 + max(|Hx|, |f|, |A^T lambda|, |G^T nu|), reference magnitude for stationarity
  double stationarity_scale = 1;
  /// (1 + |lambda|)(1 + |b|), reference magnitude for complementarity (finite bounds only)
  double complementarity_scale = 1;
};

/**
 * @brief Residuals of the optimality conditions of qp at (x, lambda, nu).
 *
 * Two-sided rows: lambda_i > 0 pairs with the upper bound, lambda_i < 0 with the lower bound.
 */
inline KKTReport kkt_residual(
  const QProblem & qp, const Eigen::VectorXd & x, const Eigen::VectorXd & lambda, const Eigen::VectorXd & nu)
{
  if (x.size() != qp.n() || lambda.size() != qp.m() || nu.size() != qp.me()) {
    throw Error(ErrorCode::DimensionMismatch, "kkt_residual: dimensions do not match");
  }
  const auto inf_norm = [](const Eigen::VectorXd & v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; };
  const auto finite_norm = [](const Eigen::VectorXd & v) {
    double out = 0;
    for (const double vi : v) {
      if (std::isfinite(vi)) { out = std::max(out, std::abs(vi)); }
    }
    return out;
  };

  KKTReport rep;
  const Eigen::VectorXd Hx  = qp.H * x;
  const Eigen::VectorXd Atl = qp.m() > 0 ? Eigen::VectorXd(qp.A.transpose() * lambda) : Eigen::VectorXd::Zero(qp.n());
  const Eigen::VectorXd Gtn = qp.me() > 0 ? Eigen::VectorXd(qp.G.transpose() * nu) : Eigen::VectorXd::Zero(qp.n());
  rep.stationarity          = inf_norm(Hx + Atl + Gtn + qp.f);
  rep.stationarity_scale    = 1 + std::max({inf_norm(Hx), inf_norm(qp.f), inf_norm(Atl), inf_norm(Gtn)});

  const Eigen::VectorXd Ax = qp.m() > 0 ? Eigen::VectorXd(qp.A * x) : Eigen::VectorXd();
  for (Eigen::Index i = 0; i < qp.m(); ++i) {
    const double upper_slack = qp.bu(i) - Ax(i);
    const double lower_slack = qp.two_sided ? Ax(i) - qp.bl(i) : std::numeric_limits<double>::infinity();
    rep.primal_ineq          = std::max({rep.primal_ineq, -upper_slack, -lower_slack});

    const double li = lambda(i);
    if (li > 0) {
      if (std::isfinite(qp.bu(i))) {
        rep.complementarity = std::max(rep.complementarity, std::abs(upper_slack * li));
      } else {
        rep.dual = std::max(rep.dual, li);
      }
    } else if (li < 0) {
      if (qp.two_sided && std::isfinite(qp.bl(i))) {
        rep.complementarity = std::max(rep.complementarity, std::abs(lower_slack * li));
      } else {
        rep.dual = std::max(rep.dual, -li);
      }
    }
  }
  rep.primal_ineq = std::max(rep.primal_ineq, 0.0);
  double bnorm    = finite_norm(qp.bu);
  if (qp.two_sided) { bnorm = std::max(bnorm, finite_norm(qp.bl)); }
  rep.complementarity_scale = (1 + inf_norm(lambda)) * (1 + bnorm);

  if (qp.me() > 0) { rep.equality = inf_norm(qp.G * x - qp.h); }
  return rep;
}

struct OracleSolution
{
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
  /// active inequality rows, with +1 for upper and -1 for lower
  std::vector<std::pair<Eigen::Index, int>> active;
};

/**
 * @brief Solve a small strictly convex QP by enumerating candidate active sets.
 *
 * Candidates are visited by increasing size, rows in lexicographic order and the upper bound
 * before the lower one. Each candidate's equality constrained KKT system is solved densely and
 * the first point satisfying all optimality conditions within 1e-9 (relative) is returned.
 * Throws NoFeasibleCandidate if none does.
 */
inline OracleSolution brute_force_solve(const QProblem & qp)
{
  qp.validate();
  const Eigen::Index n = qp.n(), m = qp.m(), me = qp.me();
  constexpr double tol = 1e-9;

  const double data_scale = 1 + std::max({qp.H.cwiseAbs().maxCoeff(), qp.f.size() ? qp.f.cwiseAbs().maxCoeff() : 0.0});

  std::vector<std::pair<Eigen::Index, int>> chosen;
  std::optional<OracleSolution> found;

  const auto try_candidate = [&]() {
    const Eigen::Index k = static_cast<Eigen::Index>(chosen.size());
    const Eigen::Index sz = n + me + k;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(sz, sz);
    Eigen::VectorXd rhs(sz);
    K.topLeftCorner(n, n) = qp.H;
    rhs.head(n)           = -qp.f;
    for (Eigen::Index r = 0; r < me; ++r) {
      K.block(n + r, 0, 1, n) = qp.G.row(r);
      K.block(0, n + r, n, 1) = qp.G.row(r).transpose();
      rhs(n + r)              = qp.h(r);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto [row, sign]           = chosen[static_cast<std::size_t>(c)];
      K.block(n + me + c, 0, 1, n)     = qp.A.row(row);
      K.block(0, n + me + c, n, 1)     = qp.A.row(row).transpose();
      rhs(n + me + c)                  = sign > 0 ? qp.bu(row) : qp.bl(row);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) { return false; }
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) { return false; }  // an infinite bound was selected
    const Eigen::VectorXd x   = sol.head(n);

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto [row, sign] = chosen[static_cast<std::size_t>(c)];
      const double y         = sol(n + me + c);
      if (sign * y < -tol * data_scale) { return false; }
      lambda(row) = y;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ax = qp.A.row(i).dot(x);
      const double ptol = tol * (1 + std::abs(ax) + std::abs(qp.bu(i)));
      if (ax - qp.bu(i) > ptol) { return false; }
      if (qp.two_sided && qp.bl(i) - ax > tol * (1 + std::abs(ax) + std::abs(qp.bl(i)))) { return false; }
    }
    found = OracleSolution{x, lambda, sol.segment(n, me), chosen};
    return true;
  };

  // Depth-first over combinations of a fixed size, lexicographic.
  const std::function<bool(Eigen::Index, Eigen::Index)> visit = [&](Eigen::Index start, Eigen::Index remaining) {
    if (remaining == 0) { return try_candidate(); }
    for (Eigen::Index i = start; i <= m - remaining; ++i) {
      for (const int sign : {1, -1}) {
        if (sign < 0 && !qp.two_sided) { continue; }
        chosen.emplace_back(i, sign);
        const bool done = visit(i + 1, remaining - 1);
        chosen.pop_back();
        if (done) { return true; }
      }
    }
    return false;
  };

  for (Eigen::Index k = 0; k + me <= n && k <= m; ++k) {
    if (visit(0, k)) { return *found; }
  }
  throw Error(ErrorCode::NoFeasibleCandidate, "brute_force_solve: no candidate active set satisfies KKT");
}

}  // namespace daqp

#endif  // DAQP__ORACLE_HPP_
