#ifndef DAQP__PROBLEM_HPP_
#define DAQP__PROBLEM_HPP_

/**
 * @file
 * @brief Primal problem container and its transformation to dual data.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace daqp {

/**
 * @brief Dense convex quadratic program.
 *
 * \f[
 * \begin{cases}
 *  \min_{x} & \frac{1}{2} x^T H x + f^T x, \\
 *  \text{s.t.} & A x \leq b_u \quad (\text{or } b_l \leq A x \leq b_u), \\
 *              & G x = h.
 * \end{cases}
 * \f]
 *
 * With one-sided constraints `bl` is empty.
 */
struct QProblem
{
  Eigen::MatrixXd H;
  Eigen::VectorXd f;

  Eigen::MatrixXd A;
  /// Upper bound (the only bound when one-sided)
  Eigen::VectorXd bu;
  /// Lower bound, used only when `two_sided`
  Eigen::VectorXd bl;
  bool two_sided = false;

  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  [[nodiscard]] Eigen::Index n() const { return H.rows(); }
  [[nodiscard]] Eigen::Index m() const { return A.rows(); }
  [[nodiscard]] Eigen::Index me() const { return G.rows(); }

  /// Objective value at x.
  [[nodiscard]] double objective(const Eigen::VectorXd & x) const { return 0.5 * x.dot(H * x) + f.dot(x); }

  /// Throws DimensionMismatch, NotSymmetric or TriviallyInfeasible.
  void validate() const
  {
    const Eigen::Index nn = n();
    if (H.cols() != nn || f.size() != nn) {
      throw Error(ErrorCode::DimensionMismatch, "H must be n x n and f of length n");
    }
    if (A.cols() != nn && m() > 0) { throw Error(ErrorCode::DimensionMismatch, "A must have n columns"); }
    if (bu.size() != m()) { throw Error(ErrorCode::DimensionMismatch, "upper bound must have length m"); }
    if (two_sided && bl.size() != m()) {
      throw Error(ErrorCode::DimensionMismatch, "lower bound must have length m");
    }
    if (!two_sided && bl.size() != 0) {
      throw Error(ErrorCode::DimensionMismatch, "one-sided problem carries a lower bound");
    }
    if ((G.cols() != nn && me() > 0) || h.size() != me()) {
      throw Error(ErrorCode::DimensionMismatch, "G must be me x n and h of length me");
    }
    const double hmax = nn > 0 ? std::max(1.0, H.cwiseAbs().maxCoeff()) : 1.0;
    if (nn > 0 && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * hmax) {
      throw Error(ErrorCode::NotSymmetric, "H is not symmetric");
    }
    if (two_sided) {
      for (Eigen::Index i = 0; i < m(); ++i) {
        if (bl(i) > bu(i)) {
          throw Error(ErrorCode::TriviallyInfeasible, "lower bound exceeds upper bound in row " + std::to_string(i));
        }
      }
    }
  }
};

/**
 * @brief Dual problem data.
 *
 * With \f$ H + \epsilon I = R^T R \f$: \f$ M = A R^{-1} \f$, \f$ v = R^{-T} f \f$,
 * \f$ d^+ = b_u + M v \f$, \f$ d^- = -(b_l + M v) \f$, \f$ N = G R^{-1} \f$ and
 * \f$ e = h + N v \f$. For one-sided problems `d` holds \f$ b + M v \f$ and `dminus` is empty.
 */
struct LDProblem
{
  /// Upper Cholesky factor; M, N, v and x are formed by triangular solves against it.
  Eigen::MatrixXd R;
  Eigen::MatrixXd Rinv;
  Eigen::MatrixXd M;
  Eigen::VectorXd v;
  /// d (one-sided) or d+ (two-sided)
  Eigen::VectorXd d;
  Eigen::VectorXd dminus;
  bool two_sided = false;

  Eigen::MatrixXd N;
  Eigen::VectorXd e;

  double epsilon_used = 0;

  [[nodiscard]] Eigen::Index n() const { return Rinv.rows(); }
  [[nodiscard]] Eigen::Index m() const { return M.rows(); }
  [[nodiscard]] Eigen::Index me() const { return N.rows(); }
};

struct CholeskyFactors
{
  /// Upper triangular R with R^T R = H + reg I
  Eigen::MatrixXd R;
  Eigen::MatrixXd Rinv;
};

/// Upper Cholesky factor of H + reg I and its inverse. Throws NotPositiveDefinite.
inline CholeskyFactors cholesky_upper(const Eigen::MatrixXd & H, double reg = 0)
{
  const Eigen::Index n = H.rows();
  if (H.cols() != n) { throw Error(ErrorCode::DimensionMismatch, "cholesky_upper: H is not square"); }
  const double scale = n > 0 ? std::max(1.0, H.cwiseAbs().maxCoeff() + reg) : 1.0;

  CholeskyFactors out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  Eigen::MatrixXd & R = out.R;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = H(j, j) + reg;
    for (Eigen::Index k = 0; k < j; ++k) { pivot -= R(k, j) * R(k, j); }
    if (!(pivot > 1e-12 * scale)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky_upper: pivot " + std::to_string(pivot) + " at " + std::to_string(j));
    }
    const double rjj = std::sqrt(pivot);
    R(j, j)          = rjj;
    for (Eigen::Index c = j + 1; c < n; ++c) {
      double acc = H(j, c);
      for (Eigen::Index k = 0; k < j; ++k) { acc -= R(k, j) * R(k, c); }
      R(j, c) = acc / rjj;
    }
  }

  // Back substitution column by column: R Rinv = I.
  Eigen::MatrixXd & Rinv = out.Rinv;
  for (Eigen::Index c = 0; c < n; ++c) {
    Rinv(c, c) = 1.0 / R(c, c);
    for (Eigen::Index r = c; r-- > 0;) {
      double acc = 0;
      for (Eigen::Index k = r + 1; k <= c; ++k) { acc += R(r, k) * Rinv(k, c); }
      Rinv(r, c) = -acc / R(r, r);
    }
  }
  return out;
}

/**
 * @brief Recompute the data-dependent dual terms v, d (d+, d-) and e.
 *
 * M, N, R and Rinv are copied unchanged, so any factorization built on them stays valid.
 * For one-sided problems `bl` must be empty.
 */
inline LDProblem update_linear_terms(
  const LDProblem & ldp,
  const Eigen::VectorXd & f,
  const Eigen::VectorXd & bu,
  const Eigen::VectorXd & bl,
  const Eigen::VectorXd & h)
{
  if (f.size() != ldp.n() || bu.size() != ldp.m() || h.size() != ldp.me()
      || bl.size() != (ldp.two_sided ? ldp.m() : 0)) {
    throw Error(ErrorCode::DimensionMismatch, "update_linear_terms: dimensions do not match");
  }
  LDProblem out = ldp;
  out.v         = ldp.R.size() > 0 ? Eigen::VectorXd(ldp.R.triangularView<Eigen::Upper>().transpose().solve(f))
                                     : Eigen::VectorXd(ldp.Rinv.transpose() * f);
  const Eigen::VectorXd Mv = ldp.M * out.v;
  out.d                    = bu + Mv;
  if (ldp.two_sided) {
    out.dminus = -(bl + Mv);
  } else {
    out.dminus.resize(0);
  }
  out.e = h + ldp.N * out.v;
  return out;
}

/// Dual data for qp with H regularized by reg. Throws NotPositiveDefinite or TriviallyInfeasible.
inline LDProblem transform(const QProblem & qp, double reg = 0)
{
  qp.validate();
  const CholeskyFactors chol = cholesky_upper(qp.H, reg);

  LDProblem ldp;
  ldp.R            = chol.R;
  ldp.Rinv         = chol.Rinv;
  ldp.two_sided    = qp.two_sided;
  ldp.epsilon_used = reg;
  // X R^{-1} as the transpose of R^{-T} X^T; multiplying by the explicit inverse loses accuracy once R is ill-conditioned
  const auto right_solve = [&](const Eigen::MatrixXd & X) -> Eigen::MatrixXd {
    if (X.rows() == 0) { return Eigen::MatrixXd(0, qp.n()); }
    return chol.R.triangularView<Eigen::Upper>().transpose().solve(X.transpose()).transpose();
  };
  ldp.M = right_solve(qp.A);
  ldp.N = right_solve(qp.G);
  return update_linear_terms(ldp, qp.f, qp.bu, qp.bl, qp.h);
}

/**
 * @brief Primal point from dual multipliers: x = -R^{-1} (M^T lambda + N^T nu + v).
 *
 * `lambda` is full length m (zero outside the working set).
 */
inline Eigen::VectorXd recover_primal(const LDProblem & ldp, const Eigen::VectorXd & lambda, const Eigen::VectorXd & nu)
{
  if (lambda.size() != ldp.m() || nu.size() != ldp.me()) {
    throw Error(ErrorCode::DimensionMismatch, "recover_primal: multiplier lengths do not match");
  }
  Eigen::VectorXd u = ldp.v;
  if (ldp.m() > 0) { u.noalias() += ldp.M.transpose() * lambda; }
  if (ldp.me() > 0) { u.noalias() += ldp.N.transpose() * nu; }
  if (ldp.R.size() == 0) { return -(ldp.Rinv * u); }
  return -ldp.R.triangularView<Eigen::Upper>().solve(u);
}

}  // namespace daqp

#endif  // DAQP__PROBLEM_HPP_
