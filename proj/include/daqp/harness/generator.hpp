#ifndef DAQP__HARNESS__GENERATOR_HPP_
#define DAQP__HARNESS__GENERATOR_HPP_

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <cstdint>

#include "../error.hpp"
#include "../problem.hpp"
#include "rng.hpp"

namespace daqp::harness {

struct GeneratorConfig
{
  Eigen::Index n = 6;
  Eigen::Index m = 10;
  Eigen::Index me = 0;
  /// target condition number of H
  double kappa = 1;
  std::uint64_t seed = 0;
  bool two_sided = false;
  bool feasible = true;
};

/**
 * @brief Random QP with cond(H) = kappa.
 *
 * Draw order: Gaussian n x n matrix (its Householder Q gives the eigenvectors), A, G, f, x0, then
 * slacks. H = Q diag(kappa^(i/(n-1))) Q^T, f scaled by sqrt(kappa), b = A x0 + |s| (two-sided:
 * bu = A x0 + |s+|, bl = A x0 - |s-|), h = G x0, so x0 is feasible. An infeasible problem gets
 * two extra rows that contradict each other along a random direction a:
 * a^T x <= beta and -a^T x <= -beta - 1 (two-sided: a^T x in [beta - 1 - |t|, beta] and in
 * [beta + 1, beta + 2 + |t|]).
 */
inline QProblem generate_random(const GeneratorConfig & cfg)
{
  if (cfg.n < 1 || cfg.m < 0 || cfg.me < 0 || !(cfg.kappa >= 1)) {
    throw Error(ErrorCode::InvalidSettings, "generate_random: need n >= 1, m, me >= 0 and kappa >= 1");
  }
  Rng rng(cfg.seed);
  const Eigen::Index n = cfg.n, m = cfg.m, me = cfg.me;

  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(rng.normal_matrix(n, n)).householderQ();
  Eigen::VectorXd eig(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    eig(i) = n == 1 ? 1.0 : std::pow(cfg.kappa, static_cast<double>(i) / static_cast<double>(n - 1));
  }

  QProblem qp;
  qp.H = Q * eig.asDiagonal() * Q.transpose();
  qp.H = 0.5 * (qp.H + qp.H.transpose()).eval();
  qp.A = rng.normal_matrix(m, n);
  qp.G = rng.normal_matrix(me, n);
  qp.f = std::sqrt(cfg.kappa) * rng.normal_vector(n);

  const Eigen::VectorXd x0 = rng.normal_vector(n);
  const Eigen::VectorXd Ax = qp.A * x0;
  qp.two_sided             = cfg.two_sided;
  qp.bu                    = Ax + rng.normal_vector(m).cwiseAbs();
  if (cfg.two_sided) { qp.bl = Ax - rng.normal_vector(m).cwiseAbs(); }
  qp.h = qp.G * x0;

  if (!cfg.feasible) {
    const Eigen::VectorXd a = rng.normal_vector(n);
    const double beta       = a.dot(x0) + std::abs(rng.normal());
    qp.A.conservativeResize(m + 2, n);
    qp.bu.conservativeResize(m + 2);
    if (cfg.two_sided) {
      const double t = std::abs(rng.normal());
      qp.bl.conservativeResize(m + 2);
      qp.A.row(m)     = a.transpose();
      qp.A.row(m + 1) = a.transpose();
      qp.bl(m)        = beta - 1 - t;
      qp.bu(m)        = beta;
      qp.bl(m + 1)    = beta + 1;
      qp.bu(m + 1)    = beta + 2 + t;
    } else {
      qp.A.row(m)     = a.transpose();
      qp.A.row(m + 1) = -a.transpose();
      qp.bu(m)        = beta;
      qp.bu(m + 1)    = -beta - 1;
    }
  }
  return qp;
}

}  // namespace daqp::harness

#endif  // DAQP__HARNESS__GENERATOR_HPP_
