// Receding-horizon control of a double integrator. The condensed QP keeps H and A fixed; only
// f (through the measured state) changes between steps, so one Solver is reused and every solve
// starts from the previous working set without refactorizing.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>

#include "daqp/daqp.hpp"

int main()
{
  constexpr int horizon = 10;
  constexpr double dt   = 0.1;
  constexpr double umax = 1.0;

  Eigen::Matrix2d Ad;
  Ad << 1, dt, 0, 1;
  const Eigen::Vector2d Bd(0.5 * dt * dt, dt);

  // x_k = Ad^k x0 + sum_j Ad^(k-1-j) Bd u_j, stacked as X = Phi x0 + Gamma U
  Eigen::MatrixXd Phi(2 * horizon, 2), Gamma = Eigen::MatrixXd::Zero(2 * horizon, horizon);
  Eigen::Matrix2d Ak = Eigen::Matrix2d::Identity();
  for (int k = 0; k < horizon; ++k) {
    Ak = Ad * Ak;
    Phi.middleRows(2 * k, 2) = Ak;
    Eigen::Matrix2d Aj = Eigen::Matrix2d::Identity();
    for (int j = k; j >= 0; --j) {
      Gamma.block(2 * k, j, 2, 1) = Aj * Bd;
      Aj = Ad * Aj;
    }
  }
  const double r = 0.1;

  daqp::QProblem qp;
  qp.H         = Gamma.transpose() * Gamma + r * Eigen::MatrixXd::Identity(horizon, horizon);
  qp.A         = Eigen::MatrixXd::Identity(horizon, horizon);
  qp.bu        = Eigen::VectorXd::Constant(horizon, umax);
  qp.bl        = -qp.bu;
  qp.two_sided = true;

  Eigen::Vector2d x(5, 0);
  qp.f = Gamma.transpose() * (Phi * x);
  daqp::Solver solver(daqp::transform(qp));

  int total = 0;
  for (int step = 0; step < 100; ++step) {
    qp.f = Gamma.transpose() * (Phi * x);
    solver.set_linear_terms(qp.f, qp.bu, qp.bl, qp.h);
    const daqp::SolveResult res = solver.solve();
    if (res.status != daqp::SolveStatus::Optimal) {
      std::cerr << "step " << step << ": " << daqp::to_string(res.status) << '\n';
      return 1;
    }
    total += res.iterations;
    const double u = res.x(0);
    x              = Ad * x + Bd * u;
    if (step % 10 == 0) {
      std::cout << "step " << step << "  u " << u << "  position " << x(0) << "  iterations " << res.iterations
                << '\n';
    }
  }
  std::cout << "total iterations " << total << ", factorizations " << solver.factorizations() << '\n';
  return std::abs(x(0)) < 0.1 ? 0 : 1;
}
