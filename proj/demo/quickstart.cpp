// Smallest useful program: build a QP, solve it, print the solution.
//
//   min 1/2 |x|^2 - 2 x1 - 2 x2   s.t.  x1 + x2 <= 1,  x1 <= 0.3

#include <iostream>

#include "daqp/daqp.hpp"

int main()
{
  daqp::QProblem qp;
  qp.H = Eigen::MatrixXd::Identity(2, 2);
  qp.f = Eigen::Vector2d(-2, -2);
  qp.A.resize(2, 2);
  qp.A << 1, 1,
          1, 0;
  qp.bu = Eigen::Vector2d(1, 0.3);

  const daqp::SolveResult res = daqp::solve(daqp::transform(qp));
  std::cout << "status:     " << daqp::to_string(res.status) << '\n'
            << "iterations: " << res.iterations << '\n'
            << "x:          " << res.x.transpose() << '\n'
            << "lambda:     " << res.lambda.transpose() << '\n'
            << "bounds:    ";
  for (const double lb : res.lower_bounds) { std::cout << ' ' << lb; }
  std::cout << '\n';
  return res.status == daqp::SolveStatus::Optimal ? 0 : 1;
}
