#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "daqp/harness/generator.hpp"
#include "daqp/oracle.hpp"
#include "daqp/solver.hpp"
#include "test_util.hpp"

using daqp::Side;
using daqp::SolveStatus;
using daqp::WorkingSet;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Dual objective of the stacked iterate, evaluated from the definition:
/// 1/2 |(N; M_W)^T y|^2 + r^T y.
double dual_objective(const daqp::Solver & s)
{
  const VectorXd & y = s.stacked_iterate();
  const VectorXd u   = daqp::stacked_transpose_product(s.problem(), s.working_set(), y);
  return 0.5 * u.squaredNorm() + daqp::stacked_linear_term(s.problem(), s.working_set()).dot(y);
}

daqp::QProblem stacked_one_sided(const daqp::QProblem & qp)
{
  daqp::QProblem out;
  out.H = qp.H;
  out.f = qp.f;
  out.A.resize(2 * qp.m(), qp.n());
  out.A << qp.A, -qp.A;
  out.bu.resize(2 * qp.m());
  out.bu << qp.bu, -qp.bl;
  out.G = qp.G;
  out.h = qp.h;
  return out;
}

}  // namespace

TEST(Solve, WorkedExample)
{
  const daqp::QProblem qp = test::two_constraints();
  daqp::Solver solver(daqp::transform(qp));
  std::vector<VectorXd> lambdas;
  int stationary = 0;
  solver.set_observer([&](const daqp::Solver & s, const daqp::IterationEvent & ev) {
    stationary += ev.stationary;
    lambdas.push_back(s.lambda());
  });
  const auto res = solver.solve();
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_EQ(stationary, 3);
  EXPECT_NEAR(res.x(0), 0.3, 1e-14);
  EXPECT_NEAR(res.x(1), 0.7, 1e-14);
  EXPECT_NEAR(res.lambda(0), 1.3, 1e-14);
  EXPECT_NEAR(res.lambda(1), 0.4, 1e-14);
  ASSERT_GE(lambdas.size(), 2u);
  EXPECT_NEAR(lambdas[1](0), 1.5, 1e-14);

  // bounds: -4 (unconstrained), -1.75 on W = {1}, then J(x*) = -1.71
  ASSERT_EQ(res.lower_bounds.size(), 3u);
  EXPECT_NEAR(res.lower_bounds[0], -4.0, 1e-14);
  EXPECT_NEAR(res.lower_bounds[1], -1.75, 1e-14);
  EXPECT_NEAR(res.lower_bounds[2], qp.objective(res.x), 1e-14);
  EXPECT_NEAR(qp.objective(res.x), -1.71, 1e-14);
}

TEST(Solve, Halfspace)
{
  const auto res = daqp::solve(daqp::transform(test::halfspace()));
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_NEAR(res.x(0), 0.5, 1e-15);
  EXPECT_NEAR(res.x(1), 0.5, 1e-15);
  EXPECT_NEAR(res.lambda(0), 1.5, 1e-15);
  EXPECT_NEAR(res.lower_bounds.back(), -1.75, 1e-15);
  EXPECT_NEAR(res.dual_objective, -0.5 * 4.5, 1e-15);
}

TEST(Solve, InfeasibleScalar)
{
  const daqp::LDProblem ldp = daqp::transform(test::infeasible_scalar());
  const auto res            = daqp::solve(ldp);
  ASSERT_EQ(res.status, SolveStatus::PrimalInfeasible);
  ASSERT_TRUE(res.certificate);
  const VectorXd & p = res.certificate->lambda;
  EXPECT_NEAR(p(0), 1.0, 1e-15);
  EXPECT_NEAR(p(1), 1.0, 1e-15);
  EXPECT_LE((ldp.M.transpose() * p).norm(), 1e-14);
  EXPECT_LT(ldp.d.dot(p), 0.0);
}

TEST(Solve, WarmStartAtOptimumTakesOneIteration)
{
  const daqp::LDProblem ldp = daqp::transform(test::two_constraints());
  const auto cold           = daqp::solve(ldp);
  const auto warm           = daqp::solve(ldp, {}, daqp::WarmStart{cold.lambda, cold.working_set});
  EXPECT_EQ(warm.status, SolveStatus::Optimal);
  EXPECT_EQ(warm.iterations, 1);
  EXPECT_EQ(warm.x, cold.x);
}

TEST(Solve, InvalidWarmStart)
{
  const daqp::LDProblem ldp = daqp::transform(test::two_constraints());
  WorkingSet ws(2, 0);
  ws.add(0, Side::upper);
  test::expect_error(daqp::ErrorCode::InvalidWarmStart,
                     [&] { (void)daqp::solve(ldp, {}, daqp::WarmStart{test::vec({-1, 0}), ws}); });
  test::expect_error(daqp::ErrorCode::InvalidWarmStart,
                     [&] { (void)daqp::solve(ldp, {}, daqp::WarmStart{test::vec({0, 1}), ws}); });
}

TEST(Solve, IterationLimit)
{
  daqp::Settings s;
  s.iter_max     = 1;
  const auto res = daqp::solve(daqp::transform(test::two_constraints()), s);
  EXPECT_EQ(res.status, SolveStatus::IterationLimit);
  EXPECT_EQ(res.iterations, 1);
}

TEST(Solve, EqualityOnly)
{
  daqp::QProblem qp;
  qp.H  = MatrixXd::Identity(2, 2);
  qp.f  = VectorXd::Zero(2);
  qp.A  = MatrixXd(0, 2);
  qp.bu = VectorXd(0);
  qp.G  = MatrixXd::Ones(1, 2);
  qp.h  = test::vec({1});
  const auto res = daqp::solve(daqp::transform(qp));
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_NEAR(res.x(0), 0.5, 1e-15);
  EXPECT_NEAR(res.nu(0), -0.5, 1e-15);
}

TEST(Solve, DependentEqualitiesAreANumericalFailure)
{
  daqp::QProblem qp;
  qp.H  = MatrixXd::Identity(2, 2);
  qp.f  = VectorXd::Zero(2);
  qp.A  = MatrixXd(0, 2);
  qp.bu = VectorXd(0);
  qp.G  = (MatrixXd(2, 2) << 1, 1, 2, 2).finished();
  qp.h  = test::vec({1, 2});
  EXPECT_EQ(daqp::solve(daqp::transform(qp)).status, SolveStatus::NumericalFailure);
}

TEST(LambdaStar, Examples)
{
  const daqp::LDProblem ldp = daqp::transform(test::halfspace());
  WorkingSet ws(1, 0);
  ws.add(0, Side::upper);
  auto F = daqp::LdlFactor<double>::fresh(ldp.M * ldp.M.transpose());
  EXPECT_NEAR(daqp::compute_lambda_star(F, ldp, ws)(0), 1.5, 1e-15);

  WorkingSet empty(1, 0);
  daqp::LdlFactor<double> E;
  EXPECT_EQ(daqp::compute_lambda_star(E, ldp, empty).size(), 0);

  daqp::QProblem box;
  box.H         = MatrixXd::Ones(1, 1);
  box.f         = test::vec({-3});
  box.A         = MatrixXd::Ones(1, 1);
  box.bu        = test::vec({1});
  box.bl        = test::vec({-1});
  box.two_sided = true;
  const daqp::LDProblem bldp = daqp::transform(box);
  WorkingSet bws(1, 0);
  bws.add(0, Side::upper);
  auto B = daqp::LdlFactor<double>::fresh(MatrixXd::Ones(1, 1));
  const VectorXd lam = daqp::compute_lambda_star(B, bldp, bws);
  EXPECT_DOUBLE_EQ(lam(0), 2.0);
  EXPECT_DOUBLE_EQ(daqp::recover_primal(bldp, lam, VectorXd())(0), 1.0);
}

TEST(PrimalSlack, Examples)
{
  const daqp::LDProblem ldp = daqp::transform(test::two_constraints());
  WorkingSet ws(2, 0);
  ws.add(0, Side::upper);
  const VectorXd u = daqp::stacked_transpose_product(ldp, ws, test::vec({1.5}));
  const auto slack = daqp::compute_primal_slack(ldp, ws, u);
  EXPECT_EQ(slack.upper(0), inf);
  EXPECT_NEAR(slack.upper(1), -0.2, 1e-15);

  ws.add(1, Side::upper);
  const auto full = daqp::compute_primal_slack(ldp, ws, daqp::stacked_transpose_product(ldp, ws, test::vec({1.3, 0.4})));
  EXPECT_FALSE(daqp::select_violation(full, 1e-6));

  daqp::QProblem box;
  box.H         = MatrixXd::Identity(2, 2);
  box.f         = test::vec({0.5, -0.25});
  box.A         = MatrixXd::Identity(2, 2);
  box.bu        = test::vec({1, 2});
  box.bl        = -box.bu;
  box.two_sided = true;
  const daqp::LDProblem bldp = daqp::transform(box);
  WorkingSet none(2, 0);
  const auto s0 = daqp::compute_primal_slack(bldp, none, VectorXd::Zero(2));
  EXPECT_EQ(s0.upper, bldp.d);
  EXPECT_EQ(s0.lower, bldp.dminus);
}

TEST(SelectViolation, Examples)
{
  daqp::PrimalSlack s{test::vec({-0.5, 0.2}), test::vec({0.1, -0.7})};
  auto v = daqp::select_violation(s, 1e-6);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->index, 1);
  EXPECT_EQ(v->side, Side::lower);

  daqp::PrimalSlack tol{test::vec({-9e-7, 3}), VectorXd()};
  EXPECT_FALSE(daqp::select_violation(tol, 1e-6));

  daqp::PrimalSlack tie{test::vec({-0.3}), test::vec({-0.3})};
  v = daqp::select_violation(tie, 1e-6);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->index, 0);
  EXPECT_EQ(v->side, Side::upper);
}

TEST(BlockingSet, Examples)
{
  WorkingSet ws(2, 0);
  ws.add(0, Side::upper);
  ws.add(1, Side::upper);
  EXPECT_TRUE(daqp::blocking_set(test::vec({1.3, 0.4}), ws).empty());
  EXPECT_EQ(daqp::blocking_set(test::vec({2, -0.1}), ws), std::vector<std::size_t>{1});

  WorkingSet mixed(2, 0);
  mixed.add(0, Side::upper);
  mixed.add(1, Side::lower);
  EXPECT_EQ(daqp::blocking_set(test::vec({-0.5, -0.5}), mixed), std::vector<std::size_t>{0});

  WorkingSet eq(1, 1);
  eq.add(0, Side::upper);
  EXPECT_TRUE(daqp::blocking_set(test::vec({-5, 1}), eq).empty());
}

namespace {

struct FixFixture
{
  daqp::LDProblem ldp;
  WorkingSet ws;
  daqp::LdlFactor<double> factor;

  explicit FixFixture(Side side1 = Side::upper, Side side2 = Side::upper)
  {
    daqp::QProblem qp;
    qp.H         = MatrixXd::Identity(2, 2);
    qp.f         = VectorXd::Zero(2);
    qp.A         = MatrixXd::Identity(2, 2);
    qp.bu        = VectorXd::Ones(2);
    qp.bl        = -VectorXd::Ones(2);
    qp.two_sided = true;
    ldp          = daqp::transform(qp);
    ws           = WorkingSet(2, 0);
    ws.add(0, side1);
    ws.add(1, side2);
    factor = daqp::LdlFactor<double>::fresh(MatrixXd::Identity(2, 2));
  }
};

}  // namespace

TEST(FixComponent, Examples)
{
  {
    FixFixture fx;
    VectorXd lam   = test::vec({1, 2});
    const auto fix = daqp::fix_component(lam, fx.ws, fx.factor, {0, 1}, test::vec({-2, -1}));
    EXPECT_EQ(fix.index, 0);
    EXPECT_DOUBLE_EQ(fix.alpha, 0.5);
    EXPECT_EQ(lam, test::vec({1.5}));
    EXPECT_FALSE(fx.ws.contains(0));
    EXPECT_EQ(fx.factor.order(), 1u);
  }
  {
    FixFixture fx;
    VectorXd lam   = test::vec({0, 1});
    const auto fix = daqp::fix_component(lam, fx.ws, fx.factor, {0, 1}, test::vec({-1, -1}));
    EXPECT_EQ(fix.index, 0);
    EXPECT_EQ(fix.alpha, 0.0);
    EXPECT_EQ(lam, test::vec({1}));
  }
  {
    FixFixture fx(Side::lower, Side::upper);
    VectorXd lam   = test::vec({-2, 1});
    const auto fix = daqp::fix_component(lam, fx.ws, fx.factor, {0}, test::vec({1, 0}));
    EXPECT_DOUBLE_EQ(fix.alpha, 2.0);
    EXPECT_EQ(lam, test::vec({1}));
  }
}

TEST(SingularDirection, Examples)
{
  // rows [1, 0] and [2, 0], d = (-1, -1)
  MatrixXd rows(2, 2);
  rows << 1, 0, 2, 0;
  const auto F   = daqp::LdlFactor<double>::fresh(rows * rows.transpose());
  const auto dir = daqp::singular_direction(F, test::vec({-1, -1}));
  EXPECT_EQ(dir.p, test::vec({2, -1}));
  EXPECT_DOUBLE_EQ(dir.slope, -1.0);
  EXPECT_FALSE(dir.degenerate);
  WorkingSet ws(2, 0);
  ws.add(0, Side::upper);
  ws.add(1, Side::upper);
  EXPECT_EQ(daqp::blocking_set(dir.p, ws), std::vector<std::size_t>{1});

  const auto flat = daqp::singular_direction(F, test::vec({-2, -4}));
  EXPECT_TRUE(flat.degenerate);
}

TEST(LowerBound, Examples)
{
  EXPECT_DOUBLE_EQ(daqp::lower_bound(test::vec({1.5, 1.5}), test::vec({-2, -2})), -1.75);
  EXPECT_DOUBLE_EQ(daqp::lower_bound(VectorXd::Zero(2), test::vec({-2, -2})), -4.0);
}

TEST(CheckProgress, Examples)
{
  EXPECT_TRUE(daqp::check_progress(2.25, 4.5, 1e-12));
  EXPECT_FALSE(daqp::check_progress(4.5, 4.5, 1e-12));
  EXPECT_TRUE(daqp::check_progress(std::nullopt, 0.0, 1e-12));
}

// Random instances: sign feasibility, descent of the dual objective, the identity
// J_d(lambda*) = -|u*|^2 / 2 and agreement with the enumeration oracle.
TEST(SolveProperty, InvariantsOnRandomProblems)
{
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    daqp::harness::GeneratorConfig cfg;
    cfg.n         = 2 + static_cast<Eigen::Index>(seed % 5);
    cfg.m         = 1 + static_cast<Eigen::Index>(seed % 11);
    cfg.me        = static_cast<Eigen::Index>(seed % 3 == 0);
    cfg.kappa     = seed % 2 ? 1e2 : 1;
    cfg.two_sided = seed % 4 == 1;
    cfg.seed      = 1000 + seed;
    const daqp::QProblem qp = daqp::harness::generate_random(cfg);
    daqp::Solver solver(daqp::transform(qp));

    std::vector<double> jd;
    solver.set_observer([&](const daqp::Solver & s, const daqp::IterationEvent & ev) {
      const VectorXd lam = s.lambda();
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const Side side = s.working_set().side(i);
        if (side == Side::upper) { ASSERT_GE(lam(i), 0.0); }
        if (side == Side::lower) { ASSERT_LE(lam(i), 0.0); }
        if (side == Side::inactive) { ASSERT_EQ(lam(i), 0.0); }
      }
      jd.push_back(dual_objective(s));
      if (ev.stationary) {
        const VectorXd u = daqp::stacked_transpose_product(s.problem(), s.working_set(), s.stacked_iterate());
        EXPECT_NEAR(jd.back(), -0.5 * u.squaredNorm(), 1e-9 * (1 + u.squaredNorm()));
      }
    });
    const auto res = solver.solve();
    ASSERT_EQ(res.status, SolveStatus::Optimal) << "seed " << seed;
    for (std::size_t k = 1; k < jd.size(); ++k) {
      EXPECT_LE(jd[k], jd[k - 1] + 1e-9 * (1 + std::abs(jd[k - 1]))) << "seed " << seed << " iteration " << k;
    }

    const auto oracle = daqp::brute_force_solve(qp);
    const double tol  = 1e-6 * (1 + oracle.x.cwiseAbs().maxCoeff());
    EXPECT_LE((res.x - oracle.x).cwiseAbs().maxCoeff(), tol) << "seed " << seed;

    const auto kkt = daqp::kkt_residual(qp, res.x, res.lambda, res.nu);
    EXPECT_LE(kkt.stationarity, 1e-8 * kkt.stationarity_scale);
    EXPECT_LE(kkt.primal_ineq, 1e-6);
    EXPECT_LE(kkt.dual, 0.0);
    EXPECT_LE(kkt.complementarity, 1e-8 * kkt.complementarity_scale);
    EXPECT_LE(kkt.equality, 1e-8);
  }
}

TEST(SolveProperty, TwoSidedMatchesStackedOneSided)
{
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    daqp::harness::GeneratorConfig cfg;
    cfg.n         = 4;
    cfg.m         = 8;
    cfg.two_sided = true;
    cfg.kappa     = 10;
    cfg.seed      = 2000 + seed;
    const daqp::QProblem qp = daqp::harness::generate_random(cfg);
    const auto a            = daqp::solve(daqp::transform(qp));
    const auto b            = daqp::solve(daqp::transform(stacked_one_sided(qp)));
    ASSERT_EQ(a.status, SolveStatus::Optimal);
    ASSERT_EQ(b.status, SolveStatus::Optimal);
    EXPECT_LE((a.x - b.x).cwiseAbs().maxCoeff(), 1e-8) << "seed " << seed;
  }
}

TEST(SolveProperty, WorkingSetSizeStaysBelowRank)
{
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    daqp::harness::GeneratorConfig cfg;
    cfg.n    = 3;
    cfg.m    = 12;
    cfg.me   = 1;
    cfg.seed = 3000 + seed;
    daqp::Solver solver(daqp::transform(daqp::harness::generate_random(cfg)));
    solver.set_observer([&](const daqp::Solver & s, const daqp::IterationEvent &) {
      if (!s.factor().singular()) { EXPECT_LE(s.working_set().size(), 3u); }
    });
    EXPECT_EQ(solver.solve().status, SolveStatus::Optimal);
  }
}

TEST(WorkingSet, Bookkeeping)
{
  WorkingSet ws(4, 1);
  EXPECT_EQ(ws.size(), 1u);
  ws.add(2, Side::upper);
  ws.add(0, Side::lower);
  EXPECT_EQ(ws.size(), 3u);
  EXPECT_EQ(ws.index_at(0), 0);
  EXPECT_EQ(ws.side_at(0), Side::equality);
  EXPECT_EQ(ws.index_at(1), 2);
  EXPECT_EQ(ws.side_at(2), Side::lower);
  EXPECT_EQ(ws.complement(), (std::vector<Eigen::Index>{1, 3}));
  test::expect_error(daqp::ErrorCode::IndexOutOfRange, [&] { ws.add(2, Side::upper); });
  test::expect_error(daqp::ErrorCode::IndexOutOfRange, [&] { ws.remove_at(0); });
  ws.remove_at(1);
  EXPECT_FALSE(ws.contains(2));
  EXPECT_EQ(ws.inequalities(), std::vector<Eigen::Index>{0});
}

TEST(Solver, SetLinearTermsReusesFactorization)
{
  const daqp::QProblem qp = test::two_constraints();
  daqp::Solver solver(daqp::transform(qp));
  ASSERT_EQ(solver.solve().status, SolveStatus::Optimal);
  const int before = solver.factorizations();
  solver.set_linear_terms(test::vec({-2, -2.1}), qp.bu, qp.bl, qp.h);
  const auto res = solver.solve();
  EXPECT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_EQ(solver.factorizations(), before);

  daqp::QProblem moved = qp;
  moved.f              = test::vec({-2, -2.1});
  EXPECT_LE((res.x - daqp::brute_force_solve(moved).x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PolishPrimal, RestoresActiveRowsAfterPerturbation)
{
  const daqp::QProblem qp   = test::two_constraints();
  const daqp::LDProblem ldp = daqp::transform(qp);
  const auto res            = daqp::solve(ldp);
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  const WorkingSet & ws = res.working_set;
  ASSERT_GT(ws.size(), 0u);

  MatrixXd S(static_cast<Eigen::Index>(ws.size()), ldp.n());
  VectorXd lam(S.rows());
  for (std::size_t pos = 0; pos < ws.size(); ++pos) {
    S.row(static_cast<Eigen::Index>(pos)) = daqp::stacked_row(ldp, ws, pos);
    lam(static_cast<Eigen::Index>(pos))   = res.lambda(ws.index_at(pos));
  }
  auto factor = daqp::LdlFactor<double>::fresh(S * S.transpose());

  // already exact: nothing to do
  VectorXd x     = res.x;
  VectorXd lam_0 = lam;
  EXPECT_EQ(daqp::polish_primal(factor, ldp, ws, lam_0, x, 1e-9), 0);
  EXPECT_EQ(x, res.x);

  // push x off the active rows; polishing moves it back and leaves the stationarity residual as is
  x = res.x + test::vec({1e-5, -2e-5});
  const auto stationarity = [&](const VectorXd & xx, const VectorXd & l) {
    VectorXd full = VectorXd::Zero(qp.m());
    for (std::size_t pos = 0; pos < ws.size(); ++pos) { full(ws.index_at(pos)) = l(static_cast<Eigen::Index>(pos)); }
    return VectorXd(qp.H * xx + qp.f + qp.A.transpose() * full);
  };
  const VectorXd before = stationarity(x, lam_0);
  EXPECT_GE(daqp::polish_primal(factor, ldp, ws, lam_0, x, 1e-14), 1);
  const VectorXd Ax = qp.A * x;
  for (std::size_t pos = 0; pos < ws.size(); ++pos) {
    const Eigen::Index i = ws.index_at(pos);
    EXPECT_NEAR(Ax(i), qp.bu(i), 1e-12);
  }
  EXPECT_LE((stationarity(x, lam_0) - before).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveProperty, PrimalFeasibleAtHighConditioning)
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    daqp::harness::GeneratorConfig cfg;
    cfg.n     = 25;
    cfg.m     = 100;
    cfg.kappa = 1e10;
    cfg.seed  = 5000 + seed;
    const daqp::QProblem qp = daqp::harness::generate_random(cfg);
    const auto res          = daqp::solve(daqp::transform(qp));
    ASSERT_EQ(res.status, SolveStatus::Optimal) << "seed " << seed;
    EXPECT_LE(daqp::kkt_residual(qp, res.x, res.lambda, res.nu).primal_ineq, 1e-6) << "seed " << seed;
  }
}
