#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "daqp/ldl_factor.hpp"
#include "test_util.hpp"

using daqp::ErrorCode;
using Factor = daqp::LdlFactor<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Factor factor_of_rows(const MatrixXd & rows)
{
  Factor F;
  for (Eigen::Index k = 0; k < rows.rows(); ++k) {
    VectorXd cross = rows.topRows(k) * rows.row(k).transpose();
    F.add_row(cross, rows.row(k).squaredNorm());
  }
  return F;
}

}  // namespace

TEST(LdlFresh, Identity)
{
  const Factor F = Factor::fresh(MatrixXd::Identity(2, 2));
  EXPECT_EQ(F.lower(), MatrixXd::Identity(2, 2));
  EXPECT_EQ(F.diagonal(), VectorXd::Ones(2));
  EXPECT_FALSE(F.singular());
}

TEST(LdlFresh, TwoByTwo)
{
  MatrixXd S(2, 2);
  S << 1, 1, 1, 2;
  const Factor F = Factor::fresh(S);
  EXPECT_DOUBLE_EQ(F.l(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(F.d(0), 1.0);
  EXPECT_DOUBLE_EQ(F.d(1), 1.0);
  EXPECT_LE((F.reconstruct() - S).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LdlFresh, RankOneHasZeroPivot)
{
  MatrixXd S(2, 2);
  S << 1, 2, 2, 4;
  const Factor F = Factor::fresh(S);
  EXPECT_DOUBLE_EQ(F.l(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(F.d(0), 1.0);
  EXPECT_DOUBLE_EQ(F.d(1), 0.0);
  ASSERT_TRUE(F.zero_pivot().has_value());
  EXPECT_EQ(*F.zero_pivot(), 1u);  // positions are 0-based
}

TEST(LdlFresh, Errors)
{
  MatrixXd S(2, 2);
  S << 1, 2, 0, 1;
  test::expect_error(ErrorCode::NotSymmetric, [&] { (void)Factor::fresh(S); });
  S << 1, 2, 2, 1;
  test::expect_error(ErrorCode::IndefiniteMatrix, [&] { (void)Factor::fresh(S); });
}

TEST(LdlAddRow, Examples)
{
  Factor F;
  F.add_row(VectorXd(0), 1.0);
  F.add_row(VectorXd::Constant(1, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(F.l(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(F.d(1), 1.0);

  Factor G;
  G.add_row(VectorXd(0), 1.0);
  G.add_row(VectorXd::Constant(1, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(G.l(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(G.d(1), 0.0);
  ASSERT_TRUE(G.zero_pivot());
  EXPECT_EQ(*G.zero_pivot(), 1u);

  Factor E;
  E.add_row(VectorXd(0), 3.0);
  EXPECT_EQ(E.order(), 1u);
  EXPECT_DOUBLE_EQ(E.d(0), 3.0);
}

TEST(LdlAddRow, Errors)
{
  Factor F;
  F.add_row(VectorXd(0), 1.0);
  test::expect_error(ErrorCode::DimensionMismatch, [&] { F.add_row(VectorXd::Zero(2), 1.0); });
  // cross implies a Gram entry larger than possible: pivot 1 - 4 < 0
  test::expect_error(ErrorCode::NegativePivot, [&] { F.add_row(VectorXd::Constant(1, 2.0), 1.0); });
  EXPECT_EQ(F.order(), 1u);
  F.add_row(VectorXd::Constant(1, 1.0), 1.0);
  ASSERT_TRUE(F.singular());
  test::expect_error(ErrorCode::SingularBase, [&] { F.add_row(VectorXd::Zero(2), 1.0); });
}

TEST(LdlRemoveRow, FirstOfTwo)
{
  MatrixXd rows(2, 2);
  rows << 1, 0, 1, 1;
  Factor F = factor_of_rows(rows);
  F.remove_row(0);
  ASSERT_EQ(F.order(), 1u);
  EXPECT_DOUBLE_EQ(F.d(0), 2.0);
}

TEST(LdlRemoveRow, LastIsTruncation)
{
  std::mt19937_64 gen(1);
  const MatrixXd rows = test::uniform_matrix(gen, 4, 3);
  Factor F            = factor_of_rows(rows.topRows(3));
  const MatrixXd L    = F.lower();
  const VectorXd D    = F.diagonal();
  F.remove_row(2);
  EXPECT_EQ(F.lower(), L.topLeftCorner(2, 2));
  EXPECT_EQ(F.diagonal(), D.head(2));
}

TEST(LdlRemoveRow, MiddleMatchesFresh)
{
  std::mt19937_64 gen(2);
  const MatrixXd rows = test::uniform_matrix(gen, 3, 5);
  Factor F            = Factor::fresh(rows * rows.transpose());
  F.remove_row(1);
  MatrixXd kept(2, 5);
  kept << rows.row(0), rows.row(2);
  const Factor ref = Factor::fresh(kept * kept.transpose());
  EXPECT_LE((F.lower() - ref.lower()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((F.diagonal() - ref.diagonal()).cwiseAbs().maxCoeff(), 1e-10);
  test::expect_error(ErrorCode::IndexOutOfRange, [&] { F.remove_row(2); });
}

TEST(LdlSolve, Examples)
{
  MatrixXd S(2, 2);
  S << 1, 1, 1, 2;
  Factor F = Factor::fresh(S);
  const VectorXd y = F.solve(VectorXd((VectorXd(2) << 1, 2).finished()));
  EXPECT_DOUBLE_EQ(y(0), 0.0);
  EXPECT_DOUBLE_EQ(y(1), 1.0);

  Factor I = Factor::fresh(MatrixXd::Identity(3, 3));
  const VectorXd v = (VectorXd(3) << 0.5, -2, 7).finished();
  EXPECT_EQ(I.solve(v), v);
}

TEST(LdlSolve, RandomAgainstDenseSolve)
{
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd rows = test::uniform_matrix(gen, 5, 7);
    Factor F            = factor_of_rows(rows);
    const VectorXd rhs  = test::uniform_matrix(gen, 5, 1);
    const MatrixXd S    = F.reconstruct();
    const VectorXd ref  = S.fullPivLu().solve(rhs);
    EXPECT_LE((F.solve(rhs) - ref).cwiseAbs().maxCoeff(), 1e-9 * (1 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST(LdlSolve, SingularThrows)
{
  MatrixXd S(2, 2);
  S << 1, 2, 2, 4;
  Factor F = Factor::fresh(S);
  test::expect_error(ErrorCode::SingularFactor, [&] { (void)F.solve(VectorXd::Ones(2)); });
}

// Reuse of forward-substitution components never changes the result, bit for bit.
TEST(LdlSolve, ReuseIsBitIdentical)
{
  std::mt19937_64 gen(4);
  const MatrixXd pool = test::uniform_matrix(gen, 12, 6);
  Factor F;
  std::vector<Eigen::Index> members;
  std::uniform_int_distribution<int> coin(0, 2);
  VectorXd rhs;
  for (int op = 0; op < 200; ++op) {
    const bool grow = members.empty() || (members.size() < 6 && coin(gen) != 0);
    if (grow) {
      const auto j    = static_cast<Eigen::Index>(gen() % 12);
      VectorXd cross(static_cast<Eigen::Index>(members.size()));
      for (std::size_t k = 0; k < members.size(); ++k) {
        cross(static_cast<Eigen::Index>(k)) = pool.row(members[k]).dot(pool.row(j));
      }
      F.add_row(cross, pool.row(j).squaredNorm());
      members.push_back(j);
    } else {
      const std::size_t pos = gen() % members.size();
      F.remove_row(pos);
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    if (F.singular()) {
      const std::size_t z = *F.zero_pivot();
      F.remove_row(z);
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(z));
      if (F.singular() || F.order() == 0) { continue; }
    }
    // keep a shared leading part of the right-hand side so reuse actually kicks in
    VectorXd next = test::uniform_matrix(gen, static_cast<Eigen::Index>(F.order()), 1);
    const auto keep = std::min<Eigen::Index>(rhs.size(), next.size() / 2);
    next.head(keep) = rhs.head(keep);
    rhs = next;
    const VectorXd fresh  = F.solve_fresh(rhs);
    const VectorXd reused = F.solve(rhs);
    ASSERT_EQ(fresh.size(), reused.size());
    for (Eigen::Index k = 0; k < fresh.size(); ++k) { ASSERT_EQ(fresh(k), reused(k)); }
  }
}

TEST(LdlNullVector, Examples)
{
  MatrixXd S(2, 2);
  S << 1, 2, 2, 4;
  const Factor F   = Factor::fresh(S);
  const VectorXd p = F.null_vector();
  EXPECT_DOUBLE_EQ(p(0), -2.0);
  EXPECT_DOUBLE_EQ(p(1), 1.0);
  EXPECT_LE((S * p).cwiseAbs().maxCoeff(), 1e-15);

  Factor Z;
  Z.add_row(VectorXd(0), 0.0);
  EXPECT_EQ(Z.null_vector(), VectorXd::Ones(1));

  test::expect_error(ErrorCode::NotSingular, [] { (void)Factor::fresh(MatrixXd::Identity(2, 2)).null_vector(); });
}

TEST(LdlNullVector, DependentThirdRow)
{
  std::mt19937_64 gen(5);
  MatrixXd rows(3, 4);
  rows.topRows(2) = test::uniform_matrix(gen, 2, 4);
  rows.row(2)     = rows.row(0) + rows.row(1);
  const Factor F  = factor_of_rows(rows);
  ASSERT_TRUE(F.zero_pivot());
  EXPECT_EQ(*F.zero_pivot(), 2u);
  const VectorXd p = F.null_vector();
  EXPECT_EQ(p(2), 1.0);
  EXPECT_LE((rows * rows.transpose() * p).cwiseAbs().maxCoeff(), 1e-9);
}

// Random add/remove sequences: reconstruction, agreement with a fresh factorization, and the
// zero pivot tracking a (near) zero eigenvalue.
TEST(LdlProperty, UpdatesMatchFresh)
{
  std::mt19937_64 gen(6);
  for (int seq = 0; seq < 200; ++seq) {
    const auto n        = static_cast<Eigen::Index>(2 + gen() % 7);
    const MatrixXd pool = test::uniform_matrix(gen, 2 * n, n);
    Factor F;
    std::vector<Eigen::Index> members;
    const int ops = 1 + static_cast<int>(gen() % 30);
    for (int op = 0; op < ops; ++op) {
      if (F.singular()) {
        const std::size_t z = *F.zero_pivot();
        F.remove_row(z);
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(z));
      } else if (members.empty() || gen() % 3 != 0) {
        const auto j = static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(pool.rows()));
        VectorXd cross(static_cast<Eigen::Index>(members.size()));
        for (std::size_t k = 0; k < members.size(); ++k) {
          cross(static_cast<Eigen::Index>(k)) = pool.row(members[k]).dot(pool.row(j));
        }
        F.add_row(cross, pool.row(j).squaredNorm());
        members.push_back(j);
      } else {
        const std::size_t pos = gen() % members.size();
        F.remove_row(pos);
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(pos));
      }
      MatrixXd rows(static_cast<Eigen::Index>(members.size()), n);
      for (std::size_t k = 0; k < members.size(); ++k) { rows.row(static_cast<Eigen::Index>(k)) = pool.row(members[k]); }
      const MatrixXd S = rows * rows.transpose();
      if (S.size() == 0) {
        ASSERT_EQ(F.order(), 0u);
        continue;
      }
      ASSERT_LE((F.reconstruct() - S).cwiseAbs().maxCoeff(), 1e-8);
      {
        const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(S).eigenvalues().minCoeff();
        EXPECT_EQ(F.singular(), min_eig <= 1e-6) << "min eigenvalue " << min_eig;
      }
      if (!F.singular()) {
        const Factor ref = Factor::fresh(S);
        EXPECT_LE((F.lower() - ref.lower()).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LE((F.diagonal() - ref.diagonal()).cwiseAbs().maxCoeff(), 1e-6);
      }
    }
  }
}
