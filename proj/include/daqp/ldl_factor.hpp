#ifndef DAQP__LDL_FACTOR_HPP_
#define DAQP__LDL_FACTOR_HPP_

/**
 * @file
 * @brief Incrementally maintained LDL^T factorization of a Gram matrix.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace daqp {

/**
 * @brief LDL^T factorization of \f$ M_k M_k^T \f$ that follows row additions and removals.
 *
 * The strictly lower part of the unit triangular factor is stored row-packed: row k holds k
 * entries starting at offset k(k-1)/2. Appending a row is a push to the back of the buffer and
 * removing row i is a left shift of the trailing rows followed by a positive rank-one update of
 * the trailing block.
 *
 * A pivot d_k is treated as zero when d_k <= zeta * max(1, s_k), where s_k is the squared norm of
 * the row that produced it. At most one zero pivot is tracked; add_row() refuses to extend a
 * singular factor.
 */
template<typename Scalar = double>
class LdlFactor
{
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr Scalar default_zeta = Scalar(1e-11);

  explicit LdlFactor(Scalar zeta = default_zeta) : zeta_(zeta) {}

  /**
   * @brief Dense factorization of a symmetric positive semi-definite matrix.
   *
   * A zero pivot zeroes the remainder of its column. zero_pivot() reports the first one.
   */
  static LdlFactor fresh(const Matrix & S, Scalar zeta = default_zeta)
  {
    if (S.rows() != S.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "ldl_fresh: matrix is not square");
    }
    const Eigen::Index n = S.rows();
    const Scalar smax    = n > 0 ? std::max<Scalar>(Scalar(1), S.cwiseAbs().maxCoeff()) : Scalar(1);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < r; ++c) {
        if (std::abs(S(r, c) - S(c, r)) > Scalar(1e-12) * smax) {
          throw Error(ErrorCode::NotSymmetric, "ldl_fresh: matrix is not symmetric");
        }
      }
    }

    LdlFactor F(zeta);
    F.L_.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      std::vector<Scalar> y(kk);
      Scalar delta = S(k, k);
      for (std::size_t j = 0; j < kk; ++j) {
        Scalar acc = S(k, static_cast<Eigen::Index>(j));
        const Scalar * Lj = F.row_ptr(j);
        for (std::size_t t = 0; t < j; ++t) { acc -= Lj[t] * y[t]; }
        y[j] = acc;
      }
      const std::size_t offset = F.L_.size();
      F.L_.resize(offset + kk);
      for (std::size_t j = 0; j < kk; ++j) {
        const Scalar l = F.is_zero(j) ? Scalar(0) : y[j] / F.D_[j];
        F.L_[offset + j] = l;
        delta -= l * y[j];
      }
      const Scalar scale = std::max<Scalar>(Scalar(1), S(k, k));
      if (delta < -zeta * scale) {
        throw Error(ErrorCode::IndefiniteMatrix,
                    "ldl_fresh: negative pivot " + std::to_string(delta) + " at " + std::to_string(k));
      }
      F.D_.push_back(delta);
      F.scale_.push_back(scale);
      if (!F.zero_pivot_ && F.is_zero(kk)) { F.zero_pivot_ = kk; }
    }
    return F;
  }

  /// Number of factored rows.
  [[nodiscard]] std::size_t order() const noexcept { return D_.size(); }

  /// Position of the (first) zero pivot, if any.
  [[nodiscard]] std::optional<std::size_t> zero_pivot() const noexcept { return zero_pivot_; }

  [[nodiscard]] bool singular() const noexcept { return zero_pivot_.has_value(); }

  [[nodiscard]] Scalar zeta() const noexcept { return zeta_; }

  /// Number of leading forward-substitution components reusable by the next solve().
  [[nodiscard]] std::size_t fresh_prefix() const noexcept { return fresh_prefix_; }

  [[nodiscard]] Scalar d(std::size_t k) const { return D_[k]; }

  [[nodiscard]] Vector diagonal() const
  {
    Vector out(static_cast<Eigen::Index>(order()));
    for (std::size_t k = 0; k < order(); ++k) { out(static_cast<Eigen::Index>(k)) = D_[k]; }
    return out;
  }

  /// Entry (r, c) of the unit lower triangular factor.
  [[nodiscard]] Scalar l(std::size_t r, std::size_t c) const
  {
    if (r == c) { return Scalar(1); }
    if (c > r) { return Scalar(0); }
    return row_ptr(r)[c];
  }

  [[nodiscard]] Matrix lower() const
  {
    const auto n = static_cast<Eigen::Index>(order());
    Matrix out   = Matrix::Identity(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < r; ++c) {
        out(r, c) = row_ptr(static_cast<std::size_t>(r))[c];
      }
    }
    return out;
  }

  /// L diag(D) L^T
  [[nodiscard]] Matrix reconstruct() const
  {
    const Matrix L = lower();
    return L * diagonal().asDiagonal() * L.transpose();
  }

  /**
   * @brief Append a row to the factored matrix.
   *
   * @param cross inner products of the new row with the rows already factored
   * @param self_ip squared norm of the new row
   *
   * A pivot below -zeta * scale leaves the factor untouched and throws NegativePivot.
   */
  void add_row(const Vector & cross, Scalar self_ip)
  {
    if (zero_pivot_) {
      throw Error(ErrorCode::SingularBase, "ldl_add_row: factor is singular");
    }
    const std::size_t n = order();
    if (static_cast<std::size_t>(cross.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "ldl_add_row: cross has wrong length");
    }

    // L y = cross, l = D^{-1} y, delta = self_ip - l^T D l
    std::vector<Scalar> y(n);
    for (std::size_t k = 0; k < n; ++k) {
      Scalar acc       = cross(static_cast<Eigen::Index>(k));
      const Scalar * Lk = row_ptr(k);
      for (std::size_t t = 0; t < k; ++t) { acc -= Lk[t] * y[t]; }
      y[k] = acc;
    }
    Scalar delta = self_ip;
    std::vector<Scalar> l(n);
    for (std::size_t k = 0; k < n; ++k) {
      l[k] = y[k] / D_[k];
      delta -= l[k] * y[k];
    }
    const Scalar scale = std::max<Scalar>(Scalar(1), self_ip);
    if (delta < -zeta_ * scale) {
      throw Error(ErrorCode::NegativePivot, "ldl_add_row: pivot " + std::to_string(delta));
    }

    L_.insert(L_.end(), l.begin(), l.end());
    D_.push_back(delta);
    scale_.push_back(scale);
    if (is_zero(n)) { zero_pivot_ = n; }
  }

  /**
   * @brief Remove row i from the factored matrix.
   *
   * Rows before i are untouched. The column below pivot i is folded into the trailing block with
   * a positive rank-one update (Gill, Golub, Murray and Saunders, method C1).
   */
  void remove_row(std::size_t i)
  {
    const std::size_t n = order();
    if (i >= n) { throw Error(ErrorCode::IndexOutOfRange, "ldl_remove_row: index out of range"); }

    const std::size_t t = n - 1 - i;  // size of the trailing block
    std::vector<Scalar> w(t);
    Scalar alpha = std::max(D_[i], Scalar(0));

    // Left-shift: drop row i, and the column-i entry of every later row.
    std::size_t write = row_offset(i);
    for (std::size_t r = i + 1; r < n; ++r) {
      const std::size_t read = row_offset(r);
      w[r - i - 1]           = L_[read + i];
      for (std::size_t c = 0; c < r; ++c) {
        if (c != i) { L_[write++] = L_[read + c]; }
      }
    }
    L_.resize(write);
    D_.erase(D_.begin() + static_cast<std::ptrdiff_t>(i));
    scale_.erase(scale_.begin() + static_cast<std::ptrdiff_t>(i));

    // Trailing block: rows/columns i .. n-2 after the shift.
    for (std::size_t j = 0; j < t && alpha != Scalar(0); ++j) {
      const std::size_t col = i + j;
      const Scalar p        = w[j];
      const Scalar dj       = D_[col];
      const Scalar dbar     = dj + alpha * p * p;
      if (!(dbar > Scalar(0))) { continue; }  // zero pivot with no update mass: column stays
      const Scalar beta = p * alpha / dbar;
      alpha             = dj * alpha / dbar;
      D_[col]           = dbar;
      for (std::size_t r = j + 1; r < t; ++r) {
        Scalar & Lrc = L_[row_offset(i + r) + col];
        w[r] -= p * Lrc;
        Lrc += beta * w[r];
      }
    }

    zero_pivot_.reset();
    for (std::size_t k = 0; k < order(); ++k) {
      if (is_zero(k)) {
        zero_pivot_ = k;
        break;
      }
    }
    fresh_prefix_ = std::min(fresh_prefix_, i);
  }

  /**
   * @brief Solve (L D L^T) y = rhs.
   *
   * Leading forward-substitution components are reused from the previous call when both the
   * corresponding rows of L and the right-hand side entries are unchanged; the result is
   * bit-identical to solve_fresh().
   */
  Vector solve(const Vector & rhs)
  {
    check_solvable(rhs);
    const std::size_t n = order();
    std::size_t reuse   = std::min({fresh_prefix_, cached_rhs_.size(), n});
    for (std::size_t k = 0; k < reuse; ++k) {
      if (cached_rhs_[k] != rhs(static_cast<Eigen::Index>(k))) {
        reuse = k;
        break;
      }
    }
    cached_y_.resize(n);
    cached_rhs_.resize(n);
    forward(rhs, cached_y_, reuse);
    for (std::size_t k = 0; k < n; ++k) { cached_rhs_[k] = rhs(static_cast<Eigen::Index>(k)); }
    fresh_prefix_ = n;
    return backward(cached_y_);
  }

  /// solve() without any reuse bookkeeping.
  [[nodiscard]] Vector solve_fresh(const Vector & rhs) const
  {
    check_solvable(rhs);
    std::vector<Scalar> y(order());
    forward(rhs, y, 0);
    return backward(y);
  }

  /**
   * @brief Null vector of the factored matrix at the zero pivot.
   *
   * With zero pivot i the result is (p, 1, 0, ..., 0) where L_1^T p = -l_i, L_1 the leading i x i
   * block and l_i the strictly lower part of row i.
   */
  [[nodiscard]] Vector null_vector() const
  {
    if (!zero_pivot_) { throw Error(ErrorCode::NotSingular, "ldl_null_vector: factor is nonsingular"); }
    const std::size_t i = *zero_pivot_;
    Vector p            = Vector::Zero(static_cast<Eigen::Index>(order()));
    p(static_cast<Eigen::Index>(i)) = Scalar(1);
    const Scalar * li               = row_ptr(i);
    for (std::size_t j = i; j-- > 0;) {
      Scalar acc = -li[j];
      for (std::size_t r = j + 1; r < i; ++r) { acc -= row_ptr(r)[j] * p(static_cast<Eigen::Index>(r)); }
      p(static_cast<Eigen::Index>(j)) = acc;
    }
    return p;
  }

private:
  static constexpr std::size_t row_offset(std::size_t k) noexcept { return k > 0 ? k * (k - 1) / 2 : 0; }

  [[nodiscard]] const Scalar * row_ptr(std::size_t k) const noexcept { return L_.data() + row_offset(k); }

  [[nodiscard]] bool is_zero(std::size_t k) const noexcept { return D_[k] <= zeta_ * scale_[k]; }

  void check_solvable(const Vector & rhs) const
  {
    if (zero_pivot_) { throw Error(ErrorCode::SingularFactor, "ldl_solve: factor is singular"); }
    if (static_cast<std::size_t>(rhs.size()) != order()) {
      throw Error(ErrorCode::DimensionMismatch, "ldl_solve: rhs has wrong length");
    }
  }

  void forward(const Vector & rhs, std::vector<Scalar> & y, std::size_t from) const
  {
    for (std::size_t k = from; k < order(); ++k) {
      Scalar acc        = rhs(static_cast<Eigen::Index>(k));
      const Scalar * Lk = row_ptr(k);
      for (std::size_t t = 0; t < k; ++t) { acc -= Lk[t] * y[t]; }
      y[k] = acc;
    }
  }

  [[nodiscard]] Vector backward(const std::vector<Scalar> & y) const
  {
    const std::size_t n = order();
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) { x(static_cast<Eigen::Index>(k)) = y[k] / D_[k]; }
    // L^T x = z, column access through the packed rows
    for (std::size_t k = n; k-- > 0;) {
      const Scalar xk   = x(static_cast<Eigen::Index>(k));
      const Scalar * Lk = row_ptr(k);
      for (std::size_t t = 0; t < k; ++t) { x(static_cast<Eigen::Index>(t)) -= Lk[t] * xk; }
    }
    return x;
  }

  Scalar zeta_;
  std::vector<Scalar> L_;
  std::vector<Scalar> D_;
  std::vector<Scalar> scale_;
  std::optional<std::size_t> zero_pivot_;

  std::size_t fresh_prefix_ = 0;
  std::vector<Scalar> cached_rhs_;
  std::vector<Scalar> cached_y_;
};

}  // namespace daqp

#endif  // DAQP__LDL_FACTOR_HPP_
