#ifndef DAQP__SOLVER_HPP_
#define DAQP__SOLVER_HPP_

/**
 * @file
 * @brief Dual active-set method for dense convex quadratic programs.
 *
 * The solver works on the dual data of LDProblem. It keeps a working set of free dual components
 * and an LDL^T factorization of the Gram matrix of the corresponding rows of (N; M), updated by
 * one row per iteration. Equality rows form a permanent prefix of the factorization.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "ldl_factor.hpp"
#include "problem.hpp"
#include "settings.hpp"

namespace daqp {

/// Solver exit codes
enum class SolveStatus {
  Optimal,           ///< all slacks >= -eps_primal at a sign-feasible stationary iterate
  PrimalInfeasible,  ///< a dual unbounded direction was found, see SolveResult::certificate
  IterationLimit,    ///< iter_max (or prox_outer_max) reached, last sign-feasible iterate returned
  CycleDetected,     ///< |u*|^2 stopped increasing, best stationary iterate returned
  NumericalFailure,  ///< the factorization broke down after a refactorization attempt
};

inline constexpr std::string_view to_string(SolveStatus s) noexcept
{
  switch (s) {
  case SolveStatus::Optimal: return "Optimal";
  case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
  case SolveStatus::IterationLimit: return "IterationLimit";
  case SolveStatus::CycleDetected: return "CycleDetected";
  case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

/// Which bound a working-set member holds active.
enum class Side : std::uint8_t { inactive, upper, lower, equality };

/**
 * @brief Working set with upper/lower tags.
 *
 * Factorization positions 0 .. me-1 hold the equality rows; position me + k holds inequality
 * `inequalities()[k]`.
 */
class WorkingSet
{
public:
  WorkingSet() = default;
  WorkingSet(Eigen::Index m, Eigen::Index me) : side_(static_cast<std::size_t>(m), Side::inactive), me_(me) {}

  /// Number of factored rows, equalities included.
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(me_) + order_.size(); }
  [[nodiscard]] Eigen::Index num_equalities() const noexcept { return me_; }
  [[nodiscard]] Eigen::Index num_constraints() const noexcept { return static_cast<Eigen::Index>(side_.size()); }

  [[nodiscard]] const std::vector<Eigen::Index> & inequalities() const noexcept { return order_; }

  [[nodiscard]] Side side(Eigen::Index i) const { return side_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] bool contains(Eigen::Index i) const { return side(i) != Side::inactive; }

  [[nodiscard]] Side side_at(std::size_t pos) const
  {
    return pos < static_cast<std::size_t>(me_) ? Side::equality : side(index_at(pos));
  }

  /// Constraint index at a factorization position (equality index below me).
  [[nodiscard]] Eigen::Index index_at(std::size_t pos) const
  {
    return pos < static_cast<std::size_t>(me_) ? static_cast<Eigen::Index>(pos)
                                               : order_[pos - static_cast<std::size_t>(me_)];
  }

  void add(Eigen::Index i, Side s)
  {
    if (i < 0 || i >= num_constraints() || (s != Side::upper && s != Side::lower)) {
      throw Error(ErrorCode::IndexOutOfRange, "WorkingSet::add: bad index or side");
    }
    if (contains(i)) { throw Error(ErrorCode::IndexOutOfRange, "WorkingSet::add: index already present"); }
    side_[static_cast<std::size_t>(i)] = s;
    order_.push_back(i);
  }

  void remove_at(std::size_t pos)
  {
    if (pos < static_cast<std::size_t>(me_) || pos >= size()) {
      throw Error(ErrorCode::IndexOutOfRange, "WorkingSet::remove_at: not an inequality position");
    }
    const auto k                                    = pos - static_cast<std::size_t>(me_);
    side_[static_cast<std::size_t>(order_[k])]      = Side::inactive;
    order_.erase(order_.begin() + static_cast<std::ptrdiff_t>(k));
  }

  /// Inequality indices fixed at zero, ascending.
  [[nodiscard]] std::vector<Eigen::Index> complement() const
  {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < num_constraints(); ++i) {
      if (!contains(i)) { out.push_back(i); }
    }
    return out;
  }

private:
  std::vector<Eigen::Index> order_;
  std::vector<Side> side_;
  Eigen::Index me_ = 0;
};

/// Primal slacks of the constraints outside the working set (+inf for members and skipped entries).
struct PrimalSlack
{
  Eigen::VectorXd upper;
  /// empty for one-sided problems
  Eigen::VectorXd lower;
};

struct Violation
{
  Eigen::Index index;
  Side side;
  double value;
};

/// Direction along which the dual objective decreases without bound on the current working set.
struct SingularDirection
{
  /// null vector of the factored Gram matrix, oriented so that slope < 0
  Eigen::VectorXd p;
  /// directional derivative of the dual objective along p
  double slope = 0;
  /// |slope| is at roundoff level
  bool degenerate = false;
};

struct FixStep
{
  std::size_t position;
  Eigen::Index index;
  double alpha;
};

/// Dual ray proving primal infeasibility: full-length directions for lambda and nu.
struct InfeasibilityCertificate
{
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
};

struct Diagnostics
{
  /// LDL^T factorizations built from scratch (incremental updates excluded)
  int factorizations = 0;
  /// refactorizations triggered by a negative pivot
  int refactorizations = 0;
  /// outer proximal iterations (0 for a plain solve)
  int outer_iterations = 0;
  /// max(0, -min slack) at the returned iterate, in dual terms
  double primal_violation = 0;
};

struct SolveResult
{
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
  WorkingSet working_set;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  std::vector<double> lower_bounds;
  /// -|u*|^2 / 2 at the last stationary iterate
  double dual_objective = 0;
  std::optional<InfeasibilityCertificate> certificate;
  Diagnostics diagnostics;
};

/// Warm start: sign-feasible multipliers (full length m) and the working set they live on.
struct WarmStart
{
  Eigen::VectorXd lambda;
  WorkingSet working_set;
};

/// Row `pos` of the stacked matrix (N; M_W).
inline auto stacked_row(const LDProblem & ldp, const WorkingSet & ws, std::size_t pos)
{
  const Eigen::Index i = ws.index_at(pos);
  return pos < static_cast<std::size_t>(ws.num_equalities()) ? ldp.N.row(i) : ldp.M.row(i);
}

/**
 * @brief Linear term of the reduced dual on the working set, in factorization order.
 *
 * e on the equality prefix, d+ (or d) for upper members and -d- for lower members.
 */
inline Eigen::VectorXd stacked_linear_term(const LDProblem & ldp, const WorkingSet & ws)
{
  Eigen::VectorXd r(static_cast<Eigen::Index>(ws.size()));
  for (std::size_t pos = 0; pos < ws.size(); ++pos) {
    const Eigen::Index i = ws.index_at(pos);
    double value         = 0;
    switch (ws.side_at(pos)) {
    case Side::equality: value = ldp.e(i); break;
    case Side::upper: value = ldp.d(i); break;
    case Side::lower: value = -ldp.dminus(i); break;
    case Side::inactive: break;
    }
    r(static_cast<Eigen::Index>(pos)) = value;
  }
  return r;
}

/// u = (N; M_W)^T y for y in factorization order.
inline Eigen::VectorXd stacked_transpose_product(const LDProblem & ldp, const WorkingSet & ws, const Eigen::VectorXd & y)
{
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ldp.n());
  for (std::size_t pos = 0; pos < ws.size(); ++pos) {
    u.noalias() += y(static_cast<Eigen::Index>(pos)) * stacked_row(ldp, ws, pos).transpose();
  }
  return u;
}

/// Solution of the equality constrained dual subproblem: (N; M_W)(N; M_W)^T y = -r.
inline Eigen::VectorXd compute_lambda_star(LdlFactor<double> & factor, const LDProblem & ldp, const WorkingSet & ws)
{
  return factor.solve(-stacked_linear_term(ldp, ws));
}

/**
 * @brief Primal slacks of the complement given u = (N; M_W)^T lambda*.
 *
 * One-sided: upper = M u + d. Two-sided: upper = M u + d+ and lower = -M u + d-, where a lower
 * entry is left at +inf when the upper entry is already negative.
 */
inline PrimalSlack compute_primal_slack(const LDProblem & ldp, const WorkingSet & ws, const Eigen::VectorXd & u)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  PrimalSlack out{Eigen::VectorXd::Constant(ldp.m(), inf),
                  ldp.two_sided ? Eigen::VectorXd::Constant(ldp.m(), inf) : Eigen::VectorXd()};
  for (Eigen::Index i = 0; i < ldp.m(); ++i) {
    if (ws.contains(i)) { continue; }
    const double s = ldp.M.row(i).dot(u);
    out.upper(i)   = s + ldp.d(i);
    if (ldp.two_sided && out.upper(i) >= 0) { out.lower(i) = -s + ldp.dminus(i); }
  }
  return out;
}

/// Most negative slack below -eps_primal; ties go to the lower index, then the upper side.
inline std::optional<Violation> select_violation(const PrimalSlack & slack, double eps_primal)
{
  std::optional<Violation> best;
  for (Eigen::Index i = 0; i < slack.upper.size(); ++i) {
    if (slack.upper(i) < -eps_primal && (!best || slack.upper(i) < best->value)) {
      best = Violation{i, Side::upper, slack.upper(i)};
    }
    if (slack.lower.size() > 0 && slack.lower(i) < -eps_primal && (!best || slack.lower(i) < best->value)) {
      best = Violation{i, Side::lower, slack.lower(i)};
    }
  }
  return best;
}

/// Positions whose value leaves the sign-feasible region: upper members < 0, lower members > 0.
inline std::vector<std::size_t> blocking_set(const Eigen::VectorXd & values, const WorkingSet & ws)
{
  std::vector<std::size_t> out;
  for (auto pos = static_cast<std::size_t>(ws.num_equalities()); pos < ws.size(); ++pos) {
    const double val = values(static_cast<Eigen::Index>(pos));
    const Side s     = ws.side_at(pos);
    if ((s == Side::upper && val < 0) || (s == Side::lower && val > 0)) { out.push_back(pos); }
  }
  return out;
}

/**
 * @brief Iterative refinement of the primal point at a sign-feasible stationary iterate.
 *
 * The working-set residual (N; M_W) u + r is evaluated with u = -R x - v taken from x rather than
 * from (N; M_W)^T lambda, whose terms can be orders of magnitude larger than u. Each accepted step
 * moves lambda by delta = -(S S^T)^{-1} residual and x by -R^{-1} S^T delta, where S = (N; M_W).
 * Runs only when the residual exceeds `threshold`, and keeps a step while it shrinks the residual
 * and leaves lambda sign feasible. Requires ldp.R. Returns the number of accepted steps.
 */
inline int polish_primal(
  LdlFactor<double> & factor, const LDProblem & ldp, const WorkingSet & ws, Eigen::VectorXd & lam, Eigen::VectorXd & x,
  double threshold, int max_steps = 2)
{
  if (ws.size() == 0 || ldp.R.size() == 0 || factor.singular()) { return 0; }
  const auto R            = ldp.R.triangularView<Eigen::Upper>();
  const Eigen::VectorXd r = stacked_linear_term(ldp, ws);
  const auto residual     = [&](const Eigen::VectorXd & xx) {
    const Eigen::VectorXd u = -(R * xx) - ldp.v;
    Eigen::VectorXd out(r.size());
    for (std::size_t pos = 0; pos < ws.size(); ++pos) {
      out(static_cast<Eigen::Index>(pos)) = stacked_row(ldp, ws, pos).dot(u) + r(static_cast<Eigen::Index>(pos));
    }
    return out;
  };
  Eigen::VectorXd res = residual(x);
  double res_norm     = res.cwiseAbs().maxCoeff();
  int accepted        = 0;
  for (int step = 0; step < max_steps && res_norm > threshold; ++step) {
    const Eigen::VectorXd delta     = factor.solve(-res);
    const Eigen::VectorXd trial_lam = lam + delta;
    if (!blocking_set(trial_lam, ws).empty()) { break; }
    const Eigen::VectorXd trial_x   = x - R.solve(stacked_transpose_product(ldp, ws, delta));
    const Eigen::VectorXd trial_res = residual(trial_x);
    const double trial_norm         = trial_res.cwiseAbs().maxCoeff();
    if (!(trial_norm < res_norm)) { break; }
    lam      = trial_lam;
    x        = trial_x;
    res_norm = trial_norm;
    res      = trial_res;
    ++accepted;
  }
  return accepted;
}

/**
 * @brief Ratio test along p followed by removal of the first component to reach zero.
 *
 * Moves `lam` (factorization order) to lam + alpha p with alpha = min over B of -lam_i / p_i, then
 * drops the blocking position from `lam`, `ws` and `factor`.
 */
inline FixStep fix_component(
  Eigen::VectorXd & lam,
  WorkingSet & ws,
  LdlFactor<double> & factor,
  const std::vector<std::size_t> & blocking,
  const Eigen::VectorXd & p)
{
  if (blocking.empty()) { throw Error(ErrorCode::IndexOutOfRange, "fix_component: empty blocking set"); }
  std::optional<FixStep> best;
  for (const std::size_t pos : blocking) {
    const auto k       = static_cast<Eigen::Index>(pos);
    const double ratio = -lam(k) / p(k);
    const Eigen::Index idx = ws.index_at(pos);
    if (!best || ratio < best->alpha || (ratio == best->alpha && idx < best->index)) {
      best = FixStep{pos, idx, ratio};
    }
  }
  const auto j = static_cast<Eigen::Index>(best->position);
  lam += best->alpha * p;
  lam(j) = 0;

  Eigen::VectorXd reduced(lam.size() - 1);
  reduced << lam.head(j), lam.tail(lam.size() - j - 1);
  lam = std::move(reduced);
  ws.remove_at(best->position);
  factor.remove_row(best->position);
  return *best;
}

/**
 * @brief Null direction of a singular working set, oriented to decrease the dual objective.
 *
 * `r` is the stacked linear term (see stacked_linear_term()).
 */
inline SingularDirection singular_direction(const LdlFactor<double> & factor, const Eigen::VectorXd & r)
{
  SingularDirection out;
  out.p     = factor.null_vector();
  out.slope = r.dot(out.p);
  if (out.slope > 0) {
    out.p     = -out.p;
    out.slope = -out.slope;
  }
  const double mass = r.cwiseProduct(out.p).cwiseAbs().sum();
  out.degenerate    = std::abs(out.slope) <= 1e-12 * std::max(1.0, mass);
  return out;
}

/// Lower bound on the optimal value from a sign-feasible stationary iterate: (|u|^2 - |v|^2) / 2.
inline double lower_bound(const Eigen::VectorXd & u, const Eigen::VectorXd & v)
{
  return 0.5 * (u.squaredNorm() - v.squaredNorm());
}

/// True when |u|^2 grew strictly (beyond cycle_tol) since the previous stationary iterate.
inline bool check_progress(std::optional<double> u_norm_sq_last, double u_norm_sq, double cycle_tol)
{
  if (!u_norm_sq_last) { return true; }
  return u_norm_sq > *u_norm_sq_last + cycle_tol * (1 + *u_norm_sq_last);
}

/// Passed to the iteration observer after every iteration.
struct IterationEvent
{
  int iteration;
  /// the iterate is lambda* of the current working set and sign-feasible
  bool stationary;
};

/**
 * @brief Dual active-set solver with persistent state.
 *
 * The working set, multipliers and factorization survive between calls to solve(), so a solve
 * after set_linear_terms() starts from the previous solution without refactorizing.
 */
class Solver
{
public:
  using Observer = std::function<void(const Solver &, const IterationEvent &)>;

  explicit Solver(LDProblem ldp, Settings settings = {}) : ldp_(std::move(ldp)), settings_(settings)
  {
    settings_.validate();
    reset();
  }

  [[nodiscard]] const LDProblem & problem() const noexcept { return ldp_; }
  [[nodiscard]] const Settings & settings() const noexcept { return settings_; }
  [[nodiscard]] const WorkingSet & working_set() const noexcept { return ws_; }
  [[nodiscard]] const LdlFactor<double> & factor() const noexcept { return factor_; }
  [[nodiscard]] int factorizations() const noexcept { return factorizations_; }

  void set_observer(Observer obs) { observer_ = std::move(obs); }

  /// Replace f and the bounds; M and the factorization are kept.
  void set_linear_terms(
    const Eigen::VectorXd & f, const Eigen::VectorXd & bu, const Eigen::VectorXd & bl, const Eigen::VectorXd & h)
  {
    ldp_ = update_linear_terms(ldp_, f, bu, bl, h);
  }

  /// Swap in dual data sharing M, N and Rinv with the current problem.
  void set_problem_data(LDProblem ldp)
  {
    if (ldp.m() != ldp_.m() || ldp.me() != ldp_.me() || ldp.n() != ldp_.n()) {
      throw Error(ErrorCode::DimensionMismatch, "set_problem_data: dimensions differ");
    }
    ldp_ = std::move(ldp);
  }

  /// Cold start: lambda = 0, working set = equality rows.
  void reset()
  {
    ws_  = WorkingSet(ldp_.m(), ldp_.me());
    lam_ = Eigen::VectorXd::Zero(ldp_.me());
    eq_failure_ = !build_factor();
  }

  /// Start from (lambda, W). Rows that would make the factorization singular are dropped.
  void warm_start(const WarmStart & warm)
  {
    const WorkingSet & w0 = warm.working_set;
    if (warm.lambda.size() != ldp_.m() || w0.num_constraints() != ldp_.m() || w0.num_equalities() != ldp_.me()) {
      throw Error(ErrorCode::InvalidWarmStart, "warm start dimensions do not match the problem");
    }
    for (Eigen::Index i = 0; i < ldp_.m(); ++i) {
      const double li = warm.lambda(i);
      const Side s    = w0.side(i);
      if ((s == Side::inactive && li != 0) || (s == Side::upper && li < 0) || (s == Side::lower && li > 0)
          || (s == Side::lower && !ldp_.two_sided)) {
        throw Error(ErrorCode::InvalidWarmStart, "warm start multipliers are not sign-feasible");
      }
    }
    reset();
    if (eq_failure_) { return; }
    std::vector<double> kept(static_cast<std::size_t>(ldp_.me()), 0.0);
    for (const Eigen::Index i : w0.inequalities()) {
      if (!try_add_row(i)) { continue; }
      if (factor_.singular()) {
        factor_.remove_row(factor_.order() - 1);
        continue;
      }
      ws_.add(i, w0.side(i));
      kept.push_back(warm.lambda(i));
    }
    lam_ = Eigen::Map<const Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  }

  /// Full-length inequality multipliers of the current iterate.
  [[nodiscard]] Eigen::VectorXd lambda() const
  {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ldp_.m());
    for (std::size_t pos = static_cast<std::size_t>(ldp_.me()); pos < ws_.size(); ++pos) {
      out(ws_.index_at(pos)) = lam_(static_cast<Eigen::Index>(pos));
    }
    return out;
  }

  /// Equality multipliers of the current iterate.
  [[nodiscard]] Eigen::VectorXd nu() const { return lam_.head(ldp_.me()); }

  /// Iterate in factorization order (equality prefix first).
  [[nodiscard]] const Eigen::VectorXd & stacked_iterate() const noexcept { return lam_; }

  SolveResult solve()
  {
    lower_bounds_.clear();
    u_norm_sq_last_.reset();
    best_.reset();
    dual_objective_ = 0;
    refactorized_   = false;
    refactorizations_ = 0;
    if (eq_failure_) { return finish(SolveStatus::NumericalFailure, 0); }

    const std::size_t me = static_cast<std::size_t>(ldp_.me());
    for (int k = 0;;) {
      if (k >= settings_.iter_max) { return finish(SolveStatus::IterationLimit, k); }
      ++k;
      bool stationary = false;
      if (!factor_.singular()) {
        const Eigen::VectorXd lam_star = compute_lambda_star(factor_, ldp_, ws_);
        const auto blocking            = blocking_set(lam_star, ws_);
        if (blocking.empty()) {
          stationary            = true;
          lam_                  = lam_star;
          const Eigen::VectorXd u = stacked_transpose_product(ldp_, ws_, lam_);
          const double u_sq       = u.squaredNorm();
          if (!check_progress(u_norm_sq_last_, u_sq, settings_.cycle_tol)) {
            restore_best();
            return finish(SolveStatus::CycleDetected, k);
          }
          u_norm_sq_last_ = u_sq;
          dual_objective_ = -0.5 * u_sq;
          lower_bounds_.push_back(lower_bound(u, ldp_.v));
          best_ = Snapshot{lam_, ws_};

          const PrimalSlack slack = compute_primal_slack(ldp_, ws_, u);
          const auto violation    = select_violation(slack, settings_.eps_primal);
          notify(k, stationary);
          std::optional<Violation> next = violation;
          if (!violation) {
            Eigen::VectorXd x = recover_primal(ldp_, lambda(), nu());
            if (polish_primal(factor_, ldp_, ws_, lam_, x, 1e-3 * settings_.eps_primal) == 0) {
              return finish(SolveStatus::Optimal, k);
            }
            // re-check the complement against the polished point
            next = select_violation(compute_primal_slack(ldp_, ws_, -(ldp_.R.triangularView<Eigen::Upper>() * x) - ldp_.v),
                                    settings_.eps_primal);
            if (!next) { return finish(SolveStatus::Optimal, k, x); }
          }
          if (!add_constraint(next->index, next->side)) {
            return finish(SolveStatus::NumericalFailure, k);
          }
          continue;
        }
        const Eigen::VectorXd p = lam_star - lam_;
        fix_component(lam_, ws_, factor_, blocking, p);
      } else {
        const Eigen::VectorXd r    = stacked_linear_term(ldp_, ws_);
        const SingularDirection sd = singular_direction(factor_, r);
        if (sd.degenerate) {
          const std::size_t pos = *factor_.zero_pivot();
          if (pos < me) { return finish(SolveStatus::NumericalFailure, k); }
          drop_position(pos);
        } else {
          const auto blocking = blocking_set(sd.p, ws_);
          if (blocking.empty()) {
            InfeasibilityCertificate cert{Eigen::VectorXd::Zero(ldp_.m()), sd.p.head(ldp_.me())};
            for (std::size_t pos = me; pos < ws_.size(); ++pos) {
              cert.lambda(ws_.index_at(pos)) = sd.p(static_cast<Eigen::Index>(pos));
            }
            certificate_ = std::move(cert);
            return finish(SolveStatus::PrimalInfeasible, k);
          }
          fix_component(lam_, ws_, factor_, blocking, sd.p);
        }
      }
      notify(k, stationary);
    }
  }

private:
  struct Snapshot
  {
    Eigen::VectorXd lam;
    WorkingSet ws;
  };

  void notify(int k, bool stationary) const
  {
    if (observer_) { observer_(*this, IterationEvent{k, stationary}); }
  }

  [[nodiscard]] double row_cross(std::size_t pos, Eigen::Index j) const
  {
    return stacked_row(ldp_, ws_, pos).dot(ldp_.M.row(j));
  }

  /// Append constraint row j to the factor (working set untouched). False on a negative pivot.
  bool try_add_row(Eigen::Index j)
  {
    Eigen::VectorXd cross(static_cast<Eigen::Index>(ws_.size()));
    for (std::size_t pos = 0; pos < ws_.size(); ++pos) { cross(static_cast<Eigen::Index>(pos)) = row_cross(pos, j); }
    try {
      factor_.add_row(cross, ldp_.M.row(j).squaredNorm());
    } catch (const Error & err) {
      if (err.code() == ErrorCode::NegativePivot) { return false; }
      throw;
    }
    return true;
  }

  bool add_constraint(Eigen::Index j, Side side)
  {
    if (!try_add_row(j)) {
      if (refactorized_) { return false; }
      refactorized_ = true;
      ++refactorizations_;
      if (!build_factor() || factor_.singular() || !try_add_row(j)) { return false; }
    }
    ws_.add(j, side);
    lam_.conservativeResize(lam_.size() + 1);
    lam_(lam_.size() - 1) = 0;
    return true;
  }

  void drop_position(std::size_t pos)
  {
    const auto j = static_cast<Eigen::Index>(pos);
    Eigen::VectorXd reduced(lam_.size() - 1);
    reduced << lam_.head(j), lam_.tail(lam_.size() - j - 1);
    lam_ = std::move(reduced);
    ws_.remove_at(pos);
    factor_.remove_row(pos);
  }

  /// Factor the current working set from scratch. False if it breaks down or turns singular early.
  bool build_factor()
  {
    ++factorizations_;
    factor_ = LdlFactor<double>(settings_.zeta_singular);
    for (std::size_t pos = 0; pos < ws_.size(); ++pos) {
      if (factor_.singular()) { return false; }
      Eigen::VectorXd cross(static_cast<Eigen::Index>(pos));
      const auto row = stacked_row(ldp_, ws_, pos);
      for (std::size_t q = 0; q < pos; ++q) { cross(static_cast<Eigen::Index>(q)) = stacked_row(ldp_, ws_, q).dot(row); }
      try {
        factor_.add_row(cross, row.squaredNorm());
      } catch (const Error &) {
        return false;
      }
    }
    return !factor_.singular();
  }

  void restore_best()
  {
    if (!best_) { return; }
    lam_ = best_->lam;
    ws_  = best_->ws;
    build_factor();
  }

  SolveResult finish(SolveStatus status, int iterations, std::optional<Eigen::VectorXd> x = std::nullopt)
  {
    SolveResult res;
    res.status         = status;
    res.iterations     = iterations;
    res.lambda         = lambda();
    res.nu             = nu();
    res.x              = x ? std::move(*x) : recover_primal(ldp_, res.lambda, res.nu);
    res.working_set    = ws_;
    res.lower_bounds   = lower_bounds_;
    res.dual_objective = dual_objective_;
    if (status == SolveStatus::PrimalInfeasible) { res.certificate = std::move(certificate_); }
    certificate_.reset();
    res.diagnostics.factorizations   = factorizations_;
    res.diagnostics.refactorizations = refactorizations_;

    const Eigen::VectorXd u = stacked_transpose_product(ldp_, ws_, lam_);
    const PrimalSlack slack = compute_primal_slack(ldp_, ws_, u);
    double worst            = slack.upper.size() > 0 ? slack.upper.minCoeff() : 0.0;
    if (slack.lower.size() > 0) { worst = std::min(worst, slack.lower.minCoeff()); }
    res.diagnostics.primal_violation = std::max(0.0, -worst);
    return res;
  }

  LDProblem ldp_;
  Settings settings_;
  WorkingSet ws_;
  Eigen::VectorXd lam_;
  LdlFactor<double> factor_;
  bool eq_failure_ = false;
  int factorizations_ = 0;
  int refactorizations_ = 0;
  bool refactorized_ = false;

  std::vector<double> lower_bounds_;
  std::optional<double> u_norm_sq_last_;
  std::optional<Snapshot> best_;
  double dual_objective_ = 0;
  std::optional<InfeasibilityCertificate> certificate_;
  Observer observer_;
};

/// One solve from a cold or warm start.
inline SolveResult solve(const LDProblem & ldp, const Settings & settings = {}, const std::optional<WarmStart> & warm = {})
{
  Solver solver(ldp, settings);
  if (warm) { solver.warm_start(*warm); }
  return solver.solve();
}

}  // namespace daqp

#endif  // DAQP__SOLVER_HPP_
