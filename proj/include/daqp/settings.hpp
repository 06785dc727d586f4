#ifndef DAQP__SETTINGS_HPP_
#define DAQP__SETTINGS_HPP_

#include <cmath>
#include <string>

#include "error.hpp"

namespace daqp {

/// Solver options.
struct Settings
{
  /// primal feasibility tolerance: a slack is accepted when it is >= -eps_primal
  double eps_primal = 1e-6;
  /// relative threshold below which an LDL^T pivot counts as zero
  double zeta_singular = 1e-11;
  /// iteration limit of a single solve
  int iter_max = 250;
  /// relative growth of |u*|^2 required between stationary iterates
  double cycle_tol = 1e-12;

  /// proximal regularization added to H
  double prox_eps = 1e-4;
  /// proximal fixed-point tolerance on |x - x_old|_2 (2^-12)
  double prox_eta = std::sqrt(std::ldexp(1.0, -24));
  /// maximum number of outer proximal iterations
  int prox_outer_max = 100;

  void validate() const
  {
    if (!(eps_primal > 0) || !(zeta_singular > 0) || iter_max <= 0 || !(cycle_tol > 0) || !(prox_eps > 0)
        || !(prox_eta > 0) || prox_outer_max <= 0) {
      throw Error(ErrorCode::InvalidSettings, "settings must be strictly positive");
    }
  }
};

}  // namespace daqp

#endif  // DAQP__SETTINGS_HPP_
