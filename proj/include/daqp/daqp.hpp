#ifndef DAQP__DAQP_HPP_
#define DAQP__DAQP_HPP_

#include "error.hpp"
#include "ldl_factor.hpp"
#include "oracle.hpp"
#include "problem.hpp"
#include "prox.hpp"
#include "settings.hpp"
#include "solver.hpp"

#endif  // DAQP__DAQP_HPP_
