#ifndef DAQP__HARNESS_HPP_
#define DAQP__HARNESS_HPP_

#include "harness/benchmark.hpp"
#include "harness/generator.hpp"
#include "harness/problem_io.hpp"
#include "harness/rng.hpp"
#include "harness/sequence.hpp"

#endif  // DAQP__HARNESS_HPP_
