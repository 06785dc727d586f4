#ifndef DAQP__HARNESS__RNG_HPP_
#define DAQP__HARNESS__RNG_HPP_

/**
 * @file
 * @brief Portable seeded random source for problem generation.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++ standard. The
 * distributions are implemented here because the standard library ones are not portable:
 *
 *  - uniform(): top 53 bits of one engine output times 2^-53, in [0, 1)
 *  - normal(): Box-Muller with u1 = 1 - uniform(), u2 = uniform(), returning
 *    sqrt(-2 ln u1) cos(2 pi u2); one normal per two engine outputs
 *  - matrices are filled row by row
 */

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace daqp::harness {

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal()
  {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n)
  {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) { out(i) = normal(); }
    return out;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols)
  {
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) { out(r, c) = normal(); }
    }
    return out;
  }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent per-instance seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace daqp::harness

#endif  // DAQP__HARNESS__RNG_HPP_
