#pragma once

#include <cstdint>
#include <random>

#include "wmr/types.hpp"

namespace wmr {

/// Deterministic stream of standard normal variates.
///
/// std::normal_distribution is not bit-reproducible across standard library
/// implementations, so the Gaussian transform (Box-Muller) is done by hand on
/// top of mt19937_64, whose output sequence is fixed by the standard.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform draw in (0, 1), 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  /// One N(0,1) draw.
  double next();

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of i.i.d. N(0,1) entries, filled column by column.
/// Deterministic given (rows, cols, seed); zero-dimension matrices are legal.
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

Vector gaussian_vector(Index size, std::uint64_t seed);

/// Mixes a base seed with up to two stream indices (splitmix64 finalizer) so
/// that parallel Monte-Carlo trials get decorrelated, reproducible substreams.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace wmr
