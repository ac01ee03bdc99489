#include "wmr/rng.hpp"

#include <cmath>
#include <numbers>

namespace wmr {

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  GaussianStream g(seed);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g.next();
  return m;
}

Vector gaussian_vector(Index size, std::uint64_t seed) {
  Vector v(size);
  GaussianStream g(seed);
  for (Index i = 0; i < size; ++i) v(i) = g.next();
  return v;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(splitmix(base ^ splitmix(a)) ^ splitmix(~b));
}

}  // namespace wmr
