#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wmr/numerics.hpp"
#include "wmr/rng.hpp"

using namespace wmr;

TEST_CASE("svd basics") {
  auto id = svd(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(id.singulars(i) == doctest::Approx(1.0));

  Vector d(3);
  d << 3, 1, 2;
  auto t = svd(Matrix(d.asDiagonal()));
  CHECK(t.singulars(0) == doctest::Approx(3.0));
  CHECK(t.singulars(1) == doctest::Approx(2.0));
  CHECK(t.singulars(2) == doctest::Approx(1.0));
}

TEST_CASE("svd reconstructs a random matrix") {
  const Matrix m = gaussian_matrix(5, 4, 7);
  const auto t = svd(m);
  const Matrix rec = t.left * t.singulars.asDiagonal() * t.right.transpose();
  CHECK((rec - m).norm() <= 1e-10 * m.norm());
  for (Eigen::Index i = 1; i < t.singulars.size(); ++i)
    CHECK(t.singulars(i) <= t.singulars(i - 1));
}

TEST_CASE("svd of empty matrix") {
  const auto t = svd(Matrix(0, 5));
  CHECK(t.singulars.size() == 0);
}

TEST_CASE("gaussian_matrix determinism and moments") {
  CHECK(gaussian_matrix(0, 5, 3).size() == 0);
  const Matrix a = gaussian_matrix(17, 9, 42);
  const Matrix b = gaussian_matrix(17, 9, 42);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - gaussian_matrix(17, 9, 43)).norm() > 0.0);

  const Matrix big = gaussian_matrix(100, 100, 1);
  const double mean = big.mean();
  const double var = (big.array() - mean).square().mean();
  CHECK(std::abs(mean) <= 0.05);
  CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("mp density support and values") {
  const MpParams p(0.25);  // l_b = 0.5, u_b = 1.5
  CHECK(mp_density(0.49, p) == 0.0);
  CHECK(mp_density(1.51, p) == 0.0);
  CHECK(mp_density(1.0, p) > 0.0);

  const MpParams p1(1.0);
  const double u = std::sqrt(2.0);
  CHECK(mp_density(u, p1) ==
        doctest::Approx(std::sqrt(2.0) / std::numbers::pi).epsilon(1e-12));

  // normalization at s = 1
  const double total = adaptive_simpson(
      [&](double x) { return mp_density(x, p1); }, 0.0, 2.0, 1e-9);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  // and at a generic aspect ratio, via the same endpoint-flattened CDF
  CHECK(mp_cdf(p.u_b, p) == doctest::Approx(1.0).epsilon(1e-7));

  CHECK_THROWS_AS(MpParams(0.0), invalid_instance);
  CHECK_THROWS_AS(MpParams(1.5), invalid_instance);
}

TEST_CASE("phi endpoints and quadrature") {
  const MpParams p1(1.0);
  CHECK(phi(0.0, p1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(phi(2.0, p1) == 0.0);
  CHECK(phi(5.0, MpParams(0.5)) == 0.0);
  CHECK_THROWS_AS(phi(-0.1, p1), invalid_instance);
}

TEST_CASE("phi matches a Monte-Carlo shrinkage mean") {
  const Matrix g = gaussian_matrix(400, 400, 11) / 20.0;
  const Vector sv = svd(g).singulars;
  double mc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) mc += shrinkage_sq(sv(i), 0.5);
  mc /= sv.size();
  CHECK(std::abs(phi(0.5, MpParams(1.0)) - mc) <= 0.01);
}

TEST_CASE("phi monotone and bounded on a grid") {
  for (double s : {1.0, 0.5, 0.2}) {
    const MpParams p(s);
    const double top = phi(0.0, p);
    double prev = top;
    for (int k = 1; k <= 12; ++k) {
      const double val = phi(0.2 * k, p);
      CHECK(val <= prev + 1e-12);
      CHECK(val >= 0.0);
      CHECK(val <= top + 1e-12);
      prev = val;
    }
  }
}

TEST_CASE("varphi closed form equals the quadrature") {
  CHECK(varphi(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(varphi(2.0) == 0.0);
  CHECK(varphi(3.0) == 0.0);
  const MpParams p1(1.0);
  for (int k = 0; k <= 8; ++k) {
    const double alpha = 0.25 * k;
    CHECK(std::abs(varphi(alpha) - phi(alpha, p1)) <= 1e-6);
  }
  // negative branch continues the quadratic extension smoothly
  CHECK(varphi(-1e-9) == doctest::Approx(varphi(0.0)).epsilon(1e-6));
  CHECK(phi_fast(0.75, p1) == doctest::Approx(varphi(0.75)).epsilon(1e-12));
}

TEST_CASE("shrinkage closed form vs grid search") {
  CHECK(shrinkage_sq(3.0, 1.0) == doctest::Approx(4.0));
  CHECK(shrinkage_sq(0.5, 1.0) == 0.0);
  GaussianStream rnd(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const double g = 3.0 * rnd.next();
    const double a = 2.0 * rnd.uniform01();
    double best = 1e300;
    const int steps = 20000;
    for (int i = 0; i <= steps; ++i) {
      const double z = -a + 2.0 * a * i / steps;
      best = std::min(best, (g - z) * (g - z));
    }
    CHECK(std::abs(shrinkage_sq(g, a) - best) <= 1e-6);
  }
}

TEST_CASE("expected shrinkage: zero thresholds give the second moment") {
  const Vector f = Vector::Zero(60);
  const double s = expected_shrinkage_mc(60, 60, f, 40, 5);
  CHECK(s == doctest::Approx(1.0).epsilon(0.05));
  CHECK(expected_shrinkage_mp(60, 60, f) ==
        doctest::Approx(phi(0.0, MpParams(1.0))).epsilon(1e-12));
}

TEST_CASE("expected shrinkage: MC stays below the spectral estimate") {
  // (n1, n2, gamma) configurations of the reference table
  const std::tuple<int, int, double> rows[] = {
      {10, 100, 0.3}, {100, 1000, 0.5}, {10, 1000, 0.9}, {5, 5, 0.2}};
  for (const auto& [n1, n2, gamma] : rows) {
    const Matrix c = gaussian_matrix(n1, n2, 515151u) / std::sqrt(double(n2));
    const Vector f = svd(c).singulars * gamma;
    // standard error from independent batches
    const int batches = 8, per = 40;
    double est[8];
    double mean = 0.0;
    for (int b = 0; b < batches; ++b) {
      est[b] = expected_shrinkage_mc(n1, n2, f, per, 1000 + b * per);
      mean += est[b] / batches;
    }
    double ss = 0.0;
    for (int b = 0; b < batches; ++b) ss += (est[b] - mean) * (est[b] - mean);
    const double se = std::sqrt(ss / (batches - 1) / batches);
    CHECK(mean <= expected_shrinkage_mp(n1, n2, f) + 2.0 * se + 1e-12);
  }
}

TEST_CASE("expected shrinkage input validation") {
  Vector bad(3);
  bad << 0.1, 0.5, 0.2;  // not non-increasing
  CHECK_THROWS_AS(expected_shrinkage_mc(3, 5, bad, 1, 1), invalid_instance);
  CHECK_THROWS_AS(expected_shrinkage_mc(5, 3, Vector::Zero(5), 1, 1),
                  invalid_instance);
}

TEST_CASE("KS distance against the limiting law, small instance") {
  const Matrix g = gaussian_matrix(200, 400, 4) / 20.0;
  const double ks = ks_distance_mp(svd(g).singulars, MpParams(0.5));
  CHECK(ks <= 0.08);
}
