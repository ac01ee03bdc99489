#include "wmr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmr/parallel.hpp"
#include "wmr/rng.hpp"

namespace wmr {

namespace {
constexpr double kPi = std::numbers::pi;
}

SvdTriple svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    return {Matrix(m.rows(), 0), Vector(0), Matrix(m.cols(), 0)};
  }
  if (!m.allFinite()) throw invalid_instance("svd: non-finite entries");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw numeric_failure("svd: decomposition did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

MpParams::MpParams(double aspect) : s(aspect) {
  if (!(aspect > 0.0 && aspect <= 1.0))
    throw invalid_instance("MpParams: aspect ratio must be in (0, 1]");
  const double rs = std::sqrt(aspect);
  l_b = 1.0 - rs;
  u_b = 1.0 + rs;
}

double mp_density(double u, const MpParams& p) {
  if (u < p.l_b || u > p.u_b) return 0.0;
  const double t1 = std::max(0.0, p.u_b * p.u_b - u * u);
  if (p.l_b == 0.0) {
    // s = 1: the u in the denominator cancels against sqrt(u^2 - l_b^2).
    return std::sqrt(t1) / (kPi * p.s);
  }
  const double t2 = std::max(0.0, u * u - p.l_b * p.l_b);
  return std::sqrt(t1 * t2) / (kPi * p.s * u);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  struct Rec {
    const std::function<double(double)>& f;
    int deepest = 0;
    double run(double a, double m, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth > deepest) deepest = depth;
      if (depth >= 4 && (std::abs(delta) <= 15.0 * tol || depth >= 48))
        return left + right + delta / 15.0;
      return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  } rec{f};
  if (a >= b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double result = rec.run(a, m, b, fa, fm, fb, whole, tol, 0);
  if (rec.deepest >= 48)
    throw numeric_failure("adaptive_simpson: tolerance not reached");
  return result;
}

namespace {

// Integral of (u - tau)_+^2 * mp_density(u) over [lo, u_b], with the
// substitution u = lo + (u_b - lo) sin^2(theta) to flatten the square-root
// behaviour at the endpoints.
double phi_quadrature(double tau, const MpParams& p) {
  const double lo = std::max(p.l_b, tau);
  if (lo >= p.u_b) return 0.0;
  const double span = p.u_b - lo;
  auto g = [&](double theta) {
    const double st = std::sin(theta);
    const double u = lo + span * st * st;
    const double d = u - tau;
    if (d <= 0.0) return 0.0;
    return d * d * mp_density(u, p) * span * std::sin(2.0 * theta);
  };
  return adaptive_simpson(g, 0.0, 0.5 * kPi, 1e-9);
}

}  // namespace

double phi(double tau, const MpParams& p) {
  if (tau < 0.0) throw invalid_instance("phi: tau must be >= 0");
  return phi_quadrature(tau, p);
}

double phi_fast(double tau, const MpParams& p) {
  if (p.s == 1.0 && tau >= 0.0) return varphi(tau);
  return phi_quadrature(tau, p);
}

double varphi(double alpha) {
  if (alpha <= 0.0)
    return (3.0 * kPi - 16.0 * alpha + 3.0 * kPi * alpha * alpha) / (3.0 * kPi);
  if (alpha >= 2.0) return 0.0;
  const double a2 = alpha * alpha;
  const double root = std::sqrt(4.0 - a2);
  return (-(26.0 * alpha + alpha * a2) * root +
          24.0 * (1.0 + a2) * std::acos(0.5 * alpha)) /
         (12.0 * kPi);
}

double shrinkage_sq(double g, double a) {
  if (a < 0.0) throw invalid_instance("shrinkage_sq: radius must be >= 0");
  const double d = std::abs(g) - a;
  return d > 0.0 ? d * d : 0.0;
}

double expected_shrinkage_mc(int n1, int n2, const Vector& f, int trials,
                             std::uint64_t seed) {
  if (n1 <= 0 || n2 <= 0 || n1 > n2)
    throw invalid_instance("expected_shrinkage_mc: need 0 < n1 <= n2");
  if (f.size() != n1)
    throw invalid_instance("expected_shrinkage_mc: f must have length n1");
  for (Index i = 0; i < f.size(); ++i) {
    if (f(i) < 0.0 || (i > 0 && f(i) > f(i - 1) + 1e-12))
      throw invalid_instance(
          "expected_shrinkage_mc: f must be non-negative and non-increasing");
  }
  if (trials < 1) throw invalid_instance("expected_shrinkage_mc: trials >= 1");

  const double scale = 1.0 / std::sqrt(static_cast<double>(n2));
  std::vector<double> per_trial(trials, 0.0);
  parallel_for(trials, [&](int t) {
    const Matrix g = gaussian_matrix(n1, n2, seed + static_cast<std::uint64_t>(t));
    const Vector sv = svd(g * scale).singulars;  // already non-increasing
    double acc = 0.0;
    for (Index i = 0; i < sv.size(); ++i) acc += shrinkage_sq(sv(i), f(i));
    per_trial[t] = acc / n1;
  });
  double mean = 0.0;
  for (double x : per_trial) mean += x;
  return mean / trials;
}

double expected_shrinkage_mp(int n1, int n2, const Vector& f) {
  if (n1 <= 0 || n2 <= 0 || n1 > n2)
    throw invalid_instance("expected_shrinkage_mp: need 0 < n1 <= n2");
  if (f.size() != n1)
    throw invalid_instance("expected_shrinkage_mp: f must have length n1");
  const MpParams p(static_cast<double>(n1) / n2);
  double acc = 0.0;
  for (Index i = 0; i < f.size(); ++i) acc += phi_fast(f(i), p);
  return acc / n1;
}

double mp_cdf(double u, const MpParams& p) {
  if (u <= p.l_b) return 0.0;
  if (u >= p.u_b) return 1.0;
  // Same endpoint-flattening substitution as the phi quadrature.
  const double span = u - p.l_b;
  auto g = [&](double theta) {
    const double st = std::sin(theta);
    const double x = p.l_b + span * st * st;
    return mp_density(x, p) * span * std::sin(2.0 * theta);
  };
  return std::clamp(adaptive_simpson(g, 0.0, 0.5 * kPi, 1e-9), 0.0, 1.0);
}

double ks_distance_mp(const Vector& singulars, const MpParams& p) {
  std::vector<double> sorted(singulars.data(), singulars.data() + singulars.size());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = mp_cdf(sorted[i], p);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return ks;
}

}  // namespace wmr
