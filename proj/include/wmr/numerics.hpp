#pragma once

#include <cstdint>
#include <functional>

#include "wmr/errors.hpp"
#include "wmr/types.hpp"

namespace wmr {

/// Full SVD factors with singular values sorted non-increasingly.
struct SvdTriple {
  Matrix left;       // orthonormal columns
  Vector singulars;  // non-increasing, >= 0
  Matrix right;      // orthonormal columns
};

/// Thin SVD of an arbitrary real matrix.  Throws numeric_failure if the
/// underlying decomposition does not converge.
SvdTriple svd(const Matrix& m);

/// Parameters of the Marchenko-Pastur singular-value density for an n1 x n2
/// Gaussian matrix scaled by 1/sqrt(n2), with aspect ratio s = n1/n2.
struct MpParams {
  double s;    // aspect ratio, 0 < s <= 1
  double l_b;  // 1 - sqrt(s)
  double u_b;  // 1 + sqrt(s)
  explicit MpParams(double aspect);
};

/// Density sqrt((u_b^2 - u^2)(u^2 - l_b^2)) / (pi * s * u) on [l_b, u_b],
/// zero outside the support.
double mp_density(double u, const MpParams& p);

/// CDF of mp_density (numeric integral, absolute tolerance ~1e-9).
double mp_cdf(double u, const MpParams& p);

/// Truncated second moment phi(tau) = integral of (u - tau)_+^2 against
/// mp_density over the support, computed by adaptive quadrature to absolute
/// tolerance 1e-9.
double phi(double tau, const MpParams& p);

/// Same quantity, but uses the closed form when s == 1.  This is the variant
/// the threshold evaluators call in hot loops.
double phi_fast(double tau, const MpParams& p);

/// Closed form of phi(alpha) at aspect ratio 1:
///   (3*pi - 16*alpha + 3*pi*alpha^2) / (3*pi)          for alpha <= 0
///   (-(26a + a^3)sqrt(4-a^2) + 24(1+a^2)acos(a/2))/12pi  for 0 <= alpha <= 2
///   0                                                    for alpha > 2
double varphi(double alpha);

/// min over |z| <= a of (g - z)^2, i.e. (|g| - a)_+^2.
double shrinkage_sq(double g, double a);

/// Monte-Carlo mean over `trials` draws of
///   (1/n1) sum_i (sigma_i(G / sqrt(n2)) - f_i)_+^2,  G ~ n1 x n2 standard normal.
/// f must be non-increasing, non-negative, length n1, with n1 <= n2.
double expected_shrinkage_mc(int n1, int n2, const Vector& f, int trials,
                             std::uint64_t seed);

/// Deterministic spectral estimate of the same quantity:
///   (1/n1) sum_i phi(f_i)  at aspect ratio n1/n2.
double expected_shrinkage_mp(int n1, int n2, const Vector& f);

/// Kolmogorov-Smirnov distance between a sample of singular values and the
/// Marchenko-Pastur CDF.
double ks_distance_mp(const Vector& singulars, const MpParams& p);

/// Recursive adaptive Simpson quadrature, absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

}  // namespace wmr
