#pragma once

#include <cstdint>

#include "wmr/errors.hpp"
#include "wmr/types.hpp"

namespace wmr {

/// Angles closer than this (in degrees) to 0 or 90 make the adapted-basis
/// construction singular; see clamp_angles.
constexpr double kAngleFloorDeg = 1e-4;

/// Problem dimensions plus the two prescribed principal-angle vectors
/// (degrees, sorted non-increasingly) between the true column/row spaces and
/// the prior subspaces.
struct SubspacePrior {
  int n = 0;        // ambient dimension (square matrices)
  int r = 0;        // rank of the ground truth
  int r_prime = 0;  // dimension of each prior subspace, r <= r' and r + r' <= n
  Vector theta_u;   // r angles, degrees, non-increasing
  Vector theta_v;   // r angles, degrees, non-increasing

  void validate() const;  // throws invalid_instance
};

/// Builds a prior with the angle vectors sorted non-increasingly, then
/// validates it.
SubspacePrior make_prior(int n, int r, int r_prime, Vector theta_u, Vector theta_v);

/// Copy of p with every angle clamped into [kAngleFloorDeg, 90 - kAngleFloorDeg].
/// Sets *clamped when any angle moved.
SubspacePrior clamp_angles(const SubspacePrior& p, bool* clamped = nullptr);

/// Rank-r ground truth X = U diag(sigma) V^T.
struct GroundTruth {
  Matrix u;      // n x r, orthonormal columns
  Vector sigma;  // r strictly positive singular values
  Matrix v;      // n x r, orthonormal columns

  Matrix x() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Ground truth together with the n x r' prior bases realizing the requested
/// principal angles: U^T Utilde = [cos(theta_u) 0], same on the V side, where
/// the diagonal lists cosines in order of increasing angle.
struct PriorInstance {
  GroundTruth gt;
  Matrix u_tilde;  // n x r'
  Matrix v_tilde;  // n x r'
};

/// Samples a random instance realizing p exactly (up to round-off).  Singular
/// values are |N(0,1)| + 0.5 so the ground truth is well conditioned.
PriorInstance make_prior_instance(const SubspacePrior& p, std::uint64_t seed);

/// Principal angles (degrees, sorted non-increasingly) between the column
/// spans of two orthonormal bases with a.cols() <= b.cols().
Vector principal_angles(const Matrix& a, const Matrix& b);

/// Orthonormal n x n bases adapted to the instance.  Column blocks have
/// widths (r, r, r'-r, n-r-r'):
///   b_left = [U, U'_1, U'_2, U'']   with  U'_1 = -P_{U_perp} Utilde_1 sin^{-1},
///   U'_2 = -P_{U_perp} Utilde_2,  U'' completing the basis,
/// and symmetrically for b_right.  The first r columns of b_left/b_right span
/// the column/row space of X.
struct BasisPair {
  Matrix b_left;   // n x n orthonormal
  Matrix b_right;  // n x n orthonormal
  int r = 0;
  int r_prime = 0;
};

/// Requires the prior bases to be aligned with U, V exactly as produced by
/// make_prior_instance (U^T Utilde = [diag-cos 0] within 1e-8) and the angles
/// to match p within 1e-6 degrees; throws degenerate_angle when an angle sits
/// outside [kAngleFloorDeg, 90 - kAngleFloorDeg].
BasisPair build_basis_pair(const GroundTruth& gt, const Matrix& u_tilde,
                           const Matrix& v_tilde, const SubspacePrior& p);

}  // namespace wmr
