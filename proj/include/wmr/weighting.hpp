#pragma once

#include "wmr/geometry.hpp"
#include "wmr/numerics.hpp"

namespace wmr {

/// Three free weights; the fourth is always the derived w4 = w2*w3/w1, which
/// is what makes the weighted operator factor through the adapted bases.
struct WeightVector {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 1.0;

  double w4() const { return w2 * w3 / w1; }
  void validate() const {
    if (!(w1 > 0.0 && w2 > 0.0 && w3 > 0.0))
      throw invalid_weights("WeightVector: weights must be strictly positive");
  }
};

/// h_w(Z) = w1 P Z Q + w2 P Z Q_perp + w3 P_perp Z Q + w4 P_perp Z Q_perp,
/// where P, Q project onto span(u_tilde), span(v_tilde).
Matrix apply_h(const WeightVector& w, const Matrix& u_tilde,
               const Matrix& v_tilde, const Matrix& z);

/// Inverse of apply_h; h_w with reciprocal weights (1/w1, 1/w2, 1/w3), whose
/// derived fourth weight is 1/w4.
Matrix apply_h_inverse(const WeightVector& w, const Matrix& u_tilde,
                       const Matrix& v_tilde, const Matrix& z);

/// Factorization of the weighted operator through the adapted bases:
///   h_w(Z) = (1/w3) B_L O_L L B_L^T Z B_R R^T O_R^T B_R^T,
/// with O_L, O_R orthonormal and L, R upper-triangular.  Diagonal entries of
/// c_left/c_right follow the angle order of the adapted bases (increasing
/// angle along the diagonal, no re-sorting).
struct WeightedDecomposition {
  Matrix b_left, b_right;  // copies of the adapted bases
  Matrix o_left, o_right;  // n x n orthonormal
  Matrix l, r_tri;         // n x n upper-triangular
  Vector c_left;   // diag, (w1^2 cos^2 + w3^2 sin^2)^{1/2} per u-angle
  Vector c_right;  // diag, (w3^2 cos^2 + w4^2 sin^2)^{1/2} per v-angle
  Vector l12, r12;  // the off-diagonal coupling blocks of L and R
  int r = 0;
  int r_prime = 0;
};

WeightedDecomposition decompose(const WeightVector& w, const BasisPair& bp,
                                const SubspacePrior& p);

/// SVD of h_w(X) assembled from the decomposition: singular values are
/// diag((1/w3) C_L Sigma C_R) sorted non-increasingly; the factors are the
/// first r columns of B_L O_L and B_R O_R (sorted accordingly).
SvdTriple weighted_svd(const GroundTruth& gt, const WeightedDecomposition& dec,
                       const WeightVector& w);

/// Sign matrix of h_w(X) and orthogonal projections onto the support of
/// h_w(X) (T-hat) and its complement, realized by conjugating block masks
/// with the orthonormal factors Q_L = B_L O_L, Q_R = B_R O_R.
struct SupportProjectors {
  Matrix sgn;               // rank-r partial isometry
  Matrix q_left, q_right;   // n x n orthonormal
  int r = 0;

  Matrix project_perp(const Matrix& z) const {
    const Matrix inner = q_left.rightCols(q_left.cols() - r).transpose() * z *
                         q_right.rightCols(q_right.cols() - r);
    return q_left.rightCols(q_left.cols() - r) * inner *
           q_right.rightCols(q_right.cols() - r).transpose();
  }
  Matrix project(const Matrix& z) const { return z - project_perp(z); }
};

SupportProjectors support_projectors(const WeightedDecomposition& dec);

}  // namespace wmr
