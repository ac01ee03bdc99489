#include "wmr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmr/numerics.hpp"
#include "wmr/rng.hpp"

namespace wmr {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool is_orthonormal(const Matrix& a, double tol) {
  if (a.cols() == 0) return true;
  const Matrix g = a.transpose() * a;
  return (g - Matrix::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff() <= tol;
}

// Orthonormal basis of a random k-dimensional subspace inside the orthogonal
// complement of `avoid` (pass an n x 0 matrix for no constraint).
Matrix random_complement_basis(Index n, Index k, const Matrix& avoid,
                               std::uint64_t seed) {
  if (k == 0) return Matrix(n, 0);
  Matrix g = gaussian_matrix(n, k, seed);
  if (avoid.cols() > 0) g -= avoid * (avoid.transpose() * g);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  if (avoid.cols() > 0) {
    // One re-orthogonalization pass keeps the result clean to ~1e-14.
    q -= avoid * (avoid.transpose() * q);
    Eigen::HouseholderQR<Matrix> qr2(q);
    q = qr2.householderQ() * Matrix::Identity(n, k);
  }
  return q;
}

// Angle (radians) paired with column j of an r-column block: the diagonal
// angle matrices list angles in increasing order, while theta itself is
// sorted non-increasingly.
double column_angle_rad(const Vector& theta_deg, Index j) {
  return theta_deg(theta_deg.size() - 1 - j) * kDegToRad;
}

}  // namespace

void SubspacePrior::validate() const {
  if (!(1 <= r && r <= r_prime && r + r_prime <= n))
    throw invalid_instance("SubspacePrior: need 1 <= r <= r' and r + r' <= n");
  if (theta_u.size() != r || theta_v.size() != r)
    throw invalid_instance("SubspacePrior: angle vectors must have length r");
  for (const Vector* th : {&theta_u, &theta_v}) {
    for (Index i = 0; i < th->size(); ++i) {
      if ((*th)(i) < 0.0 || (*th)(i) > 90.0)
        throw invalid_instance("SubspacePrior: angles must lie in [0, 90] degrees");
      if (i > 0 && (*th)(i) > (*th)(i - 1) + 1e-12)
        throw invalid_instance("SubspacePrior: angles must be non-increasing");
    }
  }
}

SubspacePrior make_prior(int n, int r, int r_prime, Vector theta_u, Vector theta_v) {
  auto sort_desc = [](Vector& v) {
    std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  };
  sort_desc(theta_u);
  sort_desc(theta_v);
  SubspacePrior p{n, r, r_prime, std::move(theta_u), std::move(theta_v)};
  p.validate();
  return p;
}

SubspacePrior clamp_angles(const SubspacePrior& p, bool* clamped) {
  SubspacePrior q = p;
  bool moved = false;
  for (Vector* th : {&q.theta_u, &q.theta_v}) {
    for (Index i = 0; i < th->size(); ++i) {
      const double c =
          std::clamp((*th)(i), kAngleFloorDeg, 90.0 - kAngleFloorDeg);
      if (c != (*th)(i)) moved = true;
      (*th)(i) = c;
    }
  }
  if (clamped) *clamped = moved;
  return q;
}

PriorInstance make_prior_instance(const SubspacePrior& p, std::uint64_t seed) {
  p.validate();
  const Index n = p.n, r = p.r, rp = p.r_prime;

  PriorInstance inst;
  auto build_side = [&](const Vector& theta, std::uint64_t s0, Matrix& basis_out,
                        Matrix& tilde_out) {
    const Matrix basis = random_complement_basis(n, r, Matrix(n, 0), s0);
    const Matrix w = random_complement_basis(n, r, basis, mix_seed(s0, 1));
    Matrix tilde(n, rp);
    for (Index j = 0; j < r; ++j) {
      const double a = column_angle_rad(theta, j);
      tilde.col(j) = std::cos(a) * basis.col(j) + std::sin(a) * w.col(j);
    }
    if (rp > r) {
      Matrix span(n, 2 * r);
      span << basis, w;
      tilde.rightCols(rp - r) =
          random_complement_basis(n, rp - r, span, mix_seed(s0, 2));
    }
    basis_out = basis;
    tilde_out = tilde;
  };

  build_side(p.theta_u, mix_seed(seed, 11), inst.gt.u, inst.u_tilde);
  build_side(p.theta_v, mix_seed(seed, 22), inst.gt.v, inst.v_tilde);

  GaussianStream g(mix_seed(seed, 33));
  inst.gt.sigma.resize(r);
  for (Index i = 0; i < r; ++i) inst.gt.sigma(i) = std::abs(g.next()) + 0.5;
  return inst;
}

Vector principal_angles(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw invalid_instance("principal_angles: row dimension mismatch");
  if (a.cols() > b.cols())
    throw invalid_instance("principal_angles: need a.cols() <= b.cols()");
  if (!is_orthonormal(a, 1e-8) || !is_orthonormal(b, 1e-8))
    throw invalid_instance("principal_angles: inputs must have orthonormal columns");
  const Vector sv = svd(Matrix(a.transpose() * b)).singulars;
  Vector angles(a.cols());
  for (Index i = 0; i < a.cols(); ++i) {
    const double c = std::clamp(sv(i), 0.0, 1.0);
    // Singular values are non-increasing, so arccos comes out non-decreasing;
    // reverse to the non-increasing convention.
    angles(a.cols() - 1 - i) = std::acos(c) / kDegToRad;
  }
  return angles;
}

BasisPair build_basis_pair(const GroundTruth& gt, const Matrix& u_tilde,
                           const Matrix& v_tilde, const SubspacePrior& p) {
  p.validate();
  const Index n = p.n, r = p.r, rp = p.r_prime;
  if (gt.u.rows() != n || gt.u.cols() != r || gt.v.rows() != n || gt.v.cols() != r ||
      u_tilde.rows() != n || u_tilde.cols() != rp || v_tilde.rows() != n ||
      v_tilde.cols() != rp)
    throw invalid_instance("build_basis_pair: dimension mismatch");

  auto build_side = [&](const Matrix& basis, const Matrix& tilde,
                        const Vector& theta) {
    const Vector measured = principal_angles(basis, tilde);
    for (Index i = 0; i < r; ++i) {
      if (std::abs(measured(i) - theta(i)) > 1e-6)
        throw invalid_instance("build_basis_pair: angles do not match the prior");
      if (theta(i) < kAngleFloorDeg || theta(i) > 90.0 - kAngleFloorDeg)
        throw degenerate_angle(
            "build_basis_pair: angle too close to 0 or 90 degrees");
    }
    // The construction needs the aligned form basis^T tilde = [diag-cos 0].
    Matrix expect = Matrix::Zero(r, rp);
    for (Index j = 0; j < r; ++j)
      expect(j, j) = std::cos(column_angle_rad(theta, j));
    if ((basis.transpose() * tilde - expect).cwiseAbs().maxCoeff() > 1e-8)
      throw invalid_instance(
          "build_basis_pair: prior basis is not aligned with the ground truth "
          "(expected the make_prior_instance convention)");

    const Matrix proj_perp = tilde - basis * (basis.transpose() * tilde);
    Matrix out(n, n);
    out.leftCols(r) = basis;
    for (Index j = 0; j < r; ++j)
      out.col(r + j) = -proj_perp.col(j) / std::sin(column_angle_rad(theta, j));
    out.middleCols(2 * r, rp - r) = -proj_perp.rightCols(rp - r);
    // Complete with any orthonormal basis of the remaining complement.
    Eigen::HouseholderQR<Matrix> qr(Matrix(out.leftCols(r + rp)));
    const Matrix q = qr.householderQ();
    out.rightCols(n - r - rp) = q.rightCols(n - r - rp);
    return out;
  };

  BasisPair bp;
  bp.r = static_cast<int>(r);
  bp.r_prime = static_cast<int>(rp);
  bp.b_left = build_side(gt.u, u_tilde, p.theta_u);
  bp.b_right = build_side(gt.v, v_tilde, p.theta_v);
  return bp;
}

}  // namespace wmr
