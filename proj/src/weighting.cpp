#include "wmr/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace wmr {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

Matrix apply_h(const WeightVector& w, const Matrix& u_tilde,
               const Matrix& v_tilde, const Matrix& z) {
  w.validate();
  if (u_tilde.rows() != z.rows() || v_tilde.rows() != z.cols())
    throw invalid_instance("apply_h: dimension mismatch");
  const Matrix pu_z = u_tilde * (u_tilde.transpose() * z);   // P z
  const Matrix z_pv = z * v_tilde * v_tilde.transpose();     // z Q  (reused)
  const Matrix pu_z_pv = pu_z * v_tilde * v_tilde.transpose();
  return w.w1 * pu_z_pv + w.w2 * (pu_z - pu_z_pv) + w.w3 * (z_pv - pu_z_pv) +
         w.w4() * (z - pu_z - z_pv + pu_z_pv);
}

Matrix apply_h_inverse(const WeightVector& w, const Matrix& u_tilde,
                       const Matrix& v_tilde, const Matrix& z) {
  w.validate();
  return apply_h({1.0 / w.w1, 1.0 / w.w2, 1.0 / w.w3}, u_tilde, v_tilde, z);
}

WeightedDecomposition decompose(const WeightVector& w, const BasisPair& bp,
                                const SubspacePrior& p) {
  w.validate();
  p.validate();
  const Index n = p.n, r = p.r, rp = p.r_prime;
  if (bp.b_left.rows() != n || bp.r != r || bp.r_prime != rp)
    throw invalid_instance("decompose: basis pair does not match the prior");

  WeightedDecomposition dec;
  dec.b_left = bp.b_left;
  dec.b_right = bp.b_right;
  dec.r = static_cast<int>(r);
  dec.r_prime = static_cast<int>(rp);
  dec.c_left.resize(r);
  dec.c_right.resize(r);
  dec.l12.resize(r);
  dec.r12.resize(r);

  // One side of the factorization: the 2r x 2r angle block mixes the basis
  // block with its tilted copy, the trailing blocks are plain scalings.
  auto build_side = [&](const Vector& theta, double wa, double wb, double w_3,
                        double w_4, Matrix& ortho, Matrix& tri, Vector& c_diag,
                        Vector& coupling) {
    ortho = Matrix::Identity(n, n);
    tri = Matrix::Zero(n, n);
    for (Index j = 0; j < r; ++j) {
      // Diagonal angle matrices list angles in increasing order.
      const double a = theta(r - 1 - j) * kDegToRad;
      const double c = std::cos(a), s = std::sin(a);
      const double cd = std::sqrt(wa * wa * c * c + wb * wb * s * s);
      c_diag(j) = cd;
      coupling(j) = (wb * wb - wa * wa) * s * c / cd;

      const double diag = (wa * c * c + wb * s * s) / cd;
      const double off = (wa - wb) * s * c / cd;
      ortho(j, j) = diag;
      ortho(j, r + j) = off;
      ortho(r + j, j) = -off;
      ortho(r + j, r + j) = diag;

      tri(j, j) = cd;
      tri(j, r + j) = coupling(j);
      tri(r + j, r + j) = wa * wb / cd;
    }
    for (Index j = 2 * r; j < r + rp; ++j) tri(j, j) = w_3;
    for (Index j = r + rp; j < n; ++j) tri(j, j) = w_4;
  };

  build_side(p.theta_u, w.w1, w.w3, w.w1, w.w3, dec.o_left, dec.l, dec.c_left,
             dec.l12);
  build_side(p.theta_v, w.w3, w.w4(), w.w3, w.w4(), dec.o_right, dec.r_tri,
             dec.c_right, dec.r12);
  return dec;
}

SvdTriple weighted_svd(const GroundTruth& gt, const WeightedDecomposition& dec,
                       const WeightVector& w) {
  w.validate();
  const Index r = dec.r;
  if (gt.sigma.size() != r)
    throw invalid_instance("weighted_svd: rank mismatch");
  const Matrix ql = dec.b_left * dec.o_left;
  const Matrix qr = dec.b_right * dec.o_right;

  Vector vals(r);
  for (Index j = 0; j < r; ++j)
    vals(j) = dec.c_left(j) * gt.sigma(j) * dec.c_right(j) / w.w3;

  std::vector<Index> order(r);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return vals(a) > vals(b); });

  SvdTriple out;
  out.left.resize(ql.rows(), r);
  out.right.resize(qr.rows(), r);
  out.singulars.resize(r);
  for (Index k = 0; k < r; ++k) {
    out.singulars(k) = vals(order[k]);
    out.left.col(k) = ql.col(order[k]);
    out.right.col(k) = qr.col(order[k]);
  }
  return out;
}

SupportProjectors support_projectors(const WeightedDecomposition& dec) {
  SupportProjectors sp;
  sp.r = dec.r;
  sp.q_left = dec.b_left * dec.o_left;
  sp.q_right = dec.b_right * dec.o_right;
  sp.sgn = sp.q_left.leftCols(dec.r) * sp.q_right.leftCols(dec.r).transpose();
  return sp;
}

}  // namespace wmr
