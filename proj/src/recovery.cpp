#include "wmr/recovery.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "wmr/rng.hpp"

namespace wmr {

MeasurementEnsemble measure(const Matrix& x, int m, std::uint64_t seed) {
  if (x.rows() != x.cols())
    throw invalid_instance("measure: square matrices only");
  if (m < 1) throw invalid_instance("measure: m >= 1");
  const int n = static_cast<int>(x.rows());
  MeasurementEnsemble e;
  e.m = m;
  e.n = n;
  e.a = gaussian_matrix(m, Index(n) * n, seed);
  e.y = e.a * Eigen::Map<const Vector>(x.data(), Index(n) * n);
  return e;
}

Matrix h_operator_matrix(const WeightVector& w, const Matrix& u_tilde,
                         const Matrix& v_tilde) {
  w.validate();
  const Index n = u_tilde.rows();
  const Matrix pu = u_tilde * u_tilde.transpose();
  const Matrix pu_c = Matrix::Identity(n, n) - pu;
  const Matrix pv = v_tilde * v_tilde.transpose();
  const Matrix pv_c = Matrix::Identity(n, n) - pv;
  // vec(P Z Q) = (Q kron P) vec(Z) for symmetric Q, column-stacked vec.
  return w.w1 * kroneckerProduct(pv, pu) + w.w2 * kroneckerProduct(pv_c, pu) +
         w.w3 * kroneckerProduct(pv, pu_c) +
         w.w4() * kroneckerProduct(pv_c, pu_c);
}

namespace {

Matrix svt(const Matrix& z, double threshold) {
  SvdTriple t = svd(z);
  for (Index i = 0; i < t.singulars.size(); ++i)
    t.singulars(i) = std::max(0.0, t.singulars(i) - threshold);
  return t.left * t.singulars.asDiagonal() * t.right.transpose();
}

double nuclear_norm(const Matrix& z) { return svd(z).singulars.sum(); }

// min ||W||_* s.t. a_op * vec(W) = y, by alternating splitting with exact
// affine projection.  The problem is pre-scaled by the Frobenius norm of the
// minimum-norm feasible point so the penalty rho is dimensionless.
std::pair<Matrix, SolveDiagnostics> solve_core(const Matrix& a_op,
                                               const Vector& y, int n,
                                               const SolverParams& params) {
  const Index big_n = Index(n) * n;
  Eigen::LDLT<Matrix> gram(Matrix(a_op * a_op.transpose()));
  if (gram.info() != Eigen::Success)
    throw numeric_failure("solve: measurement Gram matrix factorization failed");

  auto unvec = [n](const Vector& v) {
    return Matrix(Eigen::Map<const Matrix>(v.data(), n, n));
  };
  auto vec = [big_n](const Matrix& m) {
    return Vector(Eigen::Map<const Vector>(m.data(), big_n));
  };

  const Vector w_min_vec = a_op.transpose() * gram.solve(y);
  double scale = unvec(w_min_vec).norm();
  if (scale < 1e-12) scale = 1.0;
  const Vector ys = y / scale;

  auto affine_project = [&](const Vector& v) {
    return Vector(v - a_op.transpose() * gram.solve(a_op * v - ys));
  };

  Matrix w2 = unvec(w_min_vec) / scale;
  Matrix w1 = w2;
  Matrix dual = Matrix::Zero(n, n);

  SolveDiagnostics diag;
  diag.objective_trace.reserve(params.max_iter);
  for (int it = 1; it <= params.max_iter; ++it) {
    w1 = svt(w2 - dual, 1.0 / params.rho);
    const Matrix w2_prev = w2;
    w2 = unvec(affine_project(vec(w1 + dual)));
    dual += w1 - w2;

    diag.iterations = it;
    diag.primal_residual = (w1 - w2).norm();
    diag.dual_residual = params.rho * (w2 - w2_prev).norm();
    diag.objective_trace.push_back(scale * nuclear_norm(w2));
    const double ref = std::max(1.0, w2.norm());
    if (diag.primal_residual <= params.primal_tol * ref &&
        diag.dual_residual <= params.dual_tol * ref) {
      diag.converged = true;
      break;
    }
  }
  const Matrix w_out = scale * w2;  // feasible by construction
  diag.objective = nuclear_norm(w_out);
  return {w_out, diag};
}

}  // namespace

std::pair<Matrix, SolveDiagnostics> solve_weighted_nuclear(
    const MeasurementEnsemble& e, const WeightVector& w, const Matrix& u_tilde,
    const Matrix& v_tilde, const SolverParams& params) {
  w.validate();
  if (u_tilde.rows() != e.n || v_tilde.rows() != e.n)
    throw invalid_instance("solve_weighted_nuclear: dimension mismatch");
  const WeightVector w_inv{1.0 / w.w1, 1.0 / w.w2, 1.0 / w.w3};
  const Matrix composed = e.a * h_operator_matrix(w_inv, u_tilde, v_tilde);
  auto [w_hat, diag] = solve_core(composed, e.y, e.n, params);
  return {apply_h_inverse(w, u_tilde, v_tilde, w_hat), diag};
}

std::pair<Matrix, SolveDiagnostics> solve_nuclear(const MeasurementEnsemble& e,
                                                  const SolverParams& params) {
  return solve_core(e.a, e.y, e.n, params);
}

double relative_error(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    throw invalid_instance("relative_error: shape mismatch");
  const double denom = x.norm();
  if (denom == 0.0)
    throw undefined_value("relative_error: reference matrix is zero");
  return (x - x_hat).norm() / denom;
}

bool is_success(const Matrix& x, const Matrix& x_hat, double threshold) {
  return relative_error(x, x_hat) <= threshold;
}

}  // namespace wmr
