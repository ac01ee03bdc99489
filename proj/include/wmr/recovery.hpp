#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wmr/weighting.hpp"

namespace wmr {

/// m Gaussian linear measurements of an n x n matrix: row i of `a` is a
/// vectorized sensing matrix with i.i.d. N(0,1) entries, y = a * vec(X).
/// vec() stacks columns (Eigen's native layout).
struct MeasurementEnsemble {
  int m = 0;
  int n = 0;
  Matrix a;  // m x n^2
  Vector y;  // m
};

MeasurementEnsemble measure(const Matrix& x, int m, std::uint64_t seed);

struct SolverParams {
  double rho = 1.0;             // splitting penalty
  int max_iter = 2000;
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double success_threshold = 1e-2;
};

struct SolveDiagnostics {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  double objective = 0.0;                 // nuclear norm of the final iterate
  std::vector<double> objective_trace;    // per-iteration, feasible iterate
};

/// Solves  min ||h_w(Z)||_*  s.t.  A vec(Z) = y  through the change of
/// variable W = h_w(Z): alternating splitting between singular-value
/// soft-thresholding and exact projection onto the affine constraint set of
/// the composed operator A h_w^{-1}.  Returns Z_hat.
std::pair<Matrix, SolveDiagnostics> solve_weighted_nuclear(
    const MeasurementEnsemble& e, const WeightVector& w, const Matrix& u_tilde,
    const Matrix& v_tilde, const SolverParams& params = {});

/// min ||Z||_*  s.t.  A vec(Z) = y (unweighted program).
std::pair<Matrix, SolveDiagnostics> solve_nuclear(const MeasurementEnsemble& e,
                                                  const SolverParams& params = {});

/// ||x - x_hat||_F / ||x||_F; throws undefined_value when x == 0.
double relative_error(const Matrix& x, const Matrix& x_hat);

bool is_success(const Matrix& x, const Matrix& x_hat, double threshold);

/// Dense n^2 x n^2 matrix of the weighted operator in the vec basis
/// (Kronecker assembly); used to compose measurement operators.
Matrix h_operator_matrix(const WeightVector& w, const Matrix& u_tilde,
                         const Matrix& v_tilde);

}  // namespace wmr
