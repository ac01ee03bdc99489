#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wmr/errors.hpp"
#include "wmr/geometry.hpp"
#include "wmr/optweights.hpp"
#include "wmr/recovery.hpp"
#include "wmr/rng.hpp"

using namespace wmr;

namespace {

// prior with very small principal angles and its ground truth
struct StrongPriorCase {
  SubspacePrior p;
  PriorInstance inst;
  WeightVector w_opt;
};

StrongPriorCase strong_prior_case() {
  Vector tu(3), tv(3);
  tu << 0.0196, 0.0156, 0.005;
  tv << 0.0258, 0.0146, 0.0098;
  StrongPriorCase c{make_prior(10, 3, 3, tu, tv), {}, {1, 1, 1}};
  c.inst = make_prior_instance(c.p, 7);
  c.w_opt = optimize_weights(c.p).w_star;
  return c;
}

}  // namespace

TEST_CASE("measurement ensemble basics") {
  const Matrix x = gaussian_matrix(6, 6, 3);
  const MeasurementEnsemble e = measure(x, 14, 5);
  CHECK(e.m == 14);
  CHECK(e.n == 6);
  CHECK(e.a.rows() == 14);
  CHECK(e.a.cols() == 36);
  // y is consistent with the sensing matrix
  Vector vecx(36);
  for (int j = 0; j < 6; ++j) vecx.segment(6 * j, 6) = x.col(j);
  CHECK((e.y - e.a * vecx).norm() <= 1e-10 * e.y.norm());
  // determinism
  const MeasurementEnsemble again = measure(x, 14, 5);
  CHECK((again.a - e.a).norm() == 0.0);
  CHECK_THROWS_AS(measure(x, 0, 5), invalid_instance);
}

TEST_CASE("relative error and success predicate") {
  const Matrix x = gaussian_matrix(5, 5, 11);
  CHECK(relative_error(x, x) == 0.0);
  CHECK(relative_error(x, Matrix::Zero(5, 5)) == doctest::Approx(1.0));
  CHECK(relative_error(x, 1.005 * x) == doctest::Approx(0.005));
  CHECK_THROWS_AS(relative_error(Matrix::Zero(5, 5), x), undefined_value);
  CHECK(is_success(x, 1.005 * x, 1e-2));
  CHECK_FALSE(is_success(x, 1.05 * x, 1e-2));
}

TEST_CASE("weighted operator matrix matches the block action") {
  const SubspacePrior p = make_prior(7, 2, 3, Vector::Constant(2, 35.0),
                                     Vector::Constant(2, 55.0));
  const PriorInstance inst = make_prior_instance(p, 17);
  const WeightVector w{0.7, 1.4, 2.1};
  const Matrix h = h_operator_matrix(w, inst.u_tilde, inst.v_tilde);

  const Matrix z = gaussian_matrix(7, 7, 23);
  const Matrix hz = apply_h(w, inst.u_tilde, inst.v_tilde, z);
  Vector vecz(49), vechz(49);
  for (int j = 0; j < 7; ++j) {
    vecz.segment(7 * j, 7) = z.col(j);
    vechz.segment(7 * j, 7) = hz.col(j);
  }
  CHECK((h * vecz - vechz).norm() <= 1e-10 * vechz.norm());

  // unit weights give the identity operator
  const Matrix h1 = h_operator_matrix({1, 1, 1}, inst.u_tilde, inst.v_tilde);
  CHECK((h1 - Matrix::Identity(49, 49)).norm() <= 1e-10);

  // reciprocal weights invert the operator
  const Matrix hinv = h_operator_matrix({1.0 / w.w1, 1.0 / w.w2, 1.0 / w.w3},
                                        inst.u_tilde, inst.v_tilde);
  CHECK((h * hinv - Matrix::Identity(49, 49)).norm() <= 1e-8);
}

TEST_CASE("nuclear solver recovers from a full set of measurements") {
  const SubspacePrior p = make_prior(8, 2, 2, Vector::Constant(2, 30.0),
                                     Vector::Constant(2, 40.0));
  const PriorInstance inst = make_prior_instance(p, 29);
  const Matrix x = inst.gt.x();
  const MeasurementEnsemble e = measure(x, 64, 31);
  const auto [xh, diag] = solve_nuclear(e);
  CHECK(diag.converged);
  CHECK(relative_error(x, xh) <= 1e-6);
}

TEST_CASE("nuclear solver transition around the predicted threshold") {
  const SubspacePrior p = make_prior(10, 3, 3, Vector::Constant(3, 30.0),
                                     Vector::Constant(3, 30.0));
  const PriorInstance inst = make_prior_instance(p, 41);
  const Matrix x = inst.gt.x();
  // comfortably above the transition (~0.73 n^2)
  {
    const MeasurementEnsemble e = measure(x, 88, 43);
    const auto [xh, diag] = solve_nuclear(e);
    CHECK(is_success(x, xh, 1e-2));
  }
  // far below it
  {
    const MeasurementEnsemble e = measure(x, 30, 43);
    const auto [xh, diag] = solve_nuclear(e);
    CHECK_FALSE(is_success(x, xh, 1e-2));
  }
}

TEST_CASE("weighted solver with unit weights equals the nuclear solver") {
  const SubspacePrior p = make_prior(8, 2, 3, Vector::Constant(2, 25.0),
                                     Vector::Constant(2, 45.0));
  const PriorInstance inst = make_prior_instance(p, 53);
  const Matrix x = inst.gt.x();
  const MeasurementEnsemble e = measure(x, 50, 59);
  const auto [xn, dn] = solve_nuclear(e);
  const auto [xw, dw] =
      solve_weighted_nuclear(e, {1, 1, 1}, inst.u_tilde, inst.v_tilde);
  CHECK((xn - xw).norm() <= 1e-5 * std::max(1.0, xn.norm()));
}

TEST_CASE("weighted solver is invariant to weight scaling") {
  const SolverParams params;
  const StrongPriorCase c = strong_prior_case();
  const Matrix x = c.inst.gt.x();
  const MeasurementEnsemble e = measure(x, 40, 61);
  const auto [base, d0] =
      solve_weighted_nuclear(e, c.w_opt, c.inst.u_tilde, c.inst.v_tilde, params);
  for (double s : {0.1, 10.0}) {
    const WeightVector ws{s * c.w_opt.w1, s * c.w_opt.w2, s * c.w_opt.w3};
    const auto [xh, d] =
        solve_weighted_nuclear(e, ws, c.inst.u_tilde, c.inst.v_tilde, params);
    CHECK((xh - base).norm() <= 1e-6 * std::max(1.0, base.norm()));
  }
}

TEST_CASE("optimal weights recover far below the unweighted threshold") {
  const StrongPriorCase c = strong_prior_case();
  const Matrix x = c.inst.gt.x();
  const MeasurementEnsemble e = measure(x, 30, 67);
  const auto [xw, dw] =
      solve_weighted_nuclear(e, c.w_opt, c.inst.u_tilde, c.inst.v_tilde);
  CHECK(is_success(x, xw, 1e-2));
  const auto [xn, dn] = solve_nuclear(e);
  CHECK_FALSE(is_success(x, xn, 1e-2));
}

TEST_CASE("solver diagnostics are coherent") {
  const SubspacePrior p = make_prior(8, 2, 2, Vector::Constant(2, 20.0),
                                     Vector::Constant(2, 30.0));
  const PriorInstance inst = make_prior_instance(p, 71);
  const Matrix x = inst.gt.x();
  const MeasurementEnsemble e = measure(x, 48, 73);
  SolverParams params;
  const auto [xh, diag] = solve_nuclear(e, params);
  CHECK(diag.converged);
  CHECK(diag.iterations <= params.max_iter);
  // residual tolerances are relative to the (pre-scaled) iterate norm
  const double ref = std::max(1.0, xh.norm());
  CHECK(diag.primal_residual <= params.primal_tol * ref);
  CHECK(diag.dual_residual <= params.dual_tol * ref);
  REQUIRE(!diag.objective_trace.empty());
  CHECK(diag.objective ==
        doctest::Approx(diag.objective_trace.back()).epsilon(1e-9));
  // the objective settles: the final value does not exceed the initial one
  CHECK(diag.objective_trace.back() <= diag.objective_trace.front() + 1e-9);
  // feasibility of the returned iterate
  Vector vecx(64);
  for (int j = 0; j < 8; ++j) vecx.segment(8 * j, 8) = xh.col(j);
  CHECK((e.a * vecx - e.y).norm() <= 1e-6 * e.y.norm());
}
