#pragma once

#include <functional>

#include "wmr/sdim.hpp"

namespace wmr {

struct OptimizerConfig {
  double tol = 1e-6;
  int maxiter = 200;       // outer coordinate-descent sweeps
  int gss_maxiter = 100;   // iterations per line search
  double bracket_hi = 0.0; // 0 = use the analytic bound for the instance size
};

/// Golden-section search for a unimodal f on [a, b]; returns the endpoint of
/// the final interval with the smaller value.
double gss(const std::function<double(double)>& f, double a, double b,
           const OptimizerConfig& cfg = {});

struct WeightsResult {
  ScaledWeights v_star;  // raw minimizer of the threshold integrand
  WeightVector w_star;   // v_star rescaled so max(w1, w2, w3, w4) == 1
  double m_hat = 0.0;    // normalized threshold at v_star
  int sweeps = 0;
};

/// Cyclic coordinate descent on v -> psi_weighted(v, p) starting from
/// (1,1,1), each coordinate minimized by gss on [1e-8, bracket_hi].  Stops
/// when the iterate or objective change drops below cfg.tol, or after
/// cfg.maxiter sweeps.  The minimizer is unique up to positive scaling.
WeightsResult optimize_weights(const SubspacePrior& p,
                               const OptimizerConfig& cfg = {});

/// Same, from a caller-chosen starting point (used for restart checks).
WeightsResult optimize_weights_from(const SubspacePrior& p, ScaledWeights v0,
                                    const OptimizerConfig& cfg = {});

struct ConsistencyReport {
  bool consistent = false;
  double expected_w4 = 0.0;
  double relative_gap = 0.0;
};

/// Checks a reported 4-tuple against the constraint w4 = w2*w3/w1 (0.1%
/// relative tolerance by default).
ConsistencyReport weights_consistency_check(double w1, double w2, double w3,
                                            double w4, double rel_tol = 1e-3);

}  // namespace wmr
