#pragma once

#include <cstdint>
#include <utility>

#include "wmr/weighting.hpp"

namespace wmr {

/// Scaled weight vector v = t * w; the scale t of the polar parametrization is
/// folded into the weights.
struct ScaledWeights {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  double v4() const;  // v2*v3/v1; throws invalid_weights when undefined
  void validate() const;
};

/// Squared limiting block-dimension ratios: a_ij = d_i * d_j / (n - r)^2 with
/// d2 = r, d3 = r' - r, d4 = n - r - r'.
struct Alphas {
  double a22, a23, a24, a33, a34, a44;
};

Alphas alpha_ratios(int n, int r, int r_prime);

struct ThresholdReport {
  double m_hat = 0.0;       // normalized threshold in [0, 1]
  double t_star = 0.0;      // minimizing scale
  double error_lower = 0.0; // m_hat minus the analytic band width, floored at 0
  Alphas alpha{};
  double s1 = 1.0, s2 = 1.0, s3 = 1.0;  // block aspect ratios
};

/// Unnormalized (n^2-scaled) threshold integrand of the unweighted program at
/// scale t.  Divide the minimum over t by n^2 to get the normalized threshold.
double psi_nuclear(double t, int n, int r, int r_prime);

/// Minimizes psi_nuclear over t by golden-section search on [0, 3*sqrt(n)].
ThresholdReport nuclear_threshold(int n, int r, int r_prime);

/// Unnormalized threshold integrand of the weighted program at scaled weights
/// v.  `sorted_pairing` switches the truncated diagonal sums from angle-index
/// order to sorted-singular-value order (the two agree for consistently
/// sorted angle vectors).
double psi_weighted(const ScaledWeights& v, const SubspacePrior& p,
                    bool sorted_pairing = false);

/// Upper bracket for the scaled-weight coordinates: the minimum of the
/// threshold integrand is attained with every coordinate in (0, B],
/// B = n(1 + (n^2+1)^{1/4} / sqrt(sqrt(n^2+1) - n)).
double scaled_weight_bound(int n);

/// Minimizes psi_weighted along the ray t -> t*w; fills the analytic error
/// band with c = min{sin theta_u(1), cos theta_u(r)} * min{sin theta_v(1),
/// cos theta_v(r)}.
ThresholdReport weighted_threshold(const WeightVector& w, const SubspacePrior& p);

/// Success/failure measurement counts at tolerance eta around a normalized
/// threshold delta: delta*N +/- sqrt(8 log(4/eta) N), rounded outward.
std::pair<long, long> transition_bounds(double delta_normalized, double eta,
                                        long ambient);

struct McEstimate {
  double mean = 0.0;       // normalized by n^2
  double std_error = 0.0;  // of the mean; NaN when trials == 1
  int trials = 0;
  int discarded = 0;       // trials whose inner solver failed to converge
};

/// Monte-Carlo estimate of the normalized statistical dimension of the
/// unweighted program's descent cone at X: per Gaussian draw G minimizes
///   ||P_T(G) - t sgn(X)||_F^2 + sum_i (sigma_i(P_Tperp(G)) - t)_+^2
/// over t >= 0.
McEstimate mc_statistical_dimension_nuclear(const GroundTruth& gt, int trials,
                                            std::uint64_t seed);

/// Same for the weighted program: per draw, golden-section search over the
/// scale t with an inner projected-gradient minimization over the spectral
/// ball in the complement of the weighted support.
McEstimate mc_statistical_dimension_weighted(const PriorInstance& inst,
                                             const SubspacePrior& p,
                                             const WeightVector& w, int trials,
                                             std::uint64_t seed);

}  // namespace wmr
