#include "wmr/sdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "wmr/optweights.hpp"
#include "wmr/parallel.hpp"
#include "wmr/rng.hpp"

namespace wmr {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Guarded quotient for diagonal-entry ratios: the numerator always carries
// the factors that can vanish in the denominator, so 0/0 resolves to 0.
double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void check_dims(int n, int r, int r_prime) {
  if (!(0 <= r && r <= r_prime && r + r_prime <= n && n > r))
    throw invalid_instance("threshold: need 0 <= r <= r' and r + r' <= n");
}
}  // namespace

double ScaledWeights::v4() const {
  if (v1 > 0.0) return v2 * v3 / v1;
  if (v2 * v3 == 0.0) return 0.0;
  throw invalid_weights("ScaledWeights: v4 undefined (v1 = 0, v2*v3 > 0)");
}

void ScaledWeights::validate() const {
  if (v1 < 0.0 || v2 < 0.0 || v3 < 0.0)
    throw invalid_weights("ScaledWeights: coordinates must be >= 0");
  (void)v4();
}

Alphas alpha_ratios(int n, int r, int r_prime) {
  check_dims(n, r, r_prime);
  const double d2 = r, d3 = r_prime - r, d4 = n - r - r_prime;
  const double den = static_cast<double>(n - r) * (n - r);
  return {d2 * d2 / den, d2 * d3 / den, d2 * d4 / den,
          d3 * d3 / den, d3 * d4 / den, d4 * d4 / den};
}

double psi_nuclear(double t, int n, int r, int r_prime) {
  if (t < 0.0) throw invalid_instance("psi_nuclear: t must be >= 0");
  check_dims(n, r, r_prime);
  const int d2 = r, d3 = r_prime - r, d4 = n - r - r_prime;
  const Alphas a = alpha_ratios(n, r, r_prime);

  double acc = 3.0 * d2 * d2 + t * t * d2;
  if (d2 > 0) {
    const MpParams p1(1.0);
    acc += d2 * d2 * phi_fast(t * a.a22 / std::sqrt(double(d2)), p1);
  }
  if (d2 > 0 && d3 > 0) {
    const int hi = std::max(d2, d3);
    const MpParams s1(double(std::min(d2, d3)) / hi);
    acc += 2.0 * d2 * d3 * phi_fast(t * a.a23 / std::sqrt(double(hi)), s1);
  }
  if (d2 > 0 && d4 > 0) {
    const int hi = std::max(d2, d4);
    const MpParams s2(double(std::min(d2, d4)) / hi);
    acc += 2.0 * d2 * d4 * phi_fast(t * a.a24 / std::sqrt(double(hi)), s2);
  }
  if (d3 > 0 && d4 > 0) {
    const int hi = std::max(d3, d4);
    const MpParams s3(double(std::min(d3, d4)) / hi);
    acc += 2.0 * d3 * d4 * phi_fast(t * a.a34 / std::sqrt(double(hi)), s3);
  }
  if (d3 > 0) {
    const MpParams p1(1.0);
    acc += double(d3) * d3 * phi_fast(t * a.a33 / std::sqrt(double(d3)), p1);
  }
  if (d4 > 0) {
    const MpParams p1(1.0);
    acc += double(d4) * d4 * phi_fast(t * a.a44 / std::sqrt(double(d4)), p1);
  }
  return acc;
}

double scaled_weight_bound(int n) {
  const double root = std::sqrt(double(n) * n + 1.0);
  return n * (1.0 + std::pow(root, 0.25) / std::sqrt(root - n));
}

namespace {

void fill_block_ratios(ThresholdReport& rep, int n, int r, int r_prime) {
  const int d2 = r, d3 = r_prime - r, d4 = n - r - r_prime;
  rep.alpha = alpha_ratios(n, r, r_prime);
  rep.s1 = d3 > 0 ? double(std::min(d2, d3)) / std::max(d2, d3) : 1.0;
  rep.s2 = d4 > 0 ? double(std::min(d2, d4)) / std::max(d2, d4) : 1.0;
  rep.s3 = (d3 > 0 && d4 > 0) ? double(std::min(d3, d4)) / std::max(d3, d4) : 1.0;
}

}  // namespace

ThresholdReport nuclear_threshold(int n, int r, int r_prime) {
  check_dims(n, r, r_prime);
  ThresholdReport rep;
  fill_block_ratios(rep, n, r, r_prime);
  if (r == 0) return rep;  // empty signal: no measurements needed

  OptimizerConfig cfg;
  cfg.tol = 1e-7 * 3.0 * std::sqrt(double(n));
  rep.t_star =
      gss([&](double t) { return psi_nuclear(t, n, r, r_prime); }, 0.0,
          3.0 * std::sqrt(double(n)), cfg);
  rep.m_hat = psi_nuclear(rep.t_star, n, r, r_prime) / (double(n) * n);
  rep.error_lower =
      std::max(0.0, rep.m_hat - 2.0 / (n * std::sqrt(double(n) * r)));
  return rep;
}

namespace {

// One shrinkage block of the weighted objective: a d1 x d2 spectral term whose
// per-index integrand arguments are tau (already divided by sqrt(max(d1,d2))).
// The closed form integrates each argument against the Marchenko-Pastur law;
// the Monte-Carlo oracle evaluates the same arguments on sampled spectra.
struct BlockTerm {
  int d1 = 0, d2 = 0;
  double s = 1.0;
  std::vector<double> tau;
};

struct WeightedFunctional {
  double head_quad = 0.0;  // deterministic quadratic part beyond the 3r^2 head
  std::vector<BlockTerm> blocks;
};

WeightedFunctional weighted_functional(const ScaledWeights& v,
                                       const SubspacePrior& p,
                                       bool sorted_pairing) {
  v.validate();
  p.validate();
  const int n = p.n, r = p.r, rp = p.r_prime;
  const int d2 = r, d3 = rp - r, d4 = n - r - rp;
  const double v1 = v.v1, v2 = v.v2, v3 = v.v3, v4 = v.v4();
  const Alphas a = alpha_ratios(n, r, rp);

  // Per-angle trigonometry in the diagonal order of the adapted bases
  // (increasing angle); index j pairs the j-th u-angle with the j-th v-angle.
  Vector cu(r), su(r), cv(r), sv(r);
  for (int j = 0; j < r; ++j) {
    const double au = p.theta_u(r - 1 - j) * kDegToRad;
    const double av = p.theta_v(r - 1 - j) * kDegToRad;
    cu(j) = std::cos(au);
    su(j) = std::sin(au);
    cv(j) = std::cos(av);
    sv(j) = std::sin(av);
  }

  WeightedFunctional fn;
  double acc = 0.0;
  for (int j = 0; j < r; ++j) {
    acc += v1 * v1 * cu(j) * cu(j) * cv(j) * cv(j) +
           v2 * v2 * cu(j) * cu(j) * sv(j) * sv(j) +
           v3 * v3 * su(j) * su(j) * cv(j) * cv(j) +
           v4 * v4 * su(j) * su(j) * sv(j) * sv(j);
  }

  // Off-diagonal correction sums; the ratio v4/v3 equals v2/v1, so both
  // prefactors are scale-invariant and vanish on the equal-weight ray.  At
  // v = 0 the (v1+v2)^2 / (v1+v3)^2 factors already kill the terms.
  const double pre1 = v1 > 0.0 ? v2 / v1 - 1.0 : 0.0;
  const double pre2 = v1 > 0.0 ? v3 / v1 - 1.0 : 0.0;
  double sum1 = 0.0, sum2 = 0.0;
  for (int j = 0; j < r; ++j) {
    const double num_u = v1 * v1 * cu(j) * cu(j) + v3 * v3 * su(j) * su(j);
    const double num_v = v1 * v1 * cv(j) * cv(j) + v2 * v2 * sv(j) * sv(j);
    sum1 += safe_div(num_u, num_v) * sv(j) * sv(j) * cv(j) * cv(j);
    sum2 += safe_div(num_v, num_u) * su(j) * su(j) * cu(j) * cu(j);
  }
  acc += pre1 * pre1 * (v1 + v2) * (v1 + v2) * sum1;
  acc += pre2 * pre2 * (v1 + v3) * (v1 + v3) * sum2;

  // Diagonal factors of the weighted-support decomposition.
  Vector cl(r), cr(r), e22(r);
  for (int j = 0; j < r; ++j) {
    cl(j) = std::sqrt(v1 * v1 * cu(j) * cu(j) + v3 * v3 * su(j) * su(j));
    cr(j) = std::sqrt(v3 * v3 * cv(j) * cv(j) + v4 * v4 * sv(j) * sv(j));
    const double e11 =
        std::sqrt(v1 * v1 * cu(j) * cu(j) * cv(j) * cv(j) +
                  v2 * v2 * cu(j) * cu(j) * sv(j) * sv(j) +
                  v3 * v3 * su(j) * su(j) * cv(j) * cv(j) +
                  v4 * v4 * su(j) * su(j) * sv(j) * sv(j));
    e22(j) = std::abs(
        safe_div((v4 * v4 - v3 * v3 - v2 * v2 + v1 * v1) * su(j) * cu(j) *
                     sv(j) * cv(j),
                 e11));
  }

  // Truncated diagonal sums take either the angle-index order or (optionally)
  // the largest inverse entries first.
  auto inv_entries = [&](const Vector& diag, int count) {
    std::vector<double> inv(r);
    for (int j = 0; j < r; ++j) inv[j] = safe_div(1.0, diag(j));
    if (sorted_pairing)
      std::sort(inv.begin(), inv.end(), std::greater<double>());
    inv.resize(count);
    return inv;
  };

  fn.head_quad = acc;

  auto block = [&](int rows, int cols, std::vector<double> tau) {
    BlockTerm b;
    b.d1 = rows;
    b.d2 = cols;
    b.s = double(std::min(rows, cols)) / std::max(rows, cols);
    b.tau = std::move(tau);
    fn.blocks.push_back(std::move(b));
  };

  const double rt_r = std::sqrt(double(r));
  {
    std::vector<double> tau(r);
    for (int j = 0; j < r; ++j)
      tau[j] =
          (e22(j) + safe_div(v1 * v3 * v4, cl(j) * cr(j)) * a.a22) / rt_r;
    block(r, r, std::move(tau));
  }
  if (d3 > 0) {
    const int hi = std::max(d2, d3), lo = std::min(d2, d3);
    const double rt = std::sqrt(double(hi));
    std::vector<double> tl, tr;
    for (double icl : inv_entries(cl, lo))
      tl.push_back(v1 * v3 * icl * a.a23 / rt);
    for (double icr : inv_entries(cr, lo))
      tr.push_back(v2 * v3 * icr * a.a23 / rt);
    block(d2, d3, std::move(tl));
    block(d3, d2, std::move(tr));
    block(d3, d3,
          std::vector<double>(d3, v1 * a.a33 / std::sqrt(double(d3))));
  }
  if (d4 > 0) {
    const int hi = std::max(d2, d4), lo = std::min(d2, d4);
    const double rt = std::sqrt(double(hi));
    std::vector<double> tl, tr;
    for (double icl : inv_entries(cl, lo))
      tl.push_back(v1 * v4 * icl * a.a24 / rt);
    for (double icr : inv_entries(cr, lo))
      tr.push_back(v3 * v4 * icr * a.a24 / rt);
    block(d2, d4, std::move(tl));
    block(d4, d2, std::move(tr));
    block(d4, d4,
          std::vector<double>(d4, v4 * a.a44 / std::sqrt(double(d4))));
  }
  if (d3 > 0 && d4 > 0) {
    const int hi = std::max(d3, d4), lo = std::min(d3, d4);
    const double rt = std::sqrt(double(hi));
    block(d3, d4, std::vector<double>(lo, v2 * a.a34 / rt));
    block(d4, d3, std::vector<double>(lo, v3 * a.a34 / rt));
  }
  return fn;
}

}  // namespace

double psi_weighted(const ScaledWeights& v, const SubspacePrior& p,
                    bool sorted_pairing) {
  const WeightedFunctional fn = weighted_functional(v, p, sorted_pairing);
  double acc = 3.0 * double(p.r) * p.r + fn.head_quad;
  for (const BlockTerm& b : fn.blocks) {
    const MpParams ps(b.s);
    const double dmax = std::max(b.d1, b.d2);
    for (double tau : b.tau) acc += dmax * phi_fast(tau, ps);
  }
  return acc;
}

ThresholdReport weighted_threshold(const WeightVector& w, const SubspacePrior& p) {
  w.validate();
  p.validate();
  ThresholdReport rep;
  fill_block_ratios(rep, p.n, p.r, p.r_prime);

  const double wmax = std::max({w.w1, w.w2, w.w3, w.w4()});
  const double t_hi = scaled_weight_bound(p.n) / wmax;
  OptimizerConfig cfg;
  cfg.tol = 1e-8 * t_hi;
  auto along_ray = [&](double t) {
    return psi_weighted({t * w.w1, t * w.w2, t * w.w3}, p);
  };
  rep.t_star = gss(along_ray, 0.0, t_hi, cfg);
  rep.m_hat = along_ray(rep.t_star) / (double(p.n) * p.n);

  const double c_u = std::min(std::sin(p.theta_u(0) * kDegToRad),
                              std::cos(p.theta_u(p.r - 1) * kDegToRad));
  const double c_v = std::min(std::sin(p.theta_v(0) * kDegToRad),
                              std::cos(p.theta_v(p.r - 1) * kDegToRad));
  const double band = 2.0 / (p.n * std::sqrt(double(p.n) * p.r) * c_u * c_v);
  rep.error_lower = std::max(0.0, rep.m_hat - band);
  return rep;
}

std::pair<long, long> transition_bounds(double delta_normalized, double eta,
                                        long ambient) {
  if (!(eta > 0.0 && eta < 1.0))
    throw invalid_instance("transition_bounds: eta must be in (0, 1)");
  if (ambient < 1) throw invalid_instance("transition_bounds: ambient >= 1");
  const double width = std::sqrt(8.0 * std::log(4.0 / eta) * ambient);
  const double center = delta_normalized * ambient;
  return {static_cast<long>(std::ceil(center + width)),
          static_cast<long>(std::floor(center - width))};
}

namespace {

McEstimate summarize(const std::vector<double>& vals,
                     const std::vector<char>& ok, int n) {
  McEstimate est;
  est.trials = static_cast<int>(vals.size());
  double sum = 0.0;
  int kept = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!ok[i]) continue;
    sum += vals[i];
    ++kept;
  }
  est.discarded = est.trials - kept;
  if (kept == 0)
    throw numeric_failure("mc_statistical_dimension: every trial failed");
  const double norm = double(n) * n;
  est.mean = sum / kept / norm;
  if (kept > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!ok[i]) continue;
      const double d = vals[i] / norm - est.mean;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / (kept - 1) / kept);
  } else {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace

McEstimate mc_statistical_dimension_nuclear(const GroundTruth& gt, int trials,
                                            std::uint64_t seed) {
  if (trials < 1) throw invalid_instance("mc: trials >= 1");
  const Index n = gt.u.rows();
  const Index r = gt.u.cols();
  const Matrix sgn = gt.u * gt.v.transpose();

  std::vector<double> vals(trials, 0.0);
  std::vector<char> ok(trials, 1);
  parallel_for(trials, [&](int trial) {
    const Matrix g = gaussian_matrix(n, n, mix_seed(seed, trial));
    const Matrix gu_perp = g - gt.u * (gt.u.transpose() * g);
    const Matrix perp = gu_perp - gu_perp * gt.v * gt.v.transpose();
    const Matrix in_t = g - perp;
    const double t_sq = in_t.squaredNorm();
    const double inner = (g.transpose() * sgn).trace();
    const Vector sv = perp.squaredNorm() > 0 ? svd(perp).singulars : Vector(0);

    auto dist = [&](double t) {
      double acc = t_sq - 2.0 * t * inner + t * t * r;
      for (Index i = 0; i < sv.size(); ++i) acc += shrinkage_sq(sv(i), t);
      return acc;
    };
    OptimizerConfig cfg;
    const double hi = 3.0 * std::sqrt(double(n));
    cfg.tol = 1e-6 * hi;
    const double t_star = gss(dist, 0.0, hi, cfg);
    vals[trial] = dist(t_star);
  });
  return summarize(vals, ok, static_cast<int>(n));
}

McEstimate mc_statistical_dimension_weighted(const PriorInstance& inst,
                                             const SubspacePrior& p,
                                             const WeightVector& w, int trials,
                                             std::uint64_t seed) {
  if (trials < 1) throw invalid_instance("mc: trials >= 1");
  w.validate();
  (void)inst;
  const int n = p.n, r = p.r;

  // Sample the same block functional that the closed form integrates: the
  // Gaussian head is matched against the deterministic quadratic part, and
  // each shrinkage block evaluates its per-index arguments on the empirical
  // spectrum of an independent Gaussian block instead of the asymptotic
  // Marchenko-Pastur law.  The per-draw value is then minimized over the
  // scaling of the weight vector, mirroring the outer infimum.
  const ScaledWeights unit{w.w1, w.w2, w.w3};
  const WeightedFunctional shape = weighted_functional(unit, p, false);

  const double wmax = std::max({w.w1, w.w2, w.w3, w.w4()});
  const double t_hi = scaled_weight_bound(n) / wmax;

  std::vector<double> vals(trials, 0.0);
  std::vector<char> ok(trials, 1);
  parallel_for(trials, [&](int trial) {
    GaussianStream g(mix_seed(seed, trial));
    // head: 3r^2 independent Gaussians against a vector of norm sqrt(head_quad)
    const double x1 = g.next();
    double chi_rest = 0.0;
    for (int k = 1; k < 3 * r * r; ++k) {
      const double x = g.next();
      chi_rest += x * x;
    }
    // one spectrum per shrinkage block, drawn once per trial
    std::vector<Vector> spectra;
    spectra.reserve(shape.blocks.size());
    for (const BlockTerm& b : shape.blocks) {
      Matrix block(b.d1, b.d2);
      for (Index j = 0; j < b.d2; ++j)
        for (Index i = 0; i < b.d1; ++i) block(i, j) = g.next();
      Eigen::JacobiSVD<Matrix> sv(block);
      spectra.push_back(sv.singularValues());
    }

    auto value = [&](double t) {
      const WeightedFunctional fn =
          weighted_functional({t * w.w1, t * w.w2, t * w.w3}, p, false);
      const double mu = std::sqrt(fn.head_quad);
      double acc = (x1 - mu) * (x1 - mu) + chi_rest;
      for (std::size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        const BlockTerm& b = fn.blocks[bi];
        const Vector& sig = spectra[bi];
        const double dmin = std::min(b.d1, b.d2);
        const double rt_dmax = std::sqrt(double(std::max(b.d1, b.d2)));
        for (double tau : b.tau) {
          const double thr = rt_dmax * tau;
          double sum = 0.0;
          for (Index k = 0; k < sig.size(); ++k) {
            const double d = sig(k) - thr;
            if (d > 0.0) sum += d * d;
          }
          acc += sum / dmin;
        }
      }
      return acc;
    };

    OptimizerConfig cfg;
    cfg.tol = 1e-6 * t_hi;
    const double t_star = gss(value, 0.0, t_hi, cfg);
    vals[trial] = std::min(value(t_star), value(0.0));
  });
  return summarize(vals, ok, n);
}

}  // namespace wmr
