#include "wmr/optweights.hpp"

#include <cmath>

namespace wmr {

double gss(const std::function<double(double)>& f, double a, double b,
           const OptimizerConfig& cfg) {
  if (!(a < b)) throw invalid_instance("gss: need a < b");
  const double tau = (std::sqrt(5.0) - 1.0) / 2.0;  // golden ratio conjugate
  double x1 = a + (1.0 - tau) * (b - a);
  double x2 = a + tau * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < cfg.gss_maxiter && (b - a) > cfg.tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + (1.0 - tau) * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + tau * (b - a);
      f2 = f(x2);
    }
  }
  return f(a) <= f(b) ? a : b;
}

namespace {
constexpr double kCoordinateFloor = 1e-8;  // v1 must stay positive
}

WeightsResult optimize_weights_from(const SubspacePrior& p, ScaledWeights v0,
                                    const OptimizerConfig& cfg) {
  p.validate();
  const double hi =
      cfg.bracket_hi > 0.0 ? cfg.bracket_hi : scaled_weight_bound(p.n);
  if (kCoordinateFloor >= hi)
    throw config_error("optimize_weights: empty bracket");

  ScaledWeights v = v0;
  double fv = psi_weighted(v, p);
  WeightsResult res;
  for (int sweep = 1; sweep <= cfg.maxiter; ++sweep) {
    const ScaledWeights v_prev = v;
    const double f_prev = fv;
    for (int coord = 0; coord < 3; ++coord) {
      double* slot = coord == 0 ? &v.v1 : coord == 1 ? &v.v2 : &v.v3;
      auto line = [&](double z) {
        ScaledWeights cand = v;
        (coord == 0 ? cand.v1 : coord == 1 ? cand.v2 : cand.v3) = z;
        return psi_weighted(cand, p);
      };
      OptimizerConfig line_cfg = cfg;
      line_cfg.tol = cfg.tol * 1e-2;
      const double z = gss(line, kCoordinateFloor, hi, line_cfg);
      if (line(z) <= fv) {
        *slot = z;
        fv = line(z);
      }
    }
    res.sweeps = sweep;
    const double step = std::sqrt((v.v1 - v_prev.v1) * (v.v1 - v_prev.v1) +
                                  (v.v2 - v_prev.v2) * (v.v2 - v_prev.v2) +
                                  (v.v3 - v_prev.v3) * (v.v3 - v_prev.v3));
    if (step < cfg.tol || std::abs(f_prev - fv) < cfg.tol) break;
  }

  res.v_star = v;
  res.m_hat = fv / (double(p.n) * p.n);
  const double scale = std::max({v.v1, v.v2, v.v3, v.v4()});
  res.w_star = {v.v1 / scale, v.v2 / scale, v.v3 / scale};
  return res;
}

WeightsResult optimize_weights(const SubspacePrior& p,
                               const OptimizerConfig& cfg) {
  return optimize_weights_from(p, {1.0, 1.0, 1.0}, cfg);
}

ConsistencyReport weights_consistency_check(double w1, double w2, double w3,
                                            double w4, double rel_tol) {
  ConsistencyReport rep;
  if (!(w1 > 0.0 && w2 > 0.0 && w3 > 0.0)) return rep;
  rep.expected_w4 = w2 * w3 / w1;
  rep.relative_gap = std::abs(w4 - rep.expected_w4) /
                     std::max(std::abs(rep.expected_w4), 1e-300);
  rep.consistent = rep.relative_gap <= rel_tol;
  return rep;
}

}  // namespace wmr
