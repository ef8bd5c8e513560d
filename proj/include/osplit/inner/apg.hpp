#pragma once

#include <cmath>
#include <limits>

#include "osplit/core/rng.hpp"
#include "osplit/inner/inner_problem.hpp"

namespace osplit {

/// Accelerated proximal gradient on phi with g as the smooth part and the
/// quadratic as the prox term. Constant momentum for the alpha-strongly
/// convex composite. Works in any g mode, paying kappa_g units per gradient.
///
/// In certified mode the certificate is taken at the extrapolated point y
/// with the gradient the step needs anyway, so checks are free and run every
/// iteration; the returned point is that y.
inline InnerReport solve_apg(const InnerProblem& phi, const Vector& start, const StopRule& stop,
                             Rng& /*rng*/, OracleTally& tally, const InnerOptions& opt = {}) {
  phi.validate();
  validate(stop);
  require_dim(start, phi.dim(), "solve_apg");

  const double lg = g_smoothness_bound(phi.g);
  const double t = lg > 0.0 ? 1.0 / lg : std::numeric_limits<double>::infinity();
  const double q = lg > 0.0 ? phi.alpha / (lg + phi.alpha) : 1.0;
  const double momentum = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));
  const std::int64_t kappa = kappa_g(phi.g);
  const std::int64_t units0 = tally.g_basic_units;

  InnerReport rep;
  Vector v = start, v_prev = start, y = start;

  if (const auto* fixed = std::get_if<FixedIters>(&stop)) {
    for (std::int64_t k = 0; k < fixed->n; ++k) {
      y = v + momentum * (v - v_prev);
      const Vector gy = grad_g_full(phi.g, y, tally);
      v_prev = v;
      v = prox_quadratic(y - t * gy, t, phi.beta, phi.alpha);
    }
    rep.v_hat = v;
    rep.iterations = fixed->n;
    rep.g_units_used = tally.g_basic_units - units0;
    return rep;
  }

  const double eps = std::get<CertifiedGap>(stop).eps;
  double best_bound = std::numeric_limits<double>::infinity();
  Vector best = start;
  for (std::int64_t k = 0;; ++k) {
    if (tally.g_basic_units - units0 + kappa > opt.max_units) {
      rep.v_hat = best;
      rep.iterations = k;
      rep.g_units_used = tally.g_basic_units - units0;
      if (std::isfinite(best_bound)) rep.certified_gap_bound = best_bound;
      rep.status = SolveStatus::budget_exhausted;
      return rep;
    }
    y = v + momentum * (v - v_prev);
    const Vector gy = grad_g_full(phi.g, y, tally);
    const double bound = gap_bound_from_gradient(phi, y, gy, opt.c_cert);
    if (bound < best_bound) {
      best_bound = bound;
      best = y;
    }
    if (bound <= eps) {
      rep.v_hat = y;
      rep.iterations = k;
      rep.g_units_used = tally.g_basic_units - units0;
      rep.certified_gap_bound = bound;
      return rep;
    }
    v_prev = v;
    v = prox_quadratic(y - t * gy, t, phi.beta, phi.alpha);
  }
}

}  // namespace osplit
