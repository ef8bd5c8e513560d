#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "osplit/core/oracles.hpp"
#include "osplit/frame/config.hpp"
#include "osplit/frame/schedule.hpp"
#include "osplit/inner/solver.hpp"

namespace osplit {

/// phi_k(z) = <grad h(z_prev), z - z_prev> + g(z) + (L/2)||z - z0||^2 + (L_h/2)||z - z_prev||^2
/// up to a constant: beta = grad h(z_prev) - L z0 - L_h z_prev, alpha = L + L_h.
inline InnerProblem build_phi_from_gradient(const Vector& grad_h_prev, const Vector& zeta_prev,
                                            const Vector& zeta0, double L, double L_h,
                                            const GOracle& g) {
  return InnerProblem{grad_h_prev - L * zeta0 - L_h * zeta_prev, L + L_h, g};
}

/// As above, paying one grad_h call at zeta_prev.
inline InnerProblem build_phi(const Vector& zeta_prev, const Vector& zeta0, double L, double L_h,
                              const CompositeProblem& p, OracleTally& tally) {
  require_dim(zeta0, p.dim(), "build_phi");
  const Vector gh = grad_h(p, zeta_prev, tally);
  return build_phi_from_gradient(gh, zeta_prev, zeta0, L, L_h, p.g());
}

struct GmcoResult {
  Vector zeta;
  std::int64_t iterations = 0;
  double criterion_lhs = std::numeric_limits<double>::quiet_NaN();
  double criterion_rhs = std::numeric_limits<double>::quiet_NaN();
  bool checked = false;  // false in budgeted mode
  SolveStatus status = SolveStatus::converged;
  /// grad f(zeta) as computed by the exit check, when there was one.
  std::optional<Vector> grad_f;
  std::int64_t inner_failures = 0;
  /// The check failed with both sides at roundoff level: ||grad F|| cannot
  /// be resolved further in double precision.
  bool at_noise_floor = false;
};

struct GmcoSettings {
  double L = 1.0;
  InnerStopMode mode = InnerStopMode::certified;
  std::int64_t max_iters = 100000;
  std::int64_t inner_fixed_iters = 1;  // budgeted mode
  double eps_floor = 1e-8;             // sqrt(eps / L) from the run config
  std::int64_t max_h_calls = SolverConfig::unlimited;
  std::int64_t max_g_units = SolverConfig::unlimited;
};

/// Middle loop: composite gradient method on F(z) = f(z) + (L/2)||z - z0||^2,
/// linearizing h and handing g plus the two anchors to the inner solver.
///
/// Certified mode exits on ||grad F(z)|| <= (L/2)||z - z0||; each check is a
/// full grad f (charged to ph.criterion) whose grad h part feeds the next
/// linearization. Budgeted mode runs n_gmco iterations without checks.
inline GmcoResult gmco(const Vector& zeta0, const GmcoSettings& s, const CompositeProblem& p,
                       const InnerSolver& inner, Rng& rng, PhaseTallies& ph) {
  require_dim(zeta0, p.dim(), "gmco");
  require(s.L > 0.0, "gmco: L must be positive");
  const double L = s.L, lh = p.lipschitz_h(), lf = p.lipschitz_f();
  const bool certified = s.mode == InnerStopMode::certified;
  const std::int64_t n_iters = certified ? s.max_iters : n_gmco(L, lh, lf);

  GmcoResult res;
  Vector prev = zeta0;
  Vector gh_prev = grad_h(p, zeta0, ph.gmco);
  const double gh0_norm = gh_prev.norm();
  Vector gf_prev;  // last failed check, for the roundoff exit
  double lhs_prev = 0.0, rhs_prev = 0.0;
  double best_ratio = std::numeric_limits<double>::infinity();
  Vector best = zeta0;
  std::int64_t failed_checks = 0;

  auto out_of_budget = [&] {
    const OracleTally t = ph.total();
    return t.h_grad_calls >= s.max_h_calls || t.g_basic_units >= s.max_g_units;
  };

  for (std::int64_t k = 1; k <= n_iters; ++k) {
    if (out_of_budget()) {
      res.zeta = certified ? best : prev;
      res.iterations = k - 1;
      res.status = SolveStatus::budget_exhausted;
      return res;
    }
    const InnerProblem phi = build_phi_from_gradient(gh_prev, prev, zeta0, L, lh, p.g());
    StopRule stop = FixedIters{s.inner_fixed_iters};
    if (certified) {
      // each failed check halves the tolerance, so leftover inner error
      // cannot hold the exit test off forever
      // until the iterate moves, D stands in for the step; an absolute floor
      // alone is far too loose once zeta0 is near a minimizer
      double D = (prev - zeta0).norm();
      if (D == 0.0) {
        const double est = gh0_norm / (L + lh);
        D = est > 0.0 ? std::min(s.eps_floor, est) : s.eps_floor;
      }
      const int shrink = static_cast<int>(std::min<std::int64_t>(failed_checks, 1000));
      double tol = std::ldexp(epsilon_m(L, lh, lf, D), -shrink);
      // smallest gap the inner certificate can resolve in double precision
      const double res_g = 64.0 * std::numeric_limits<double>::epsilon() * (phi.beta.norm() + phi.alpha * prev.norm());
      const double resolution = 2.0 / phi.alpha * res_g * res_g;
      if (tol < resolution) {
        if (failed_checks > 0) {
          res.zeta = prev;
          res.criterion_lhs = lhs_prev;
          res.criterion_rhs = rhs_prev;
          res.checked = true;
          res.at_noise_floor = true;
          res.grad_f = std::move(gf_prev);
          return res;
        }
        tol = resolution;
      }
      stop = CertifiedGap{tol};
    }
    InnerReport ir = inner(phi, prev, stop, rng, ph.inner);
    if (ir.status != SolveStatus::converged) ++res.inner_failures;
    const Vector zeta = std::move(ir.v_hat);
    res.iterations = k;

    if (!certified) {
      prev = zeta;
      if (k < n_iters) gh_prev = grad_h(p, prev, ph.gmco);
      continue;
    }

    ++ph.criterion.criterion_checks;
    const Vector gh = grad_h(p, zeta, ph.criterion);
    Vector gf = gh + grad_g_full(p, zeta, ph.criterion);
    const double lhs = (gf + L * (zeta - zeta0)).norm();
    const double rhs = 0.5 * L * (zeta - zeta0).norm();
    if (lhs <= rhs) {
      res.zeta = zeta;
      res.criterion_lhs = lhs;
      res.criterion_rhs = rhs;
      res.checked = true;
      res.grad_f = std::move(gf);
      return res;
    }
    const double scale = gh.norm() + (gf - gh).norm() + lf * zeta.norm() + L * zeta0.norm();
    if (lhs <= 1e3 * std::numeric_limits<double>::epsilon() * scale) {
      res.zeta = zeta;
      res.criterion_lhs = lhs;
      res.criterion_rhs = rhs;
      res.checked = true;
      res.at_noise_floor = true;
      res.grad_f = std::move(gf);
      return res;
    }
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    if (ratio < best_ratio || k == 1) {
      best_ratio = ratio;
      best = zeta;
      res.criterion_lhs = lhs;
      res.criterion_rhs = rhs;
    }
    ++failed_checks;
    prev = zeta;
    gh_prev = gh;
    gf_prev = std::move(gf);
    lhs_prev = lhs;
    rhs_prev = rhs;
  }

  if (certified) {
    res.zeta = best;
    res.checked = true;
    res.status = SolveStatus::budget_exhausted;
  } else {
    res.zeta = prev;
  }
  return res;
}

}  // namespace osplit
