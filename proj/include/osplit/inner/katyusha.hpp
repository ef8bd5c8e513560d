#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "osplit/core/rng.hpp"
#include "osplit/inner/inner_problem.hpp"

namespace osplit {

/// Snapshot of a finite sum: full gradient plus every component gradient at
/// x_tilde, so a stochastic step needs only one new component gradient.
class VrSnapshot {
 public:
  VrSnapshot(const FiniteSumFunction& fn, const Vector& x_tilde) : fn_(&fn), x_(x_tilde) {
    const Index m = fn.components();
    comp_.resize(static_cast<std::size_t>(m));
    full_.setZero(x_tilde.size());
    for (Index k = 0; k < m; ++k) {
      fn.component_gradient(x_tilde, k, comp_[static_cast<std::size_t>(k)]);
      full_ += comp_[static_cast<std::size_t>(k)];
    }
    full_ /= static_cast<double>(m);
    require_finite(full_, "katyusha snapshot");
  }

  const Vector& point() const { return x_; }
  const Vector& full_gradient() const { return full_; }
  const Vector& component(Index k) const { return comp_[static_cast<std::size_t>(k)]; }

  /// grad_tilde = full + grad g_k(x) - grad g_k(x_tilde); unbiased over k.
  Vector estimator(const Vector& x, Index k) const {
    Vector gk;
    fn_->component_gradient(x, k, gk);
    require_finite(gk, "katyusha component");
    return full_ + gk - component(k);
  }

 private:
  const FiniteSumFunction* fn_;
  Vector x_;
  Vector full_;
  std::vector<Vector> comp_;
};

/// Katyusha for phi with g a finite sum of m components, psi the quadratic
/// part (alpha-strongly convex). Epoch length 2m, tau2 = 1/2,
/// tau1 = min(1/2, sqrt(2m alpha / (3 Lhat))), Lhat = max_k L_{g_k}.
///
/// Each epoch costs m units for the snapshot and 2m for the stochastic
/// steps. FixedIters(N) runs N epochs. In certified mode the certificate is
/// evaluated at the snapshot point with the snapshot gradient, for free.
inline InnerReport solve_katyusha(const InnerProblem& phi, const Vector& start, const StopRule& stop,
                                  Rng& rng, OracleTally& tally, const InnerOptions& opt = {}) {
  phi.validate();
  validate(stop);
  require_dim(start, phi.dim(), "solve_katyusha");
  if (mode_of(phi.g) != GMode::finite_sum)
    throw std::invalid_argument("solve_katyusha: g must be in finite-sum mode");
  const auto& fs = *std::get<FiniteSumG>(phi.g).fn;
  const Index m = fs.components();
  const std::int64_t epoch_len = 2 * static_cast<std::int64_t>(m);
  const double lhat = std::max(fs.component_lipschitz().maxCoeff(), 1e-12 * phi.alpha);
  const double sigma = phi.alpha;
  const double tau2 = 0.5;
  const double tau1 = std::min(0.5, std::sqrt(static_cast<double>(epoch_len) * sigma / (3.0 * lhat)));
  const double step = 1.0 / (3.0 * tau1 * lhat);
  const double theta = 1.0 + step * sigma;

  const std::int64_t units0 = tally.g_basic_units;
  const bool fixed = std::holds_alternative<FixedIters>(stop);
  const std::int64_t epochs = fixed ? std::get<FixedIters>(stop).n : 0;
  const double eps = fixed ? 0.0 : std::get<CertifiedGap>(stop).eps;

  InnerReport rep;
  Vector x_tilde = start, y = start, z = start;
  double best_bound = std::numeric_limits<double>::infinity();
  Vector best = start;

  for (std::int64_t s = 0;; ++s) {
    if (fixed && s == epochs) {
      rep.v_hat = x_tilde;
      rep.iterations = s;
      rep.g_units_used = tally.g_basic_units - units0;
      return rep;
    }
    if (!fixed && tally.g_basic_units - units0 + 3 * static_cast<std::int64_t>(m) > opt.max_units) {
      rep.v_hat = best;
      rep.iterations = s;
      rep.g_units_used = tally.g_basic_units - units0;
      if (std::isfinite(best_bound)) rep.certified_gap_bound = best_bound;
      rep.status = SolveStatus::budget_exhausted;
      return rep;
    }
    const VrSnapshot snap(fs, x_tilde);
    tally.g_basic_units += m;
    if (!fixed) {
      const double bound = gap_bound_from_gradient(phi, x_tilde, snap.full_gradient(), opt.c_cert);
      if (bound < best_bound) {
        best_bound = bound;
        best = x_tilde;
      }
      if (bound <= eps) {
        rep.v_hat = x_tilde;
        rep.iterations = s;
        rep.g_units_used = tally.g_basic_units - units0;
        rep.certified_gap_bound = bound;
        return rep;
      }
    }
    Vector acc = Vector::Zero(start.size());
    double wsum = 0.0, w = 1.0;
    for (std::int64_t j = 0; j < epoch_len; ++j) {
      const Vector x = tau1 * z + tau2 * x_tilde + (1.0 - tau1 - tau2) * y;
      const Index k = rng.index(m);
      const Vector gt = snap.estimator(x, k);
      ++tally.g_basic_units;
      z = prox_quadratic(z - step * gt, step, phi.beta, phi.alpha);
      const double ty = 1.0 / (3.0 * lhat);
      y = prox_quadratic(x - ty * gt, ty, phi.beta, phi.alpha);
      acc += w * y;
      wsum += w;
      w *= theta;
    }
    x_tilde = acc / wsum;
  }
}

/// Katyusha for a smooth finite sum without strong convexity (1/s-type
/// schedule tau1 = 2/(s+4)). Used as a whole-objective baseline; `component`
/// returns the gradient of the k-th summand and is charged by the caller.
struct KatyushaNsParams {
  Index m = 1;
  double lhat = 1.0;
};

template <class ComponentGrad, class FullGrad, class OnEpoch>
Vector katyusha_ns(const KatyushaNsParams& prm, const Vector& start, std::int64_t max_epochs,
                   ComponentGrad&& component, FullGrad&& full, OnEpoch&& on_epoch, Rng& rng) {
  const std::int64_t epoch_len = 2 * static_cast<std::int64_t>(prm.m);
  const double tau2 = 0.5;
  Vector x_tilde = start, y = start, z = start;
  std::vector<Vector> comp(static_cast<std::size_t>(prm.m));
  for (std::int64_t s = 0; s < max_epochs; ++s) {
    Vector mu = full(x_tilde, comp);
    if (on_epoch(s, x_tilde)) return x_tilde;
    const double tau1 = 2.0 / (static_cast<double>(s) + 4.0);
    const double step = 1.0 / (3.0 * tau1 * prm.lhat);
    Vector acc = Vector::Zero(start.size());
    for (std::int64_t j = 0; j < epoch_len; ++j) {
      const Vector x = tau1 * z + tau2 * x_tilde + (1.0 - tau1 - tau2) * y;
      const Index k = rng.index(prm.m);
      const Vector gt = mu + component(x, k) - comp[static_cast<std::size_t>(k)];
      z -= step * gt;
      y = x - gt / (3.0 * prm.lhat);
      acc += y;
    }
    x_tilde = acc / static_cast<double>(epoch_len);
  }
  return x_tilde;
}

}  // namespace osplit
