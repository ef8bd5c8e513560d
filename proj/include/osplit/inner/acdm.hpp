#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "osplit/core/rng.hpp"
#include "osplit/inner/inner_problem.hpp"

namespace osplit {

/// Objective seen by the coordinate engine:
///   sum_f F_f(x) + <beta, x> + (alpha/2)||x||^2
/// with coordinate constants L_i and strong convexity sigma.
struct AcdmObjective {
  std::vector<const CoordinateFunction*> parts;
  Vector beta;
  double alpha = 0.0;
  Vector lipschitz;
  double sigma = 0.0;
};

/// Non-uniform accelerated coordinate descent (sampling p_i ~ sqrt(L_i)).
///
/// The iterates are kept as (y, z) = B (u, v) for a 2x2 matrix B, so the
/// dense x = tau z + (1 - tau) y update is absorbed into B and each step
/// touches one coordinate of u and v plus one column of every image.
class LazyAcdm {
 public:
  LazyAcdm(AcdmObjective obj, const Vector& start) : obj_(std::move(obj)) {
    const Index n = start.size();
    require(obj_.lipschitz.size() == n && obj_.beta.size() == n, "LazyAcdm: size mismatch");
    require(obj_.sigma > 0.0, "LazyAcdm: strong convexity must be positive");
    require((obj_.lipschitz.array() > 0.0).all(), "LazyAcdm: coordinate constants must be positive");
    const Vector sq = obj_.lipschitz.array().sqrt();
    s_ = sq.sum();
    prob_ = sq / s_;
    sampler_ = DiscreteSampler(sq);
    tau_ = 2.0 / (1.0 + std::sqrt(4.0 * s_ * s_ / obj_.sigma + 1.0));
    eta_ = 1.0 / (tau_ * s_ * s_);
    c_ = 1.0 / (1.0 + eta_ * obj_.sigma);
    m00_ = 1.0 - tau_;
    m01_ = tau_;
    m10_ = c_ * eta_ * obj_.sigma * (1.0 - tau_);
    m11_ = c_ * (1.0 + eta_ * obj_.sigma * tau_);
    reset(start, start);
  }

  double tau() const { return tau_; }

  /// One step; returns the sampled coordinate. Every part is read once
  /// through a partial derivative at x.
  Index step(Rng& rng) {
    const Index i = sampler_.sample(rng);
    const double xa = tau_ * b10_ + (1.0 - tau_) * b00_;
    const double xb = tau_ * b11_ + (1.0 - tau_) * b01_;
    const double xi = xa * u_[i] + xb * v_[i];
    double d = obj_.beta[i] + obj_.alpha * xi;
    for (std::size_t f = 0; f < obj_.parts.size(); ++f)
      d += obj_.parts[f]->partial_from_images(i, xi, xa, wu_[f], xb, wv_[f]);
    if (!std::isfinite(d)) throw OracleError("acdm: non-finite partial at index " + std::to_string(i));

    // B <- M B
    double n00 = m00_ * b00_ + m01_ * b10_, n01 = m00_ * b01_ + m01_ * b11_;
    double n10 = m10_ * b00_ + m11_ * b10_, n11 = m10_ * b01_ + m11_ * b11_;
    b00_ = n00; b01_ = n01; b10_ = n10; b11_ = n11;
    const double scale = std::max({std::abs(b00_), std::abs(b01_), std::abs(b10_), std::abs(b11_)});
    double det = b00_ * b11_ - b01_ * b10_;
    if (std::abs(det) < 1e-8 * scale * scale) {
      rematerialize();
      det = 1.0;
    }
    const double dy = -d / obj_.lipschitz[i];
    const double dz = -c_ * eta_ * d / prob_[i];
    const double du = (b11_ * dy - b01_ * dz) / det;
    const double dv = (b00_ * dz - b10_ * dy) / det;
    u_[i] += du;
    v_[i] += dv;
    for (std::size_t f = 0; f < obj_.parts.size(); ++f) {
      obj_.parts[f]->add_image_column(i, du, wu_[f]);
      obj_.parts[f]->add_image_column(i, dv, wv_[f]);
    }
    return i;
  }

  Vector y() const { return b00_ * u_ + b01_ * v_; }
  Vector z() const { return b10_ * u_ + b11_ * v_; }

  /// Gradient of part f at y, from the maintained images.
  Vector part_gradient_at_y(std::size_t f) const {
    Vector out;
    obj_.parts[f]->gradient_from_images(y(), b00_, wu_[f], b01_, wv_[f], out);
    return out;
  }

  void reset(const Vector& y, const Vector& z) {
    u_ = y;
    v_ = z;
    b00_ = 1.0; b01_ = 0.0; b10_ = 0.0; b11_ = 1.0;
    wu_.resize(obj_.parts.size());
    wv_.resize(obj_.parts.size());
    for (std::size_t f = 0; f < obj_.parts.size(); ++f) {
      obj_.parts[f]->apply_image(u_, wu_[f]);
      obj_.parts[f]->apply_image(v_, wv_[f]);
    }
  }

 private:
  void rematerialize() {
    const Vector yy = y(), zz = z();
    reset(yy, zz);
  }

  AcdmObjective obj_;
  double s_ = 0, tau_ = 0, eta_ = 0, c_ = 0;
  double m00_ = 0, m01_ = 0, m10_ = 0, m11_ = 0;
  double b00_ = 1, b01_ = 0, b10_ = 0, b11_ = 1;
  Vector prob_;
  DiscreteSampler sampler_;
  Vector u_, v_;
  std::vector<Vector> wu_, wv_;
};

/// Coordinate constants of phi: beta_i(g) + alpha, with beta_i(g) floored at
/// 1e-12 max_j beta_j(g).
inline Vector acdm_inner_constants(const CoordinateFunction& g, double alpha) {
  const Vector& b = g.coordinate_lipschitz();
  const double floor = 1e-12 * (b.size() ? b.maxCoeff() : 0.0);
  return b.array().max(floor) + alpha;
}

/// Accelerated coordinate descent on the whole of phi. One partial of g per
/// iteration; the linear and quadratic parts are differentiated for free.
/// Certificates cost a full gradient (n units) every cert_period iterations
/// (default ceil(n/4)); the returned point is the y sequence.
inline InnerReport solve_acdm(const InnerProblem& phi, const Vector& start, const StopRule& stop,
                              Rng& rng, OracleTally& tally, const InnerOptions& opt = {}) {
  phi.validate();
  validate(stop);
  require_dim(start, phi.dim(), "solve_acdm");
  if (mode_of(phi.g) != GMode::coordinate)
    throw std::invalid_argument("solve_acdm: g must be in coordinate mode");
  const auto& gfn = *std::get<CoordinateG>(phi.g).fn;
  const Index n = phi.dim();

  AcdmObjective obj{{&gfn}, phi.beta, phi.alpha, acdm_inner_constants(gfn, phi.alpha), phi.alpha};
  LazyAcdm engine(std::move(obj), start);
  const std::int64_t units0 = tally.g_basic_units;
  InnerReport rep;

  if (const auto* fixed = std::get_if<FixedIters>(&stop)) {
    for (std::int64_t k = 0; k < fixed->n; ++k) {
      engine.step(rng);
      ++tally.g_basic_units;
    }
    rep.v_hat = fixed->n == 0 ? start : engine.y();
    rep.iterations = fixed->n;
    rep.g_units_used = tally.g_basic_units - units0;
    return rep;
  }

  const double eps = std::get<CertifiedGap>(stop).eps;
  const std::int64_t period = opt.cert_period > 0 ? opt.cert_period : (n + 3) / 4;
  double best_bound = std::numeric_limits<double>::infinity();
  Vector best = start;
  for (std::int64_t k = 0;; ++k) {
    if (k % period == 0) {
      if (tally.g_basic_units - units0 + n > opt.max_units) {
        rep.v_hat = best;
        rep.iterations = k;
        rep.g_units_used = tally.g_basic_units - units0;
        if (std::isfinite(best_bound)) rep.certified_gap_bound = best_bound;
        rep.status = SolveStatus::budget_exhausted;
        return rep;
      }
      const Vector y = engine.y();
      Vector gy = engine.part_gradient_at_y(0);
      tally.g_basic_units += n;
      require_finite(gy, "solve_acdm");
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
    }
    engine.step(rng);
    ++tally.g_basic_units;
  }
}

}  // namespace osplit
