#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>

#include "osplit/core/oracles.hpp"
#include "osplit/core/tally.hpp"
#include "osplit/core/types.hpp"

namespace osplit {

/// phi(v) = <beta, v> + (alpha/2)||v||^2 + g(v)
struct InnerProblem {
  Vector beta;
  double alpha = 1.0;
  GOracle g;

  Index dim() const { return beta.size(); }

  void validate() const {
    require(alpha > 0.0 && std::isfinite(alpha), "InnerProblem: alpha must be positive");
    require(beta.size() >= 1, "InnerProblem: empty beta");
    require(dim_of(g) == beta.size(), "InnerProblem: beta and g dimensions differ");
  }

  /// Unmetered value of phi, for tests and diagnostics.
  double value(const Vector& v) const {
    return beta.dot(v) + 0.5 * alpha * v.squaredNorm() + function_of(g).value(v);
  }
};

struct FixedIters {
  std::int64_t n = 0;
};
struct CertifiedGap {
  double eps = 0.0;
};
using StopRule = std::variant<FixedIters, CertifiedGap>;

inline void validate(const StopRule& s) {
  if (const auto* f = std::get_if<FixedIters>(&s))
    require(f->n >= 0, "StopRule: iteration count must be >= 0");
  else
    require(std::get<CertifiedGap>(s).eps > 0.0, "StopRule: gap tolerance must be positive");
}

struct InnerOptions {
  /// Hard cap on g units for one solve (certified mode).
  std::int64_t max_units = std::numeric_limits<std::int64_t>::max();
  /// Iterations between certificate checks; 0 picks the solver default.
  std::int64_t cert_period = 0;
  double c_cert = 1.0;
};

struct InnerReport {
  Vector v_hat;
  std::int64_t iterations = 0;
  std::int64_t g_units_used = 0;
  std::optional<double> certified_gap_bound;
  SolveStatus status = SolveStatus::converged;
};

/// argmin_v <beta,v> + (alpha/2)||v||^2 + ||v-u||^2/(2t)
inline Vector prox_quadratic(const Vector& u, double t, const Vector& beta, double alpha) {
  require(t > 0.0, "prox_quadratic: step must be positive");
  require(alpha >= 0.0, "prox_quadratic: alpha must be >= 0");
  require_dim(beta, u.size(), "prox_quadratic");
  if (std::isinf(t)) {
    require(alpha > 0.0, "prox_quadratic: infinite step needs alpha > 0");
    return -beta / alpha;
  }
  return (u - t * beta) / (1.0 + t * alpha);
}

/// Smoothness constant used for the gradient-mapping step in certificates.
/// Never below alpha: with a smaller step the 2/alpha factor stops being an
/// upper bound.
inline double certificate_step_constant(const InnerProblem& phi) {
  return std::max(g_smoothness_bound(phi.g), phi.alpha);
}

/// Certificate from an already computed grad g(v); costs nothing.
inline double gap_bound_from_gradient(const InnerProblem& phi, const Vector& v,
                                      const Vector& grad_g, double c_cert = 1.0) {
  const double lg = certificate_step_constant(phi);
  const double t = 1.0 / lg;
  const Vector vp = prox_quadratic(v - t * grad_g, t, phi.beta, phi.alpha);
  const double gm = (v - vp).squaredNorm() * lg * lg;
  return gm * (2.0 / phi.alpha) * c_cert;
}

/// Upper bound on phi(v) - phi* from the composite gradient mapping. Costs
/// one full gradient of g.
inline double gap_certificate(const InnerProblem& phi, const Vector& v, OracleTally& tally,
                              double c_cert = 1.0) {
  require_dim(v, phi.dim(), "gap_certificate");
  const Vector gg = grad_g_full(phi.g, v, tally);
  return gap_bound_from_gradient(phi, v, gg, c_cert);
}

}  // namespace osplit
