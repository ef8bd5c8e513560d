#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "osplit/core/problem.hpp"
#include "osplit/frame/config.hpp"
#include "osplit/inner/solver.hpp"

namespace osplit {

struct MsSteps {
  double a_next;
  double A_next;
};

/// Positive root of L a^2 - a - A = 0, and A + a.
inline MsSteps ms_step_sizes(double A, double L) {
  const double a = (1.0 / L + std::sqrt(1.0 / (L * L) + 4.0 * A / L)) / 2.0;
  return {a, A + a};
}

struct RestartSchedule {
  std::int64_t n0;
  std::int64_t stages;
};

/// N0 = ceil(sqrt(8L/mu)); T = max(1, ceil(log2(mu R^2 / eps))).
inline RestartSchedule restart_schedule(double mu, double L, double R, double epsilon) {
  require(mu > 0.0, "restart_schedule: mu must be positive");
  require(L > 0.0 && R > 0.0 && epsilon > 0.0, "restart_schedule: L, R, epsilon must be positive");
  const auto n0 = static_cast<std::int64_t>(std::ceil(std::sqrt(8.0 * L / mu) - 1e-12));
  const double t = std::ceil(std::log2(mu * R * R / epsilon) - 1e-12);
  return {std::max<std::int64_t>(1, n0), std::max<std::int64_t>(1, static_cast<std::int64_t>(t))};
}

/// MS iterations for the convex branch: 2 L R^2 / N^2 <= eps.
inline std::int64_t convex_ms_iterations(double L, double R, double epsilon) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * L * R * R / epsilon))));
}

/// Inner tolerance of the middle loop for distance scale D.
inline double epsilon_m(double L, double L_h, double L_f, double D) {
  const double s = 3.0 * L + 2.0 * L_f;
  return std::pow(L, 4) / (8.0 * L_h * s * s) * D * D;
}

/// ceil((4 L_h / L) ln((3L + 2L_f)^2 L_h / L^3)), at least 1.
inline std::int64_t n_gmco(double L, double L_h, double L_f) {
  const double s = 3.0 * L + 2.0 * L_f;
  const double v = 4.0 * L_h / L * std::log(s * s * L_h / (L * L * L));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

/// tau_g of each inner solver on phi with modulus alpha.
inline double tau_g(InnerKind kind, const GOracle& g) {
  switch (kind) {
    case InnerKind::apg: return std::sqrt(g_smoothness_bound(g));
    case InnerKind::acdm:
      return std::get<CoordinateG>(g).fn->coordinate_lipschitz().array().sqrt().sum();
    case InnerKind::katyusha: {
      const auto& fs = *std::get<FiniteSumG>(g).fn;
      return std::sqrt(static_cast<double>(fs.components()) * fs.component_lipschitz().maxCoeff());
    }
  }
  return 0.0;
}

/// Fixed inner iteration count for budgeted mode:
///   (tau_g / sqrt(L + L_h)) ln(C1 L_h / (delta sqrt(mu L)))      mu > 0
///   (tau_g / sqrt(L + L_h)) ln(C1 L_h R / (delta sqrt(eps L)))   mu = 0
/// counted in the solver's own iterations (APG steps, coordinate steps,
/// Katyusha epochs, where an epoch also pays m for its snapshot). The log is
/// clamped at 1 and delta is the per-solve share.
inline std::int64_t budgeted_inner_iterations(InnerKind kind, const GOracle& g, double L, double L_h,
                                              double mu, const SolverConfig& cfg, double delta_share) {
  const double lg = mu > 0.0 ? std::log(cfg.C1 * L_h / (delta_share * std::sqrt(mu * L)))
                             : std::log(cfg.C1 * L_h * cfg.R / (delta_share * std::sqrt(cfg.epsilon * L)));
  const double ln = std::max(1.0, lg);
  const double calls = tau_g(kind, g) / std::sqrt(L + L_h) * ln;
  double iters = calls;
  if (kind == InnerKind::katyusha) {
    const double m = static_cast<double>(kappa_g(g));
    iters = ln + calls / m;
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(iters)));
}

}  // namespace osplit
