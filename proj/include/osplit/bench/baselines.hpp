#pragma once

#include <chrono>
#include <cmath>
#include <string>

#include "osplit/frame/solve.hpp"

namespace osplit {

namespace detail {

inline double mu_of(const CompositeProblem& p, const SolverConfig& cfg) {
  return cfg.mu >= 0.0 ? cfg.mu : p.mu();
}

/// L_h + (L_g or its proxy).
inline double coupled_lipschitz(const CompositeProblem& p) {
  return p.lipschitz_h() + g_smoothness_bound(p.g());
}

/// Iteration count an accelerated method needs without a target value.
inline std::int64_t accelerated_iterations(double L, double mu, double R, double eps) {
  const double k = mu > 0.0 ? std::sqrt(L / mu) * std::max(1.0, std::log(L * R * R / eps))
                            : std::sqrt(2.0 * L * R * R / eps);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(k)));
}

struct BaselineLog {
  const CompositeProblem& p;
  const SolverConfig& cfg;
  TraceRecorder trace;
  OracleTally& tally;
  bool hit = false;

  BaselineLog(const CompositeProblem& prob, const SolverConfig& c, OracleTally& t)
      : p(prob), cfg(c), trace(c.deterministic, c.log_every), tally(t) {}

  /// Logs f at x; true when the target is reached.
  bool log(std::int64_t iter, int stage, const Vector& x) {
    TraceRow row;
    row.iter = iter;
    row.stage = stage;
    const bool want_f = cfg.record_f_values || cfg.target_value.has_value();
    if (want_f) row.f_value = value_f(p, x, tally);
    hit = cfg.target_value && want_f && row.f_value <= *cfg.target_value;
    row.tally = tally;
    trace.record(row, hit);
    return hit;
  }

  bool out_of_budget(std::int64_t iter) const {
    return iter >= cfg.max_outer_iters || tally.h_grad_calls >= cfg.max_h_calls ||
           tally.g_basic_units >= cfg.max_g_units;
  }

  void finish(RunReport& rep, const Vector& x, std::int64_t iters, bool budget_hit,
              std::chrono::steady_clock::time_point t0) {
    rep.problem = p.name();
    rep.x = x;
    rep.final_value = p.value(x);
    rep.outer_iterations = iters;
    rep.status = budget_hit || (cfg.target_value && !hit) ? SolveStatus::budget_exhausted
                                                           : SolveStatus::converged;
    if (!trace.rows().empty() && !(trace.rows().back().tally == tally)) {
      TraceRow row = trace.rows().back();
      row.iter = iters;
      row.tally = tally;
      trace.record(row, true);
    }
    rep.trace = trace.rows();
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace detail

/// Nesterov's method on the whole of f with L_f = L_h + L_g (or proxy);
/// every iteration costs one h call and kappa_g g units.
inline RunReport baseline_fgm(const CompositeProblem& p, const SolverConfig& cfg, const Vector* x0_in = nullptr) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.method = "fgm";
  const double lf = detail::coupled_lipschitz(p);
  const double mu = detail::mu_of(p, cfg);
  const std::int64_t iters = cfg.target_value ? SolverConfig::unlimited
                                              : detail::accelerated_iterations(lf, mu, cfg.R, cfg.epsilon);
  const double q = mu / lf;
  const double beta_sc = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));

  Vector x = x0_in ? *x0_in : Vector::Zero(p.dim());
  require_dim(x, p.dim(), "baseline_fgm");
  Vector y = x;
  double t = 1.0;
  detail::BaselineLog lg(p, cfg, rep.tallies.outer);
  bool budget_hit = false;
  std::int64_t k = 0;
  if (!lg.log(0, 0, x)) {
    for (; k < iters; ++k) {
      if (lg.out_of_budget(k)) {
        budget_hit = true;
        break;
      }
      const Vector gy = grad_f(p, y, rep.tallies.outer);
      const Vector x_next = y - gy / lf;
      double beta = beta_sc;
      if (mu <= 0.0) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        beta = (t - 1.0) / t_next;
        t = t_next;
      }
      y = x_next + beta * (x_next - x);
      x = x_next;
      if (lg.log(k + 1, 1, x)) {
        ++k;
        break;
      }
    }
  }
  lg.finish(rep, x, k, budget_hit, t0);
  return rep;
}

/// Accelerated coordinate method on the whole of f, reading h and g one
/// partial at a time. Images of the iterates (Ax, G^2 x) are updated per
/// column, so a step costs O(column nnz + n) plus the partials.
/// Each step charges one h partial and one g unit.
inline RunReport baseline_coord_fgm(const CompositeProblem& p, const SolverConfig& cfg,
                                    const Vector* x0_in = nullptr) {
  cfg.validate();
  const auto hc = p.h_coordinate();
  if (!hc || p.g_mode() != GMode::coordinate)
    throw std::invalid_argument("coord-fgm needs coordinate access to both h and g");
  const double mu = detail::mu_of(p, cfg);
  if (!(mu > 0.0)) throw std::invalid_argument("coord-fgm needs mu > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const auto& gc = *std::get<CoordinateG>(p.g()).fn;
  const Index n = p.dim();

  RunReport rep;
  rep.method = "coord-fgm";
  Vector lip = hc->coordinate_lipschitz() + gc.coordinate_lipschitz();
  lip = lip.cwiseMax(1e-12 * lip.maxCoeff());
  AcdmObjective obj{{hc.get(), &gc}, Vector::Zero(n), 0.0, lip, mu};
  Vector x = x0_in ? *x0_in : Vector::Zero(n);
  require_dim(x, n, "baseline_coord_fgm");
  LazyAcdm engine(std::move(obj), x);
  Rng rng(cfg.seed);

  // one trace row per n steps
  const double s = lip.array().sqrt().sum();
  const std::int64_t epochs = cfg.target_value
                                  ? SolverConfig::unlimited
                                  : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(
                                        s / std::sqrt(mu) / static_cast<double>(n) *
                                        std::max(1.0, std::log(p.lipschitz_f() * cfg.R * cfg.R / cfg.epsilon)))));
  OracleTally& tally = rep.tallies.outer;
  detail::BaselineLog lg(p, cfg, tally);
  bool budget_hit = false;
  std::int64_t e = 0;
  if (!lg.log(0, 0, x)) {
    for (; e < epochs; ++e) {
      if (e >= cfg.max_outer_iters || tally.h_partial_calls / n >= cfg.max_h_calls ||
          tally.g_basic_units >= cfg.max_g_units) {
        budget_hit = true;
        break;
      }
      for (Index j = 0; j < n; ++j) {
        engine.step(rng);
        ++tally.h_partial_calls;
        ++tally.g_basic_units;
      }
      x = engine.y();
      if (lg.log(e + 1, 1, x)) {
        ++e;
        break;
      }
    }
  }
  lg.finish(rep, x, e, budget_hit, t0);
  return rep;
}

/// Katyusha on the whole of f = (1/m) sum_k (h + g_k); a stochastic step
/// costs one h call and one g unit, a snapshot one h call and m units.
inline RunReport baseline_katyusha_full(const CompositeProblem& p, const SolverConfig& cfg,
                                        const Vector* x0_in = nullptr) {
  cfg.validate();
  if (p.g_mode() != GMode::finite_sum) throw std::invalid_argument("katyusha-full needs a finite-sum g");
  const auto t0 = std::chrono::steady_clock::now();
  const auto& fs = *std::get<FiniteSumG>(p.g()).fn;
  const Index m = fs.components();
  RunReport rep;
  rep.method = "katyusha-full";
  OracleTally& tally = rep.tallies.outer;
  Vector x = x0_in ? *x0_in : Vector::Zero(p.dim());
  require_dim(x, p.dim(), "baseline_katyusha_full");

  const KatyushaNsParams prm{m, p.lipschitz_h() + fs.component_lipschitz().maxCoeff()};
  const std::int64_t epochs =
      cfg.target_value ? SolverConfig::unlimited
                       : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(
                                                       std::sqrt(4.0 * prm.lhat * cfg.R * cfg.R / cfg.epsilon) /
                                                       static_cast<double>(m))) + 4);
  detail::BaselineLog lg(p, cfg, tally);
  bool budget_hit = false, stopped = false;
  std::int64_t done = 0;
  Rng rng(cfg.seed);

  auto component = [&](const Vector& z, Index k) {
    Vector g = grad_h(p, z, tally);
    g += std::get<Vector>(g_basic(p, z, k, tally));
    return g;
  };
  auto full = [&](const Vector& z, std::vector<Vector>& comp) {
    const Vector gh = grad_h(p, z, tally);
    Vector mean = Vector::Zero(z.size());
    for (Index k = 0; k < m; ++k) {
      comp[static_cast<std::size_t>(k)] = gh + std::get<Vector>(g_basic(p, z, k, tally));
      mean += comp[static_cast<std::size_t>(k)];
    }
    return Vector(mean / static_cast<double>(m));
  };
  auto on_epoch = [&](std::int64_t s, const Vector& xt) {
    done = s;
    x = xt;
    if (lg.log(s, s == 0 ? 0 : 1, xt)) return stopped = true;
    if (lg.out_of_budget(s)) return budget_hit = stopped = true;
    return false;
  };
  x = katyusha_ns(prm, x, epochs, component, full, on_epoch, rng);
  if (!stopped) {
    done = epochs;
    lg.log(done, 1, x);
  }
  lg.finish(rep, x, done, budget_hit, t0);
  return rep;
}

/// High-effort value of min f for problems without a closed form: FGM with
/// function-value restarts until ||grad f(x)|| (1 + ||x||) <= tol, keeping
/// the best value seen. Unmetered.
inline double reference_value(const CompositeProblem& p, double tol, std::int64_t max_iters = 2000000) {
  const double lf = detail::coupled_lipschitz(p);
  OracleTally scratch;
  Vector x = Vector::Zero(p.dim()), y = x;
  double t = 1.0, fx = p.value(x), best = fx;
  for (std::int64_t k = 0; k < max_iters; ++k) {
    const Vector gy = grad_f(p, y, scratch);
    const Vector x_next = y - gy / lf;
    const double f_next = p.value(x_next);
    best = std::min(best, f_next);
    if (f_next > fx) {
      // restart momentum
      t = 1.0;
      y = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    fx = f_next;
    t = t_next;
    if (gy.norm() * (1.0 + y.norm()) <= tol && k % 16 == 0) {
      const Vector gx = grad_f(p, x, scratch);
      if (gx.norm() * (1.0 + x.norm()) <= tol) break;
    }
  }
  return best;
}

}  // namespace osplit
