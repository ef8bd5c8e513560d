#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "osplit/frame/gmco.hpp"
#include "osplit/frame/trace.hpp"

namespace osplit {

/// Outcome of one middle-loop call as seen by the outer loop.
struct GmcoExit {
  std::int64_t iterations = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool checked = false;
  bool passed = false;
  bool at_noise_floor = false;
};

struct RunReport {
  std::string method;
  std::string problem;
  Vector x;
  double final_value = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> final_gap;
  SolveStatus status = SolveStatus::converged;
  PhaseTallies tallies;
  std::vector<TraceRow> trace;
  double wall_time_s = 0.0;
  std::int64_t outer_iterations = 0;
  std::vector<GmcoExit> gmco_exits;
  std::vector<std::string> warnings;

  OracleTally total() const { return tallies.total(); }
};

/// Shared state of one framework run.
struct MsContext {
  const CompositeProblem& problem;
  const InnerSolver& inner;
  const SolverConfig& config;
  GmcoSettings gmco;
  Rng rng;
  PhaseTallies& tallies;
  TraceRecorder& trace;
  std::vector<GmcoExit>& exits;
  std::int64_t outer_done = 0;  // MS iterations over all stages
  int stage = 1;
  bool target_hit = false;
  bool at_noise_floor = false;
};

struct MsResult {
  Vector y;
  std::int64_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
};

/// Records f(y) for the trace and checks the optional target; returns true
/// when the run should stop early.
inline bool ms_log(MsContext& c, const Vector& y, const GmcoResult* g) {
  TraceRow row;
  row.iter = c.outer_done;
  row.stage = c.stage;
  const bool want_f = c.config.record_f_values || c.config.target_value.has_value();
  if (want_f) row.f_value = value_f(c.problem, y, c.tallies.outer);
  if (g) {
    row.criterion_lhs = g->criterion_lhs;
    row.criterion_rhs = g->criterion_rhs;
  }
  const bool hit = c.config.target_value && want_f && row.f_value <= *c.config.target_value;
  row.tally = c.tallies.total();
  c.trace.record(row, hit);
  if (hit) c.target_hit = true;
  return hit;
}

/// N iterations of the Monteiro-Svaiter loop from x0 (= y0 = z0).
inline MsResult ms_run(const Vector& x0, std::int64_t N, MsContext& c) {
  require(N >= 1, "ms_run: N must be >= 1");
  require_dim(x0, c.problem.dim(), "ms_run");
  const double L = c.gmco.L;
  MsResult res;
  double A = 0.0;
  Vector y = x0, z = x0;
  for (std::int64_t k = 0; k < N; ++k) {
    if (c.outer_done >= c.config.max_outer_iters) {
      res.status = SolveStatus::budget_exhausted;
      break;
    }
    const MsSteps st = ms_step_sizes(A, L);
    const Vector x = (A / st.A_next) * y + (st.a_next / st.A_next) * z;
    GmcoResult g = gmco(x, c.gmco, c.problem, c.inner, c.rng, c.tallies);
    c.exits.push_back({g.iterations, g.criterion_lhs, g.criterion_rhs, g.checked,
                       g.checked && g.status == SolveStatus::converged && !g.at_noise_floor,
                       g.at_noise_floor});
    y = g.zeta;
    ++c.outer_done;
    res.iterations = k + 1;
    if (g.status != SolveStatus::converged) {
      res.status = SolveStatus::budget_exhausted;
      ms_log(c, y, &g);
      break;
    }
    if (g.grad_f) {
      z -= st.a_next * *g.grad_f;
    } else {
      z -= st.a_next * grad_f(c.problem, y, c.tallies.outer);
    }
    A = st.A_next;
    if (ms_log(c, y, &g)) break;
    if (g.at_noise_floor) {
      c.at_noise_floor = true;
      break;
    }
  }
  res.y = y;
  return res;
}

/// Full framework: MS with restarts when mu > 0, a single MS run otherwise.
inline RunReport solve(const CompositeProblem& p, const SolverConfig& cfg, const InnerSolver& inner,
                       InnerKind kind = InnerKind::apg, const Vector* x0_in = nullptr) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.problem = p.name();
  const double lh = p.lipschitz_h();
  const double L = cfg.L > 0.0 ? cfg.L : lh;
  const double mu = cfg.mu >= 0.0 ? cfg.mu : p.mu();
  if (L > 2.0 * lh) rep.warnings.push_back("L exceeds 2 L_h; the middle-loop rate bound does not apply");

  const Vector x0 = x0_in ? *x0_in : Vector::Zero(p.dim());
  require_dim(x0, p.dim(), "solve");

  RestartSchedule sched{0, 1};
  std::int64_t n_convex = 0;
  if (mu > 0.0)
    sched = restart_schedule(mu, L, cfg.R, cfg.epsilon);
  else
    n_convex = convex_ms_iterations(L, cfg.R, cfg.epsilon);

  GmcoSettings gs;
  gs.L = L;
  gs.mode = cfg.inner_stop;
  gs.max_iters = cfg.max_gmco_iters;
  gs.eps_floor = std::sqrt(cfg.epsilon / L);
  gs.max_h_calls = cfg.max_h_calls;
  gs.max_g_units = cfg.max_g_units;
  if (cfg.inner_stop == InnerStopMode::budgeted) {
    const std::int64_t t_ms = mu > 0.0 ? sched.n0 * sched.stages : n_convex;
    const double share = cfg.delta / (static_cast<double>(t_ms) *
                                      static_cast<double>(n_gmco(L, lh, p.lipschitz_f())));
    gs.inner_fixed_iters = budgeted_inner_iterations(kind, p.g(), L, lh, mu, cfg, share);
  }

  TraceRecorder trace(cfg.deterministic, cfg.log_every);
  MsContext c{p, inner, cfg, gs, Rng(cfg.seed), rep.tallies, trace, rep.gmco_exits};

  Vector x = x0;
  c.stage = 0;
  bool done = ms_log(c, x, nullptr);
  if (!done) {
    const std::int64_t stages = mu > 0.0 ? sched.stages : 1;
    const std::int64_t per_stage = mu > 0.0 ? sched.n0 : n_convex;
    for (std::int64_t s = 1; s <= stages; ++s) {
      c.stage = static_cast<int>(s);
      MsResult r = ms_run(x, per_stage, c);
      x = r.y;
      if (r.status != SolveStatus::converged) {
        rep.status = SolveStatus::budget_exhausted;
        break;
      }
      if (c.target_hit) break;
      if (c.at_noise_floor) {
        rep.warnings.push_back("stopped early: gradient of f reached roundoff level");
        break;
      }
    }
  }
  // target given but never reached counts as a failed run
  if (cfg.target_value && !c.target_hit) rep.status = SolveStatus::budget_exhausted;

  rep.x = x;
  rep.final_value = p.value(x);
  rep.outer_iterations = c.outer_done;
  if (!trace.rows().empty()) {
    TraceRow last = trace.rows().back();
    if (last.iter != c.outer_done || !(last.tally == rep.tallies.total())) {
      TraceRow row;
      row.iter = c.outer_done;
      row.stage = c.stage;
      row.f_value = cfg.record_f_values ? value_f(p, x, rep.tallies.outer) : rep.final_value;
      row.tally = rep.tallies.total();
      trace.record(row, true);
    }
  }
  rep.trace = trace.rows();
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace osplit
