// Acceptance suite: one line per criterion, exit status 0 only if all pass.
#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "osplit/bench/run.hpp"

using namespace osplit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Everything criteria 7 and 12 look at afterwards.
struct Collector {
  std::vector<std::string> traces;
  std::vector<GmcoExit> exits;

  void add(const RunReport& r) {
    traces.push_back(r.method + "|" + r.problem + "\n" + trace_csv(r.trace));
    exits.insert(exits.end(), r.gmco_exits.begin(), r.gmco_exits.end());
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// A bare MS run (no restarts) with the certified inner solver.
struct MsHarness {
  SolverConfig cfg;
  PhaseTallies ph;
  TraceRecorder trace{true, 1};
  std::vector<GmcoExit> exits;
  InnerSolver inner = make_inner_solver(InnerKind::apg);
  GmcoSettings gs;

  MsResult run(const CompositeProblem& p, const Vector& x0, std::int64_t N) {
    gs.L = p.lipschitz_h();
    gs.mode = InnerStopMode::certified;
    gs.eps_floor = std::sqrt(cfg.epsilon / gs.L);
    cfg.record_f_values = true;
    MsContext c{p, inner, cfg, gs, Rng(cfg.seed), ph, trace, exits};
    ms_log(c, x0, nullptr);
    return ms_run(x0, N, c);
  }
};

// ------------------------------------------------------------------ 1

Outcome c1_step_sizes() {
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double A = std::pow(10.0, rng.uniform(-8.0, 8.0));
    const double L = std::pow(10.0, rng.uniform(-4.0, 4.0));
    const MsSteps s = ms_step_sizes(A, L);
    worst = std::max(worst, std::abs(L * s.a_next * s.a_next - s.a_next - A) / (1.0 + A));
  }
  bool growth = true;
  for (double L : {1e-3, 0.5, 1.0, 7.0, 1e3}) {
    double A = 0.0;
    for (int N = 1; N <= 1000; ++N) {
      A = ms_step_sizes(A, L).A_next;
      if (A < static_cast<double>(N) * N / (4.0 * L)) growth = false;
    }
  }
  return {worst <= 1e-10 && growth,
          "max |L a^2 - a - A|/(1+A) = " + fmt("%.2e", worst) + ", A_N >= N^2/(4L) " + (growth ? "held" : "violated")};
}

// ------------------------------------------------------------------ 2

Outcome c2_convex_envelope(Collector& col) {
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    QuadraticSpec spec;
    spec.n = 50;
    spec.mu = 0.0;
    spec.spread = 1e-5;  // keeps all 200 iterations in the sublinear regime
    Rng rng(200 + seed);
    const QuadraticInstance q = make_quadratic(spec, rng);
    MsHarness h;
    h.cfg.epsilon = 1e-14;  // tight inner tolerance through the floor
    h.cfg.seed = seed;
    const Vector x0 = Vector::Zero(spec.n);
    const double L = q.problem->lipschitz_h(), R = q.x_star.norm();
    h.run(*q.problem, x0, 200);
    int checked = 0;
    for (const auto& row : h.trace.rows()) {
      if (row.iter < 1 || row.iter > 200) continue;
      ++checked;
      const double k = static_cast<double>(row.iter);
      const double ratio = (row.f_value - q.f_star) / (2.0 * L * R * R / (k * k));
      worst = std::max(worst, ratio);
      if (ratio > 1.0) ok = false;
    }
    if (checked < 200) ok = false;
    RunReport r;
    r.method = "ms-apg";
    r.problem = "convex-quadratic-" + std::to_string(seed);
    r.trace = h.trace.rows();
    r.gmco_exits = h.exits;
    col.add(r);
  }
  return {ok, "5 quadratics x 200 iterations, max (f - f*)/(2LR^2/k^2) = " + fmt("%.3f", worst)};
}

// ------------------------------------------------------------------ 3

Outcome c3_restart_contraction(Collector& col) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    QuadraticSpec spec;
    spec.n = 50;
    spec.mu = seed % 2 == 0 ? 1e-2 : 1e-3;
    Rng rng(300 + seed);
    const QuadraticInstance q = make_quadratic(spec, rng);
    MsHarness h;
    h.cfg.epsilon = 1e-12;
    h.cfg.seed = seed;
    const Vector x0 = Vector::Zero(spec.n);
    const double L = q.problem->lipschitz_h();
    const std::int64_t n0 = restart_schedule(spec.mu, L, 1.0, 1e-12).n0;
    const MsResult res = h.run(*q.problem, x0, n0);
    const double ratio = (res.y - q.x_star).squaredNorm() / (x0 - q.x_star).squaredNorm();
    worst = std::max(worst, ratio);
    RunReport r;
    r.method = "ms-apg";
    r.problem = "restart-quadratic-" + std::to_string(seed);
    r.trace = h.trace.rows();
    r.gmco_exits = h.exits;
    col.add(r);
  }
  return {worst <= 0.6, "10 quadratics, worst ||y - x*||^2 / ||x0 - x*||^2 after N0 = " + fmt("%.3f", worst)};
}

// ------------------------------------------------------------------ 4, 5

BenchConfig quad_base() {
  BenchConfig c;
  c.method = Method::ms_apg;
  c.problem = "quad-cond100";
  c.solver.epsilon = 1e-8;
  c.solver.seed = 11;
  c.solver.deterministic = true;
  return c;
}

Outcome scaling(Collector& col, const std::string& axis, bool h_side) {
  const auto rows = sweep(quad_base(), axis, {1.0, 4.0});
  for (const auto& r : rows) {
    if (!r.error.empty()) return {false, "sub-run failed: " + r.error};
    if (r.result.exit_code != 0) return {false, "sub-run did not reach eps"};
    col.add(r.result.report);
  }
  const auto a = rows[0].result.report.total(), b = rows[1].result.report.total();
  const double rh = static_cast<double>(b.h_grad_calls) / static_cast<double>(a.h_grad_calls);
  const double rg = static_cast<double>(b.g_basic_units) / static_cast<double>(a.g_basic_units);
  const double scaled = h_side ? rh : rg, fixed = h_side ? rg : rh;
  const bool ok = scaled >= 1.3 && scaled <= 2.7 && fixed >= 0.8 && fixed <= 1.25;
  return {ok, "h-call ratio " + fmt("%.3f", rh) + ", g-unit ratio " + fmt("%.3f", rg) + " (h " +
                  std::to_string(a.h_grad_calls) + " -> " + std::to_string(b.h_grad_calls) + ", g " +
                  std::to_string(a.g_basic_units) + " -> " + std::to_string(b.g_basic_units) + ")"};
}

// ------------------------------------------------------------------ 6

Outcome c6_separation(Collector& col) {
  BenchConfig c = quad_base();
  const BenchResult ms = run_bench(c);
  c.method = Method::fgm;
  const BenchResult fg = run_bench(c);
  col.add(ms.report);
  col.add(fg.report);
  if (ms.exit_code != 0 || fg.exit_code != 0) return {false, "a run did not reach eps"};
  const double ratio = static_cast<double>(fg.report.total().h_grad_calls) /
                       static_cast<double>(ms.report.total().h_grad_calls);
  return {ratio >= 5.0, "fgm/ms-apg h-calls = " + std::to_string(fg.report.total().h_grad_calls) + "/" +
                            std::to_string(ms.report.total().h_grad_calls) + " = " + fmt("%.2f", ratio) +
                            " at gaps " + fmt("%.2e", *ms.final_gap) + ", " + fmt("%.2e", *fg.final_gap)};
}

// ------------------------------------------------------------------ 7

Outcome c7_certificates(const Collector& col) {
  std::size_t bad = 0, floor = 0;
  for (const auto& e : col.exits) {
    if (e.at_noise_floor) ++floor;
    if (!(e.checked && e.lhs <= e.rhs)) ++bad;
  }
  return {bad == 0 && !col.exits.empty(),
          std::to_string(col.exits.size()) + " exits from criteria 2-6, " + std::to_string(bad) +
              " violate ||grad F|| <= (L/2)||zeta - zeta0|| (" + std::to_string(floor) + " at the roundoff floor)"};
}

// ------------------------------------------------------------------ 8

Outcome c8_inner_scaling(Collector& col) {
  const Index n = 40, m = 4;
  const double Lg = 1e4, eps = 1e-8;
  std::string medians;
  bool ok = true;
  std::ostringstream trace;
  for (InnerKind kind : {InnerKind::apg, InnerKind::acdm, InnerKind::katyusha}) {
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(100 + seed);
      const Matrix q = detail::random_orthogonal(rng, n);
      const Vector s = detail::log_spaced(n, 1e-3 * Lg, Lg);
      Matrix H = q * s.asDiagonal() * q.transpose();
      H = 0.5 * (H + H.transpose());
      const Vector beta = rng.normal_vector(n);
      GOracle g;
      switch (kind) {
        case InnerKind::apg: g = FullGradientG{std::make_shared<QuadraticFunction>(H), Lg}; break;
        case InnerKind::acdm: g = CoordinateG{std::make_shared<QuadraticFunction>(H)}; break;
        case InnerKind::katyusha:
          g = FiniteSumG{std::make_shared<LeastSquaresSum>(detail::split_blocks(q, s, m))};
          break;
      }
      std::int64_t iters[2];
      for (int j = 0; j < 2; ++j) {
        const InnerProblem phi{beta, 1.0 * (j + 1), g};
        Rng r(7 + seed);
        OracleTally t;
        const InnerReport rep = make_inner_solver(kind)(phi, Vector::Zero(n), CertifiedGap{eps}, r, t);
        iters[j] = rep.iterations;
        trace << to_string(kind) << ',' << seed << ',' << j << ',' << rep.iterations << ',' << t.g_basic_units << ','
              << format_double(phi.value(rep.v_hat)) << '\n';
      }
      ratios.push_back(static_cast<double>(iters[0]) / static_cast<double>(iters[1]));
    }
    std::sort(ratios.begin(), ratios.end());
    const double med = 0.5 * (ratios[4] + ratios[5]);
    if (med < 1.19 || med > 1.69) ok = false;
    medians += std::string(medians.empty() ? "" : ", ") + to_string(kind) + " " + fmt("%.3f", med);
  }
  col.traces.push_back("inner-scaling\n" + trace.str());
  return {ok, "median iteration ratio alpha -> 2 alpha: " + medians};
}

// ------------------------------------------------------------------ 9

Outcome c9_coordinate_regime(Collector& col) {
  BenchConfig c;
  c.problem = "logdensity-desk";
  c.solver.epsilon = 1e-4;
  c.solver.seed = 1;
  c.solver.deterministic = true;
  std::vector<BenchResult> r;
  for (Method m : {Method::ms_acdm, Method::fgm, Method::coord_fgm}) {
    c.method = m;
    r.push_back(run_bench(c));
    col.add(r.back().report);
  }
  for (const auto& x : r)
    if (x.exit_code != 0) return {false, x.report.method + " did not reach the reference gap"};
  const bool ok = r[0].weighted_h_evals < r[1].weighted_h_evals && r[0].weighted_h_evals < r[2].weighted_h_evals;
  return {ok, "full grad-h equivalents at gap 1e-4 (L = 25 L_h): ms-acdm " + fmt("%.0f", r[0].weighted_h_evals) +
                  ", fgm " + fmt("%.0f", r[1].weighted_h_evals) + ", coord-fgm " + fmt("%.0f", r[2].weighted_h_evals)};
}

// ------------------------------------------------------------------ 10

Outcome c10_finite_sum_regime(Collector& col) {
  BenchConfig c;
  c.problem = "svm-desk";
  c.solver.epsilon = 1e-4;
  c.solver.seed = 1;
  c.solver.deterministic = true;
  c.method = Method::ms_katyusha;
  const BenchResult ms = run_bench(c);
  c.method = Method::fgm;
  const BenchResult fg = run_bench(c);
  col.add(ms.report);
  col.add(fg.report);

  // estimator unbiasedness on an m = 8 instance
  const auto small = make_kernel_svm(gen_svm(8, 5, 1));
  const auto& fs = *std::get<FiniteSumG>(small.problem->g()).fn;
  Rng rng(10);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const VrSnapshot snap(fs, 0.5 * rng.normal_vector(fs.dim()));
    const Vector x = 0.5 * rng.normal_vector(fs.dim());
    Vector avg = Vector::Zero(fs.dim());
    for (Index k = 0; k < fs.components(); ++k) avg += snap.estimator(x, k);
    avg /= static_cast<double>(fs.components());
    worst = std::max(worst, (avg - fs.gradient(x)).lpNorm<Eigen::Infinity>());
  }
  const auto hm = ms.report.total().h_grad_calls, hf = fg.report.total().h_grad_calls;
  const bool ok = ms.exit_code == 0 && fg.exit_code == 0 && hm < hf && worst <= 1e-12;
  return {ok, "h-calls at gap 1e-4: ms-katyusha " + std::to_string(hm) + ", fgm " + std::to_string(hf) +
                  "; estimator bias " + fmt("%.1e", worst)};
}

// ------------------------------------------------------------------ 11

double worst_fd_error(const SmoothFunction& f, std::uint64_t seed, double scale) {
  Rng rng(seed);
  double worst = 0.0;
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const Vector x = scale * rng.normal_vector(f.dim());
    Vector fd(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      Vector a = x, b = x;
      a[i] += h;
      b[i] -= h;
      fd[i] = (f.value(a) - f.value(b)) / (2.0 * h);
    }
    worst = std::max(worst, (f.gradient(x) - fd).norm() / std::max(1.0, fd.norm()));
  }
  return worst;
}

Outcome c11_gradients() {
  double worst = 0.0;
  for (GMode mode : {GMode::full_gradient, GMode::coordinate, GMode::finite_sum}) {
    PresetParams pp;
    pp.n = 20;
    const auto q = make_preset("quad-cond100", 1, pp, mode);
    worst = std::max(worst, worst_fd_error(q.problem->h(), 1, 1.0));
    worst = std::max(worst, worst_fd_error(function_of(q.problem->g()), 2, 1.0));
  }
  const auto svm = make_preset("svm-desk", 1);
  worst = std::max(worst, worst_fd_error(svm.problem->h(), 3, 0.5));
  worst = std::max(worst, worst_fd_error(function_of(svm.problem->g()), 4, 0.5));
  const auto ld = make_preset("logdensity-desk", 1);
  worst = std::max(worst, worst_fd_error(ld.problem->h(), 5, 1.0));
  worst = std::max(worst, worst_fd_error(function_of(ld.problem->g()), 6, 1.0));

  Rng rng(11);
  bool hinge = true;
  for (int t = 0; t < 1000; ++t) {
    const double gs = std::pow(10.0, rng.uniform(-3.0, 0.0));
    const double z = rng.uniform(-2.0, 2.0);
    const auto [v, d] = smoothed_hinge(z, gs);
    const double bias = std::max(0.0, z) - v;
    if (d < 0.0 || d > 1.0 || bias < -1e-15 || bias > gs / 2 + 1e-15) hinge = false;
  }
  return {worst <= 1e-6 && hinge, "max relative finite-difference error " + fmt("%.2e", worst) +
                                      ", smoothed hinge " + (hinge ? "within bounds" : "out of bounds")};
}

void print(int id, const char* name, const Outcome& o) {
  std::printf("criterion %2d [%s] %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

struct Deferred {
  Outcome c2, c3, c4, c5, c6, c8, c9, c10;
};

Deferred run_2_to_10(Collector& col) {
  Deferred d;
  d.c2 = c2_convex_envelope(col);
  d.c3 = c3_restart_contraction(col);
  d.c4 = scaling(col, "L_h-scale", true);
  d.c5 = scaling(col, "L_g-scale", false);
  d.c6 = c6_separation(col);
  d.c8 = c8_inner_scaling(col);
  d.c9 = c9_coordinate_regime(col);
  d.c10 = c10_finite_sum_regime(col);
  return d;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<bool> results;
  auto report = [&](int id, const char* name, const Outcome& o) {
    print(id, name, o);
    results.push_back(o.pass);
  };

  report(1, "step-size identities", guarded(c1_step_sizes));

  Collector first, second;
  Deferred d;
  bool ran = true;
  try {
    d = run_2_to_10(first);
  } catch (const std::exception& e) {
    ran = false;
    d.c2 = d.c3 = d.c4 = d.c5 = d.c6 = d.c8 = d.c9 = d.c10 = {false, std::string("exception: ") + e.what()};
  }
  report(2, "convex rate envelope", d.c2);
  report(3, "restart contraction", d.c3);
  report(4, "h-side scaling", d.c4);
  report(5, "g-side scaling", d.c5);
  report(6, "separation beats coupling", d.c6);
  report(7, "middle-loop certificate", ran ? c7_certificates(first) : Outcome{false, "runs failed"});
  report(8, "inner contract scaling", d.c8);
  report(9, "coordinate regime", d.c9);
  report(10, "finite-sum regime", d.c10);
  report(11, "gradient correctness", guarded(c11_gradients));

  Outcome det{false, "runs failed"};
  if (ran) {
    det = guarded([&] {
      run_2_to_10(second);
      std::size_t diff = 0;
      for (std::size_t i = 0; i < std::min(first.traces.size(), second.traces.size()); ++i)
        if (first.traces[i] != second.traces[i]) ++diff;
      const bool same = diff == 0 && first.traces.size() == second.traces.size();
      return Outcome{same, std::to_string(first.traces.size()) + " traces rerun, " + std::to_string(diff) + " differ"};
    });
  }
  report(12, "determinism", det);

  const auto passed = std::count(results.begin(), results.end(), true);
  std::printf("%ld/%zu criteria passed\n", static_cast<long>(passed), results.size());
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}
