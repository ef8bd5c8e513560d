#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "osplit/bench/run.hpp"

using namespace osplit;

namespace {

QuadraticInstance small_quadratic(std::uint64_t seed, double L_g = 100.0, double mu = 1e-2, Index n = 40) {
  QuadraticSpec spec;
  spec.n = n;
  spec.L_g = L_g;
  spec.mu = mu;
  Rng rng(seed);
  return make_quadratic(spec, rng);
}

void expect_trace_invariants(const RunReport& r) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_TRUE(r.trace[i - 1].tally.precedes(r.trace[i].tally)) << "row " << i;
    EXPECT_FALSE(r.trace[i - 1].tally == r.trace[i].tally) << "row " << i;
  }
  EXPECT_EQ(r.trace.back().tally, r.total());
  const auto& t = r.tallies;
  const OracleTally sum = t.outer + t.gmco + t.inner + t.criterion;
  EXPECT_EQ(sum, r.total());
}

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  return d.string();
}

}  // namespace

// ---------------------------------------------------------------- fgm

TEST(Fgm, StronglyConvexCountWithinTenfoldOfRate) {
  auto q = small_quadratic(1);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.target_value = q.f_star + cfg.epsilon;
  const auto r = baseline_fgm(*q.problem, cfg);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_LE(q.gap(r.x), 1e-8);
  const double lf = 101.0, mu = 1e-2, R = q.x_star.norm();
  const double rate = std::sqrt(lf / mu) * std::log(mu * R * R / 1e-8);
  EXPECT_LE(static_cast<double>(r.outer_iterations), 10.0 * rate);
  EXPECT_GE(static_cast<double>(r.outer_iterations), rate / 10.0);
  expect_trace_invariants(r);
}

TEST(Fgm, StartAtMinimizerExitsImmediately) {
  auto q = small_quadratic(2);
  SolverConfig cfg;
  cfg.target_value = q.f_star + 1e-8;
  const auto r = baseline_fgm(*q.problem, cfg, &q.x_star);
  EXPECT_EQ(r.outer_iterations, 0);
  EXPECT_EQ(r.total().h_grad_calls, 0);
  EXPECT_EQ(r.status, SolveStatus::converged);
}

TEST(Fgm, PerIterationDeltaIsOneAndKappa) {
  QuadraticSpec spec;
  spec.n = 8;
  spec.split = GMode::finite_sum;
  spec.m = 4;
  Rng rng(3);
  auto q = make_quadratic(spec, rng);
  SolverConfig cfg;
  cfg.max_outer_iters = 20;
  cfg.target_value = q.f_star - 1.0;  // unreachable
  const auto r = baseline_fgm(*q.problem, cfg);
  EXPECT_EQ(r.status, SolveStatus::budget_exhausted);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const OracleTally d = r.trace[i].tally - r.trace[i - 1].tally;
    EXPECT_EQ(d.h_grad_calls, 1);
    EXPECT_EQ(d.g_basic_units, 4);
  }
}

TEST(Fgm, ConvexBranchWithoutTarget) {
  auto q = small_quadratic(4, 10.0, 0.0, 20);
  SolverConfig cfg;
  cfg.epsilon = 1e-4;
  cfg.R = std::max(1.0, q.x_star.norm());
  const auto r = baseline_fgm(*q.problem, cfg);
  EXPECT_LE(q.gap(r.x), 1e-4);
}

// ---------------------------------------------------------------- coord-fgm

TEST(CoordFgm, SeparableQuadraticReachesEps) {
  Matrix hh = Matrix::Zero(5, 5), hg = Matrix::Zero(5, 5);
  hh.diagonal() << 1, 0.5, 0.2, 1, 0.8;
  hg.diagonal() << 3, 1, 0.1, 2, 5;
  Vector b(5);
  b << 1, -1, 2, 0.5, 3;
  auto q = make_quadratic_from(hh, hg, b, GMode::coordinate);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.target_value = q.f_star + 1e-8;
  const auto r = baseline_coord_fgm(*q.problem, cfg);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_LE(q.gap(r.x), 1e-8);
  EXPECT_EQ(r.total().h_grad_calls, 0);
  EXPECT_EQ(r.total().h_partial_calls, r.total().g_basic_units);
  EXPECT_EQ(r.total().h_partial_calls % 5, 0);
  expect_trace_invariants(r);
}

TEST(CoordFgm, OneDimensionReachesScalarMinimizer) {
  Matrix hh(1, 1), hg(1, 1);
  hh << 2.0;
  hg << 1.0;
  Vector b(1);
  b << 3.0;
  auto q = make_quadratic_from(hh, hg, b, GMode::coordinate);
  SolverConfig cfg;
  cfg.epsilon = 1e-12;
  cfg.target_value = q.f_star + 1e-12;
  const auto r = baseline_coord_fgm(*q.problem, cfg);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  // with one coordinate the method is accelerated gradient descent on the scalar
  const auto f = baseline_fgm(*q.problem, cfg);
  EXPECT_NEAR(r.x[0], f.x[0], 1e-5);
}

TEST(CoordFgm, RejectsMissingCoordinateAccess) {
  auto q = small_quadratic(5);
  EXPECT_THROW(baseline_coord_fgm(*q.problem, SolverConfig{}), std::invalid_argument);
}

// ---------------------------------------------------------------- katyusha-full

TEST(KatyushaFull, ReachesTargetOnFiniteSum) {
  QuadraticSpec spec;
  spec.n = 10;
  spec.L_g = 5.0;
  spec.mu = 0.1;
  spec.split = GMode::finite_sum;
  spec.m = 5;
  Rng rng(6);
  auto q = make_quadratic(spec, rng);
  SolverConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.target_value = q.f_star + 1e-6;
  const auto r = baseline_katyusha_full(*q.problem, cfg);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_LE(q.gap(r.x), 1e-6);
  // every stochastic step reads h once as well
  EXPECT_GE(r.total().h_grad_calls, r.total().g_basic_units / 2);
  expect_trace_invariants(r);
}

// ---------------------------------------------------------------- parity

TEST(Parity, ZeroGBothNearAcceleratedRate) {
  auto q = small_quadratic(7, 0.0, 1e-3, 30);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.target_value = q.f_star + 1e-8;
  const auto ms = solve(*q.problem, cfg, make_inner_solver(InnerKind::apg));
  const auto fg = baseline_fgm(*q.problem, cfg);
  ASSERT_EQ(ms.status, SolveStatus::converged);
  ASSERT_EQ(fg.status, SolveStatus::converged);
  const double a = static_cast<double>(ms.total().h_grad_calls), b = static_cast<double>(fg.total().h_grad_calls);
  EXPECT_LE(a / b, 4.0);
  EXPECT_LE(b / a, 4.0);
}

// ---------------------------------------------------------------- run

TEST(Run, QuadPresetToEightDigits) {
  BenchConfig cfg;
  cfg.problem = "quad-cond100";
  cfg.solver.epsilon = 1e-8;
  cfg.solver.seed = 7;
  const auto r = run_bench(cfg);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_TRUE(r.final_gap);
  EXPECT_LE(*r.final_gap, 1e-8);
  expect_trace_invariants(r.report);
}

TEST(Run, SameCommandTwiceGivesIdenticalFiles) {
  BenchConfig cfg;
  cfg.solver.epsilon = 1e-6;
  cfg.solver.seed = 3;
  cfg.out_dir = fresh_dir("osplit_det_a");
  const auto a = run_bench(cfg);
  cfg.out_dir = fresh_dir("osplit_det_b");
  const auto b = run_bench(cfg);
  const std::string ta = read_file(a.trace_path), tb = read_file(b.trace_path);
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, tb);
  EXPECT_EQ(read_file(a.summary_path), read_file(b.summary_path));
}

TEST(Run, CsvSchemaIsExact) {
  BenchConfig cfg;
  cfg.method = Method::fgm;
  cfg.solver.epsilon = 1e-3;
  const auto r = run_bench(cfg);
  const std::string csv = trace_csv(r.report.trace);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "iter,stage,f_value,h_grad_calls,g_basic_units,f_value_evals,criterion_checks,elapsed_s");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  // 17 significant digits survive a parse round trip
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  std::stringstream row(line);
  std::string iter, stage, f;
  std::getline(row, iter, ',');
  std::getline(row, stage, ',');
  std::getline(row, f, ',');
  EXPECT_EQ(std::stod(f), r.report.trace[1].f_value);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Run, SummaryJsonFields) {
  BenchConfig cfg;
  cfg.solver.epsilon = 1e-4;
  cfg.out_dir = fresh_dir("osplit_json");
  const auto r = run_bench(cfg);
  const auto j = nlohmann::json::parse(read_file(r.summary_path));
  EXPECT_EQ(j["method"], "ms-apg");
  EXPECT_EQ(j["problem"], "quad-cond100");
  EXPECT_EQ(j["exit_status"], "converged");
  EXPECT_TRUE(j["final_gap"].is_number());
  EXPECT_EQ(j["tallies"]["h_grad_calls"].get<std::int64_t>(), r.report.total().h_grad_calls);
  EXPECT_TRUE(j.contains("wall_time_s"));
  EXPECT_TRUE(j.contains("parameters"));
}

TEST(Run, IncompatibleMethodIsConfigError) {
  BenchConfig cfg;
  cfg.method = Method::ms_katyusha;
  cfg.problem = "logdensity-desk";
  EXPECT_THROW(run_bench(cfg), std::invalid_argument);
  cfg.method = Method::ms_acdm;
  cfg.problem = "svm-desk";
  EXPECT_THROW(run_bench(cfg), std::invalid_argument);
}

TEST(Run, BudgetExhaustionExitCode) {
  BenchConfig cfg;
  cfg.method = Method::fgm;
  cfg.solver.epsilon = 1e-10;
  cfg.solver.max_h_calls = 10;
  const auto r = run_bench(cfg);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.report.total().h_grad_calls, 10);
}

TEST(Run, ReferenceGapForUnknownMinimum) {
  BenchConfig cfg;
  cfg.method = Method::fgm;
  cfg.problem = "svm-desk";
  cfg.params.m = 20;
  cfg.solver.epsilon = 1e-3;
  const auto r = run_bench(cfg);
  ASSERT_TRUE(r.reference);
  EXPECT_FALSE(r.f_star);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_LE(*r.final_gap, 1e-3);
  EXPECT_GE(*r.final_gap, -1e-5);
}

TEST(Run, WeightedCountsUseWeight) {
  BenchConfig cfg;
  cfg.method = Method::fgm;
  cfg.solver.epsilon = 1e-3;
  cfg.weight_full_grad = 2.0;
  const auto r = run_bench(cfg);
  EXPECT_EQ(r.weighted_h_evals, 2.0 * static_cast<double>(r.report.total().h_grad_calls));
}

// ---------------------------------------------------------------- sweep

TEST(Sweep, SingleValueMatchesRun) {
  BenchConfig cfg;
  cfg.solver.epsilon = 1e-6;
  cfg.params.lh_scale = 2.0;
  const auto direct = run_bench(cfg);
  cfg.params.lh_scale = 1.0;
  const auto rows = sweep(cfg, "L_h-scale", {2.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_EQ(rows[0].result.report.total(), direct.report.total());
  EXPECT_EQ(trace_csv(rows[0].result.report.trace), trace_csv(direct.report.trace));
}

TEST(Sweep, SortedAndFailuresRecordedInRow) {
  BenchConfig cfg;
  cfg.solver.epsilon = 1e-4;
  const auto rows = sweep(cfg, "n", {20, 1, 10});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, 1.0);
  EXPECT_FALSE(rows[0].error.empty());  // n = 1 quadratic preset is rejected
  EXPECT_TRUE(rows[1].error.empty());
  EXPECT_TRUE(rows[2].error.empty());
  const std::string table = sweep_csv("n", rows);
  EXPECT_NE(table.find("error"), std::string::npos);
  EXPECT_THROW(sweep(cfg, "colour", {1.0}), std::invalid_argument);
}

// ---------------------------------------------------------------- gen

TEST(Gen, WritesPresetFiles) {
  const std::string dir = fresh_dir("osplit_gen");
  const auto files = generate_preset("logdensity-desk", 1, dir);
  ASSERT_EQ(files.size(), 2u);
  std::ifstream in(files[0]);
  const CsrMatrix a = CsrMatrix::read(in);
  const auto spec = gen_log_density(50, 600, 0.01, 1);
  EXPECT_TRUE(a == spec.A);
  const auto svm = generate_preset("svm-desk", 1, dir);
  const auto data = load_csv(svm[0], {CsvSchema::svm, false});
  EXPECT_EQ(data.rows(), 200);
  EXPECT_EQ(data.cols(), 5);
}
