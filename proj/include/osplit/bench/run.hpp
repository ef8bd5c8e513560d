#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "osplit/bench/baselines.hpp"
#include "osplit/problems/presets.hpp"

namespace osplit {

enum class Method { ms_apg, ms_acdm, ms_katyusha, fgm, coord_fgm, katyusha_full };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ms_apg: return "ms-apg";
    case Method::ms_acdm: return "ms-acdm";
    case Method::ms_katyusha: return "ms-katyusha";
    case Method::fgm: return "fgm";
    case Method::coord_fgm: return "coord-fgm";
    case Method::katyusha_full: return "katyusha-full";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::ms_apg, Method::ms_acdm, Method::ms_katyusha, Method::fgm, Method::coord_fgm,
                   Method::katyusha_full})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected ms-apg, ms-acdm, ms-katyusha, fgm, coord-fgm, katyusha-full)");
}

/// The g mode a method works in; nullopt when any mode will do.
inline std::optional<GMode> required_mode(Method m) {
  switch (m) {
    case Method::ms_acdm:
    case Method::coord_fgm: return GMode::coordinate;
    case Method::ms_katyusha:
    case Method::katyusha_full: return GMode::finite_sum;
    default: return std::nullopt;
  }
}

struct BenchConfig {
  Method method = Method::ms_apg;
  std::string problem = "quad-cond100";
  std::string csv;  // SVM data file; overrides `problem` when set
  bool csv_skip_header = false;
  PresetParams params;
  SolverConfig solver;
  /// Stop at f* + eps (or reference + eps); otherwise run the method's own schedule.
  bool stop_at_target = true;
  double weight_full_grad = 1.0;
  std::string out_dir;  // empty: no files
  std::string tag;      // file name stem; empty: derived from method, problem and seed
};

struct BenchResult {
  RunReport report;
  std::string problem_id;
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<double> f_star;
  std::optional<double> reference;
  std::optional<double> final_gap;
  double weighted_h_evals = 0.0;  // W * full h gradients + h partials / n
  int exit_code = 0;
  std::string trace_path;
  std::string summary_path;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kTraceHeader =
    "iter,stage,f_value,h_grad_calls,g_basic_units,f_value_evals,criterion_checks,elapsed_s";

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << kTraceHeader << '\n';
  for (const auto& r : rows) {
    os << r.iter << ',' << r.stage << ',' << format_double(r.f_value) << ',' << r.tally.h_grad_calls << ','
       << r.tally.g_basic_units << ',' << r.tally.f_value_evals << ',' << r.tally.criterion_checks << ','
       << format_double(r.elapsed_s) << '\n';
  }
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  write_trace_csv(os, rows);
  return os.str();
}

namespace detail {

inline nlohmann::ordered_json tally_json(const OracleTally& t) {
  return {{"h_grad_calls", t.h_grad_calls},
          {"g_basic_units", t.g_basic_units},
          {"f_value_evals", t.f_value_evals},
          {"criterion_checks", t.criterion_checks},
          {"h_partial_calls", t.h_partial_calls}};
}

inline nlohmann::ordered_json nullable(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::string sanitize(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return s;
}

inline std::mutex& reference_mutex() {
  static std::mutex m;
  return m;
}
inline std::map<std::string, double>& reference_cache() {
  static std::map<std::string, double> c;
  return c;
}

}  // namespace detail

inline std::string summary_json(const BenchConfig& cfg, const BenchResult& r) {
  nlohmann::ordered_json j;
  j["method"] = to_string(cfg.method);
  j["problem"] = r.problem_id;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  params["seed"] = cfg.solver.seed;
  params["epsilon"] = cfg.solver.epsilon;
  params["delta"] = cfg.solver.delta;
  params["L"] = cfg.solver.L;
  params["inner_stop"] = to_string(cfg.solver.inner_stop);
  j["parameters"] = params;
  j["final_value"] = detail::nullable(r.report.final_value);
  j["final_gap"] = detail::nullable(r.final_gap);
  j["reference_value"] = detail::nullable(r.reference);
  j["outer_iterations"] = r.report.outer_iterations;
  j["tallies"] = detail::tally_json(r.report.total());
  j["tallies_by_phase"] = {{"outer", detail::tally_json(r.report.tallies.outer)},
                           {"gmco", detail::tally_json(r.report.tallies.gmco)},
                           {"inner", detail::tally_json(r.report.tallies.inner)},
                           {"criterion", detail::tally_json(r.report.tallies.criterion)}};
  j["weight_full_grad"] = cfg.weight_full_grad;
  j["weighted_h_evals"] = r.weighted_h_evals;
  j["wall_time_s"] = cfg.solver.deterministic ? 0.0 : r.report.wall_time_s;
  j["exit_status"] = to_string(r.report.status);
  j["warnings"] = r.report.warnings;
  return j.dump(2) + "\n";
}

/// Builds the problem for a config, checking method/problem compatibility.
inline ProblemInstance prepare_instance(const BenchConfig& cfg) {
  const auto need = required_mode(cfg.method);
  if (!cfg.csv.empty()) {
    if (need && *need != GMode::finite_sum)
      throw std::invalid_argument(std::string("method ") + to_string(cfg.method) +
                                  " needs a coordinate-mode problem; CSV data gives a finite-sum SVM");
    return make_svm_from_csv(cfg.csv, cfg.csv_skip_header);
  }
  const auto have = preset_mode(cfg.problem);
  if (have && need && *have != *need)
    throw std::invalid_argument(std::string("method ") + to_string(cfg.method) + " needs a " + to_string(*need) +
                                " g, but preset " + cfg.problem + " provides a " + to_string(*have) + " g");
  return make_preset(cfg.problem, cfg.solver.seed, cfg.params, need.value_or(GMode::full_gradient));
}

/// min f from a high-effort solve at eps/100, computed once per
/// (problem, parameters, seed, eps) and kept for the process lifetime.
inline double cached_reference(const ProblemInstance& pi, std::uint64_t seed, double eps) {
  std::ostringstream key;
  key << pi.id;
  for (const auto& [k, v] : pi.params) key << ';' << k << '=' << v;
  key << ";seed=" << seed << ";eps=" << format_double(eps);
  {
    std::lock_guard<std::mutex> lk(detail::reference_mutex());
    auto it = detail::reference_cache().find(key.str());
    if (it != detail::reference_cache().end()) return it->second;
  }
  const double v = reference_value(*pi.problem, eps / 100.0);
  std::lock_guard<std::mutex> lk(detail::reference_mutex());
  detail::reference_cache().emplace(key.str(), v);
  return v;
}

/// Runs one method on an already built instance.
inline BenchResult run_on(const BenchConfig& cfg, const ProblemInstance& pi) {
  const CompositeProblem& p = *pi.problem;
  SolverConfig sc = cfg.solver;
  BenchResult out;
  out.problem_id = pi.id;
  out.params = pi.params;
  out.f_star = pi.f_star;
  if (!pi.f_star) out.reference = cached_reference(pi, cfg.solver.seed, sc.epsilon);
  const double fmin = pi.f_star ? *pi.f_star : *out.reference;
  if (cfg.stop_at_target && !sc.target_value) sc.target_value = fmin + sc.epsilon;

  switch (cfg.method) {
    case Method::ms_apg:
    case Method::ms_acdm:
    case Method::ms_katyusha: {
      const InnerKind kind = cfg.method == Method::ms_apg    ? InnerKind::apg
                             : cfg.method == Method::ms_acdm ? InnerKind::acdm
                                                             : InnerKind::katyusha;
      if (!inner_supports(kind, p.g_mode()))
        throw std::invalid_argument(std::string("method ") + to_string(cfg.method) + " cannot use a " +
                                    to_string(p.g_mode()) + " g");
      if (sc.L <= 0.0) sc.L = pi.L_factor * p.lipschitz_h();
      InnerOptions io;
      io.max_units = sc.max_inner_units;
      io.cert_period = sc.inner_cert_period;
      io.c_cert = sc.c_cert;
      out.report = solve(p, sc, make_inner_solver(kind, io), kind);
      break;
    }
    case Method::fgm: out.report = baseline_fgm(p, sc); break;
    case Method::coord_fgm: out.report = baseline_coord_fgm(p, sc); break;
    case Method::katyusha_full: out.report = baseline_katyusha_full(p, sc); break;
  }
  out.report.method = to_string(cfg.method);
  out.report.problem = pi.id;

  double best = out.report.final_value;
  for (const auto& r : out.report.trace)
    if (std::isfinite(r.f_value)) best = std::min(best, r.f_value);
  out.final_gap = pi.f_star ? out.report.final_value - *pi.f_star : best - fmin;
  out.report.final_gap = out.final_gap;
  const OracleTally t = out.report.total();
  out.weighted_h_evals = cfg.weight_full_grad * static_cast<double>(t.h_grad_calls) +
                         static_cast<double>(t.h_partial_calls) / static_cast<double>(p.dim());
  out.exit_code = out.report.status == SolveStatus::converged ? 0 : 2;
  return out;
}

inline std::string default_tag(const BenchConfig& cfg, const std::string& problem_id) {
  return detail::sanitize(std::string(to_string(cfg.method)) + "__" + problem_id + "__seed" +
                          std::to_string(cfg.solver.seed));
}

inline void write_outputs(const BenchConfig& cfg, BenchResult& r) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  const std::string stem = cfg.tag.empty() ? default_tag(cfg, r.problem_id) : cfg.tag;
  const auto base = std::filesystem::path(cfg.out_dir) / stem;
  r.trace_path = base.string() + ".trace.csv";
  r.summary_path = base.string() + ".summary.json";
  std::ofstream(r.trace_path, std::ios::binary) << trace_csv(r.report.trace);
  std::ofstream(r.summary_path, std::ios::binary) << summary_json(cfg, r);
}

/// Full `run`: build, solve, write files. Config errors propagate as
/// std::invalid_argument (exit code 1 at the CLI).
inline BenchResult run_bench(const BenchConfig& cfg) {
  cfg.solver.validate();
  require(cfg.weight_full_grad > 0.0, "weight-full-grad must be positive");
  const ProblemInstance pi = prepare_instance(cfg);
  BenchResult r = run_on(cfg, pi);
  write_outputs(cfg, r);
  return r;
}

// ---------------------------------------------------------------- sweep

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> a = {"L_h-scale", "L_g-scale", "mu", "eps", "n", "m"};
  return a;
}

inline BenchConfig apply_axis(BenchConfig cfg, const std::string& axis, double v) {
  if (axis == "L_h-scale") cfg.params.lh_scale = v;
  else if (axis == "L_g-scale") cfg.params.lg_scale = v;
  else if (axis == "mu") cfg.params.mu = v;
  else if (axis == "eps") cfg.solver.epsilon = v;
  else if (axis == "n") cfg.params.n = static_cast<Index>(v);
  else if (axis == "m") cfg.params.m = static_cast<Index>(v);
  else throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  return cfg;
}

struct SweepRow {
  double value = 0.0;
  BenchResult result;
  std::string error;
};

/// One run per value, sorted by value; a failing run is recorded in its row.
inline std::vector<SweepRow> sweep(const BenchConfig& base, const std::string& axis, std::vector<double> values) {
  require(std::find(sweep_axes().begin(), sweep_axes().end(), axis) != sweep_axes().end(),
          "unknown sweep axis '" + axis + "'");
  require(!values.empty(), "sweep needs at least one value");
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      BenchConfig c = apply_axis(base, axis, v);
      if (!base.out_dir.empty() && base.tag.empty()) c.tag = default_tag(c, c.problem) + "__" + detail::sanitize(axis) + "=" + format_double(v);
      row.result = run_bench(c);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.result.exit_code = 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << axis << ",method,problem,status,h_grad_calls,g_basic_units,h_partial_calls,f_value_evals,final_gap,"
                "weighted_h_evals,wall_time_s,error\n";
  for (const auto& r : rows) {
    const auto t = r.result.report.total();
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << format_double(r.value) << ',' << r.result.report.method << ',' << r.result.problem_id << ','
       << (r.error.empty() ? to_string(r.result.report.status) : "error") << ',' << t.h_grad_calls << ','
       << t.g_basic_units << ',' << t.h_partial_calls << ',' << t.f_value_evals << ','
       << format_double(r.result.final_gap.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
       << format_double(r.result.weighted_h_evals) << ',' << format_double(r.result.report.wall_time_s) << ','
       << err << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- gen

namespace detail {

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
}

}  // namespace detail

/// Writes a preset's raw data under dir; returns the files written.
inline std::vector<std::string> generate_preset(const std::string& name, std::uint64_t seed,
                                                const std::string& dir, const PresetParams& pp = {}) {
  const ProblemInstance pi = make_preset(name, seed, pp);
  const auto root = std::filesystem::path(dir) / detail::sanitize(name);
  std::filesystem::create_directories(root);
  std::vector<std::string> files;
  auto put = [&](const std::string& f, const Matrix& m) {
    detail::write_matrix_csv(root / f, m);
    files.push_back((root / f).string());
  };
  if (const auto* q = std::get_if<QuadraticInstance>(&pi.source)) {
    put("H_h.csv", q->H_h);
    put("H_g.csv", q->H_g);
    put("b.csv", q->b);
    put("x_star.csv", q->x_star);
  } else if (const auto* s = std::get_if<KernelSvmSpec>(&pi.source)) {
    Matrix data(s->points.rows(), s->points.cols() + 1);
    data << s->points, s->labels;
    put("data.csv", data);
  } else {
    const auto& l = std::get<LogDensitySpec>(pi.source);
    std::ofstream os(root / "A.csr", std::ios::binary);
    l.A.write(os);
    files.push_back((root / "A.csr").string());
    put("G2.csv", l.G2);
  }
  return files;
}

}  // namespace osplit
