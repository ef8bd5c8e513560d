#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osplit/bench/run.hpp"

using namespace osplit;

namespace {

struct CliState {
  std::string method = "ms-apg";
  std::string problem = "quad-cond100";
  std::string csv;
  bool skip_header = false;
  double eps = 1e-6;
  double delta = 0.05;
  double mu = -1.0;
  double L = 0.0;
  double R = 1.0;
  std::uint64_t seed = 0;
  std::string inner_stop = "certified";
  std::int64_t max_h = SolverConfig::unlimited;
  std::int64_t max_g = SolverConfig::unlimited;
  std::int64_t max_outer = SolverConfig::unlimited;
  std::int64_t max_inner = SolverConfig::unlimited;
  std::string out_dir;
  std::int64_t log_every = 1;
  double weight_full_grad = 1.0;
  bool deterministic = false;
  bool no_target = false;
  double lh_scale = 1.0;
  double lg_scale = 1.0;
  double problem_mu = -1.0;
  long long n = 0;
  long long m = 0;
  std::string axis;
  std::string values;
};

void add_common(CLI::App* app, CliState& s) {
  app->add_option("--problem", s.problem, "preset name");
  app->add_option("--seed", s.seed, "seed for data and sampling");
  app->add_option("--out-dir", s.out_dir, "output directory (default $OSPLIT_OUT_DIR or ./osplit_out)");
}

void add_run_options(CLI::App* app, CliState& s) {
  add_common(app, s);
  app->add_option("--method", s.method, "ms-apg | ms-acdm | ms-katyusha | fgm | coord-fgm | katyusha-full");
  app->add_option("--csv", s.csv, "SVM data file (features..., label); replaces --problem");
  app->add_flag("--skip-header", s.skip_header, "first CSV line is a header");
  app->add_option("--eps", s.eps, "target accuracy");
  app->add_option("--delta", s.delta, "failure probability (budgeted inner mode)");
  app->add_option("--mu", s.mu, "strong convexity used by the solver (default: problem's)");
  app->add_option("--L", s.L, "outer prox parameter (default: preset's, usually L_h)");
  app->add_option("--R", s.R, "bound on the initial distance to the solution");
  app->add_option("--inner-stop", s.inner_stop, "certified | budgeted")->check(CLI::IsMember({"certified", "budgeted"}));
  app->add_option("--max-h-budget", s.max_h, "cap on h gradient calls");
  app->add_option("--max-g-budget", s.max_g, "cap on g basic units");
  app->add_option("--max-outer-budget", s.max_outer, "cap on outer iterations");
  app->add_option("--max-inner-budget", s.max_inner, "cap on g units per inner solve");
  app->add_option("--log-every", s.log_every, "keep every k-th trace row");
  app->add_option("--weight-full-grad", s.weight_full_grad, "weight of a full h gradient in weighted totals");
  app->add_flag("--deterministic", s.deterministic, "zero timing columns so equal runs give equal files");
  app->add_flag("--no-target", s.no_target, "run the method's own schedule instead of stopping at f* + eps");
  app->add_option("--lh-scale", s.lh_scale, "scale L_h of the quadratic preset");
  app->add_option("--lg-scale", s.lg_scale, "scale L_g of the quadratic preset");
  app->add_option("--problem-mu", s.problem_mu, "mu of the quadratic preset");
  app->add_option("--n", s.n, "dimension override");
  app->add_option("--m", s.m, "component / row count override");
}

BenchConfig to_config(const CliState& s) {
  BenchConfig c;
  c.method = parse_method(s.method);
  c.problem = s.problem;
  c.csv = s.csv;
  c.csv_skip_header = s.skip_header;
  c.solver.epsilon = s.eps;
  c.solver.delta = s.delta;
  c.solver.mu = s.mu;
  c.solver.L = s.L;
  c.solver.R = s.R;
  c.solver.seed = s.seed;
  c.solver.inner_stop = parse_inner_stop_mode(s.inner_stop);
  c.solver.max_h_calls = s.max_h;
  c.solver.max_g_units = s.max_g;
  c.solver.max_outer_iters = s.max_outer;
  c.solver.max_inner_units = s.max_inner;
  c.solver.log_every = s.log_every;
  c.solver.deterministic = s.deterministic;
  c.stop_at_target = !s.no_target;
  c.weight_full_grad = s.weight_full_grad;
  c.params.lh_scale = s.lh_scale;
  c.params.lg_scale = s.lg_scale;
  if (s.problem_mu >= 0.0) c.params.mu = s.problem_mu;
  if (s.n > 0) c.params.n = static_cast<Index>(s.n);
  if (s.m > 0) c.params.m = static_cast<Index>(s.m);
  c.out_dir = s.out_dir;
  return c;
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("OSPLIT_OUT_DIR"); env && *env) return env;
  return "osplit_out";
}

/// key=value lines become `--key value` tokens unless the key was given on
/// the command line. `#` starts a comment.
std::vector<std::string> config_tokens(const std::string& path, const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + " line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(t.substr(0, eq)), val = detail::trim(t.substr(eq + 1));
    if (given.count(key)) continue;
    out.push_back("--" + key);
    // flags take `true`/`false`
    if (val == "true" || val == "false") {
      if (val == "false") out.pop_back();
      continue;
    }
    out.push_back(val);
  }
  return out;
}

/// Splices config-file options into argv right after the subcommand.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string cfg_path;
  std::set<std::string> given;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      cfg_path = args[++i];
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      cfg_path = args[i].substr(9);
      continue;
    }
    if (args[i].rfind("--", 0) == 0) given.insert(args[i].substr(2, args[i].find('=') - 2));
    kept.push_back(args[i]);
  }
  if (cfg_path.empty() || kept.size() < 2) return kept;
  const auto extra = config_tokens(cfg_path, given);
  kept.insert(kept.begin() + 2, extra.begin(), extra.end());
  return kept;
}

void print_result(const BenchResult& r) {
  const auto t = r.report.total();
  std::cout << r.report.method << " on " << r.problem_id << ": " << to_string(r.report.status)
            << "  gap=" << format_double(r.final_gap.value_or(std::numeric_limits<double>::quiet_NaN()))
            << "  h_grad_calls=" << t.h_grad_calls << "  g_basic_units=" << t.g_basic_units;
  if (t.h_partial_calls) std::cout << "  h_partial_calls=" << t.h_partial_calls;
  std::cout << "  outer=" << r.report.outer_iterations << '\n';
  for (const auto& w : r.report.warnings) std::cout << "warning: " << w << '\n';
  if (!r.trace_path.empty()) std::cout << "trace: " << r.trace_path << "\nsummary: " << r.summary_path << '\n';
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(detail::parse_decimal(tok, "--values"));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osplit: oracle-split solvers and benchmarks for f = h + g"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "osplit 0.1.0");
  app.add_option("--config", "key=value file; command-line flags win");

  CliState s;
  auto* run = app.add_subcommand("run", "solve one problem with one method");
  add_run_options(run, s);
  auto* sw = app.add_subcommand("sweep", "run over a list of values of one parameter");
  add_run_options(sw, s);
  sw->add_option("--axis", s.axis, "L_h-scale | L_g-scale | mu | eps | n | m")->required();
  sw->add_option("--values", s.values, "comma-separated values")->required();
  auto* gen = app.add_subcommand("gen", "write a preset's data to files");
  add_common(gen, s);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    s.out_dir = resolve_out_dir(s.out_dir);
    if (*gen) {
      for (const auto& f : generate_preset(s.problem, s.seed, s.out_dir)) std::cout << f << '\n';
      return 0;
    }
    BenchConfig cfg = to_config(s);
    if (*run) {
      const BenchResult r = run_bench(cfg);
      print_result(r);
      return r.exit_code;
    }
    const auto rows = sweep(cfg, s.axis, parse_values(s.values));
    const std::string table = sweep_csv(s.axis, rows);
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / ("sweep_" + detail::sanitize(s.axis) + ".csv");
    std::ofstream(path, std::ios::binary) << table;
    std::cout << table << "sweep: " << path.string() << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
