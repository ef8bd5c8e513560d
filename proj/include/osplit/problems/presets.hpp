#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "osplit/problems/csv.hpp"
#include "osplit/problems/logdensity.hpp"
#include "osplit/problems/quadratic.hpp"
#include "osplit/problems/svm.hpp"

namespace osplit {

/// Knobs the sweep axes turn; unset fields keep the preset's value.
struct PresetParams {
  double lh_scale = 1.0;
  double lg_scale = 1.0;
  std::optional<double> mu;
  std::optional<Index> n;
  std::optional<Index> m;
};

/// A ready problem plus what the harness needs to know about it.
struct ProblemInstance {
  std::string id;
  std::shared_ptr<const CompositeProblem> problem;
  std::optional<double> f_star;
  std::optional<Vector> x_star;
  double L_factor = 1.0;  // preset outer L as a multiple of L_h
  std::vector<std::pair<std::string, std::string>> params;
  /// Raw data, kept for `gen`.
  std::variant<QuadraticInstance, KernelSvmSpec, LogDensitySpec> source;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"quad-cond100", "svm-desk", "svm-paper",
                                                 "logdensity-desk", "logdensity-paper"};
  return names;
}

inline bool is_preset(const std::string& name) {
  for (const auto& n : preset_names())
    if (n == name) return true;
  return false;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ProblemInstance from_svm(std::string id, const KernelSvmSpec& spec) {
  ProblemInstance pi;
  pi.id = std::move(id);
  pi.problem = make_kernel_svm(spec).problem;
  pi.params = {{"m", std::to_string(spec.points.rows())},
               {"n_features", std::to_string(spec.points.cols())},
               {"gamma_kernel", num(spec.gamma_kernel)},
               {"lambda", num(spec.lambda)},
               {"gamma_s", num(spec.gamma_s)}};
  pi.source = spec;
  return pi;
}

}  // namespace detail

/// Quadratic preset in whichever g split the method needs.
inline ProblemInstance make_quadratic_preset(const PresetParams& pp, std::uint64_t seed, GMode split) {
  QuadraticSpec qs;
  qs.n = pp.n.value_or(100);
  qs.L_h = 1.0 * pp.lh_scale;
  qs.L_g = 100.0 * pp.lg_scale;
  qs.mu = pp.mu.value_or(1e-2);
  qs.split = split;
  qs.m = pp.m.value_or(10);
  Rng rng(seed);
  QuadraticInstance q = make_quadratic(qs, rng);
  ProblemInstance pi;
  pi.id = "quad-cond100";
  pi.problem = q.problem;
  pi.f_star = q.f_star;
  pi.x_star = q.x_star;
  pi.params = {{"n", std::to_string(qs.n)},   {"L_h", detail::num(qs.L_h)},
               {"L_g", detail::num(qs.L_g)},  {"mu", detail::num(qs.mu)},
               {"split", to_string(split)},    {"m", std::to_string(qs.m)}};
  pi.source = std::move(q);
  return pi;
}

/// Builds a named preset. `split` only matters for quad-cond100; the other
/// presets have a fixed g mode.
inline ProblemInstance make_preset(const std::string& name, std::uint64_t seed, const PresetParams& pp = {},
                                   GMode split = GMode::full_gradient) {
  if (name == "quad-cond100") return make_quadratic_preset(pp, seed, split);
  if (name == "svm-desk" || name == "svm-paper") {
    const Index m = pp.m.value_or(name == "svm-desk" ? 200 : 4000);
    return detail::from_svm(name, gen_svm(m, pp.n.value_or(5), seed));
  }
  if (name == "logdensity-desk" || name == "logdensity-paper") {
    const bool desk = name == "logdensity-desk";
    const Index n = pp.n.value_or(desk ? 50 : 500);
    const Index p = pp.m.value_or(desk ? 600 : 6000);
    const double density = desk ? 0.01 : 0.001;
    LogDensitySpec spec = gen_log_density(n, p, density, seed);
    ProblemInstance pi;
    pi.id = name;
    pi.problem = make_log_density(spec).problem;
    pi.L_factor = 25.0;
    pi.params = {{"n", std::to_string(n)}, {"p", std::to_string(p)}, {"density", detail::num(density)}};
    pi.source = std::move(spec);
    return pi;
  }
  throw std::invalid_argument("unknown problem preset '" + name + "'");
}

/// Kernel SVM on data loaded from CSV (features..., label).
inline ProblemInstance make_svm_from_csv(const std::string& path, bool skip_header = false,
                                         double gamma_kernel = 10.0, double lambda = 0.1,
                                         double gamma_s = 0.01) {
  CsvData d = load_csv(path, {CsvSchema::svm, skip_header});
  KernelSvmSpec spec;
  spec.points = std::move(d.values);
  spec.labels = *d.labels;
  spec.gamma_kernel = gamma_kernel;
  spec.lambda = lambda;
  spec.gamma_s = gamma_s;
  ProblemInstance pi = detail::from_svm("csv:" + path, spec);
  return pi;
}

/// g mode a preset provides, or nullopt when it adapts to the method.
inline std::optional<GMode> preset_mode(const std::string& name) {
  if (name == "quad-cond100") return std::nullopt;
  if (name.rfind("svm", 0) == 0 || name.rfind("csv:", 0) == 0) return GMode::finite_sum;
  if (name.rfind("logdensity", 0) == 0) return GMode::coordinate;
  throw std::invalid_argument("unknown problem preset '" + name + "'");
}

}  // namespace osplit
