#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "osplit/core/types.hpp"

namespace osplit {

enum class InnerStopMode { certified, budgeted };

inline const char* to_string(InnerStopMode m) {
  return m == InnerStopMode::certified ? "certified" : "budgeted";
}

inline InnerStopMode parse_inner_stop_mode(const std::string& s) {
  if (s == "certified") return InnerStopMode::certified;
  if (s == "budgeted") return InnerStopMode::budgeted;
  throw std::invalid_argument("inner stop mode must be 'certified' or 'budgeted', got '" + s + "'");
}

struct SolverConfig {
  double L = 0.0;           // outer prox parameter; <= 0 means L_h
  double mu = -1.0;         // < 0 means the problem's mu
  double epsilon = 1e-6;
  double delta = 0.05;
  double R = 1.0;           // bound on ||x0 - x*||
  InnerStopMode inner_stop = InnerStopMode::certified;
  double C1 = 1.0;
  double c_cert = 1.0;
  std::int64_t inner_cert_period = 0;  // 0: solver default

  static constexpr std::int64_t unlimited = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_outer_iters = unlimited;   // MS iterations over all stages
  std::int64_t max_gmco_iters = 100000;       // per middle-loop call
  std::int64_t max_inner_units = unlimited;   // per inner solve
  std::int64_t max_h_calls = unlimited;       // whole run
  std::int64_t max_g_units = unlimited;       // whole run

  std::uint64_t seed = 0;

  /// Stop as soon as a monitored f(y) is at or below this value.
  std::optional<double> target_value;
  /// Evaluate f at every outer iterate for the trace (metered separately).
  bool record_f_values = true;
  std::int64_t log_every = 1;
  bool deterministic = true;

  void validate() const {
    require(epsilon > 0.0 && std::isfinite(epsilon), "SolverConfig: epsilon must be positive");
    require(delta > 0.0 && delta < 1.0, "SolverConfig: delta must lie in (0,1)");
    require(R > 0.0 && std::isfinite(R), "SolverConfig: R must be positive");
    require(std::isfinite(L), "SolverConfig: L must be finite");
    require(C1 > 0.0 && c_cert > 0.0, "SolverConfig: C1 and c_cert must be positive");
    require(max_outer_iters >= 1 && max_gmco_iters >= 1 && max_inner_units >= 1,
            "SolverConfig: budgets must be >= 1");
    require(log_every >= 1, "SolverConfig: log_every must be >= 1");
  }
};

}  // namespace osplit
