#pragma once

#include <optional>
#include <variant>

#include "osplit/core/problem.hpp"

namespace osplit {

// Metered oracle entry points. Every gradient-type call made by the solvers
// goes through one of these, so tallies are exact by construction.

inline Vector grad_h(const CompositeProblem& p, const Vector& x, OracleTally& tally) {
  require_dim(x, p.dim(), "grad_h");
  Vector out;
  p.h().gradient(x, out);
  ++tally.h_grad_calls;
  require_finite(out, "grad_h");
  return out;
}

/// One basic g-oracle call: the full gradient (full mode), the partial
/// derivative `index` (coordinate mode), or the gradient of component
/// `index` (finite-sum mode).
inline std::variant<double, Vector> g_basic(const CompositeProblem& p, const Vector& x,
                                            std::optional<Index> index, OracleTally& tally) {
  require_dim(x, p.dim(), "g_basic");
  const GOracle& g = p.g();
  switch (mode_of(g)) {
    case GMode::full_gradient: {
      if (index) throw OracleError("g_basic: index supplied in full-gradient mode");
      Vector out;
      std::get<FullGradientG>(g).fn->gradient(x, out);
      ++tally.g_basic_units;
      require_finite(out, "g_basic");
      return out;
    }
    case GMode::coordinate: {
      if (!index) throw OracleError("g_basic: coordinate index required");
      if (*index < 0 || *index >= p.dim()) throw OracleError("g_basic: coordinate index out of range");
      const double d = std::get<CoordinateG>(g).fn->partial(x, *index);
      ++tally.g_basic_units;
      require_finite(d, "g_basic");
      return d;
    }
    case GMode::finite_sum: {
      const auto& fs = *std::get<FiniteSumG>(g).fn;
      if (!index) throw OracleError("g_basic: component index required");
      if (*index < 0 || *index >= fs.components())
        throw OracleError("g_basic: component index out of range");
      Vector out;
      fs.component_gradient(x, *index, out);
      ++tally.g_basic_units;
      require_finite(out, "g_basic");
      return out;
    }
  }
  throw OracleError("g_basic: unknown mode");
}

/// Full gradient of g, charged kappa_g basic units.
inline Vector grad_g_full(const CompositeProblem& p, const Vector& x, OracleTally& tally) {
  require_dim(x, p.dim(), "grad_g_full");
  Vector out;
  function_of(p.g()).gradient(x, out);
  tally.g_basic_units += p.kappa();
  require_finite(out, "grad_g_full");
  return out;
}

/// Full gradient of g for a bare g-oracle (inner solvers see only g).
inline Vector grad_g_full(const GOracle& g, const Vector& x, OracleTally& tally) {
  require_dim(x, dim_of(g), "grad_g_full");
  Vector out;
  function_of(g).gradient(x, out);
  tally.g_basic_units += kappa_g(g);
  require_finite(out, "grad_g_full");
  return out;
}

inline Vector grad_f(const CompositeProblem& p, const Vector& x, OracleTally& tally) {
  Vector gh = grad_h(p, x, tally);
  gh += grad_g_full(p, x, tally);
  return gh;
}

/// f(x) for monitoring; counted in f_value_evals only.
inline double value_f(const CompositeProblem& p, const Vector& x, OracleTally& tally) {
  require_dim(x, p.dim(), "value_f");
  const double v = p.value(x);
  ++tally.f_value_evals;
  require_finite(v, "value_f");
  return v;
}

}  // namespace osplit
