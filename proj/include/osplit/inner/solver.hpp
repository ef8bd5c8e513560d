#pragma once

#include <functional>
#include <string>

#include "osplit/inner/acdm.hpp"
#include "osplit/inner/apg.hpp"
#include "osplit/inner/katyusha.hpp"

namespace osplit {

using InnerSolver = std::function<InnerReport(const InnerProblem&, const Vector& start,
                                              const StopRule&, Rng&, OracleTally&)>;

enum class InnerKind { apg, acdm, katyusha };

inline const char* to_string(InnerKind k) {
  switch (k) {
    case InnerKind::apg: return "apg";
    case InnerKind::acdm: return "acdm";
    case InnerKind::katyusha: return "katyusha";
  }
  return "?";
}

inline InnerKind parse_inner_kind(const std::string& s) {
  if (s == "apg") return InnerKind::apg;
  if (s == "acdm") return InnerKind::acdm;
  if (s == "katyusha") return InnerKind::katyusha;
  throw std::invalid_argument("unknown inner solver '" + s + "'");
}

/// g mode each inner solver needs (apg accepts any).
inline bool inner_supports(InnerKind k, GMode m) {
  switch (k) {
    case InnerKind::apg: return true;
    case InnerKind::acdm: return m == GMode::coordinate;
    case InnerKind::katyusha: return m == GMode::finite_sum;
  }
  return false;
}

inline InnerSolver make_inner_solver(InnerKind kind, InnerOptions opt = {}) {
  switch (kind) {
    case InnerKind::apg:
      return [opt](const InnerProblem& p, const Vector& s, const StopRule& r, Rng& g, OracleTally& t) {
        return solve_apg(p, s, r, g, t, opt);
      };
    case InnerKind::acdm:
      return [opt](const InnerProblem& p, const Vector& s, const StopRule& r, Rng& g, OracleTally& t) {
        return solve_acdm(p, s, r, g, t, opt);
      };
    case InnerKind::katyusha:
      return [opt](const InnerProblem& p, const Vector& s, const StopRule& r, Rng& g, OracleTally& t) {
        return solve_katyusha(p, s, r, g, t, opt);
      };
  }
  throw std::invalid_argument("make_inner_solver: unknown kind");
}

/// Exact minimizer of phi for a quadratic g, used as an oracle in tests of
/// the outer loops. Charges nothing.
inline InnerSolver make_exact_quadratic_solver(const Matrix& g_hessian, const Vector& g_linear) {
  return [g_hessian, g_linear](const InnerProblem& p, const Vector&, const StopRule&, Rng&,
                               OracleTally&) {
    const Index n = p.dim();
    const Matrix a = g_hessian + p.alpha * Matrix::Identity(n, n);
    InnerReport rep;
    rep.v_hat = a.ldlt().solve(-(p.beta + g_linear));
    rep.iterations = 1;
    rep.certified_gap_bound = 0.0;
    return rep;
  };
}

}  // namespace osplit
