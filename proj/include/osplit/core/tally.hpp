#pragma once

#include <cstdint>

namespace osplit {

/// Oracle-call counters for one solve. Every field only grows.
///
/// h_grad_calls and g_basic_units are the complexity-bearing counts. Function
/// values used for monitoring are kept in f_value_evals and never mixed in.
/// h_partial_calls is used only by baselines that read h coordinate-wise.
struct OracleTally {
  std::int64_t h_grad_calls = 0;
  std::int64_t g_basic_units = 0;
  std::int64_t f_value_evals = 0;
  std::int64_t criterion_checks = 0;
  std::int64_t h_partial_calls = 0;

  OracleTally& operator+=(const OracleTally& o) {
    h_grad_calls += o.h_grad_calls;
    g_basic_units += o.g_basic_units;
    f_value_evals += o.f_value_evals;
    criterion_checks += o.criterion_checks;
    h_partial_calls += o.h_partial_calls;
    return *this;
  }
  friend OracleTally operator+(OracleTally a, const OracleTally& b) { return a += b; }
  friend OracleTally operator-(OracleTally a, const OracleTally& b) {
    a.h_grad_calls -= b.h_grad_calls;
    a.g_basic_units -= b.g_basic_units;
    a.f_value_evals -= b.f_value_evals;
    a.criterion_checks -= b.criterion_checks;
    a.h_partial_calls -= b.h_partial_calls;
    return a;
  }
  bool operator==(const OracleTally&) const = default;

  /// True when no field of `later` is below the matching field here.
  bool precedes(const OracleTally& later) const {
    return h_grad_calls <= later.h_grad_calls && g_basic_units <= later.g_basic_units &&
           f_value_evals <= later.f_value_evals && criterion_checks <= later.criterion_checks &&
           h_partial_calls <= later.h_partial_calls;
  }
};

/// Tallies split by where in the three-loop scheme the calls were made.
struct PhaseTallies {
  OracleTally outer;      // outer-loop gradients of f and monitoring values
  OracleTally gmco;       // middle-loop linearizations of h
  OracleTally inner;      // inner solver work on g (including certificates)
  OracleTally criterion;  // exit checks of the middle loop

  OracleTally total() const { return outer + gmco + inner + criterion; }
  bool operator==(const PhaseTallies&) const = default;
};

}  // namespace osplit
