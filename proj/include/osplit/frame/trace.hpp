#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "osplit/core/tally.hpp"

namespace osplit {

struct TraceRow {
  std::int64_t iter = 0;
  int stage = 0;
  double f_value = std::numeric_limits<double>::quiet_NaN();
  OracleTally tally;
  double elapsed_s = 0.0;
  double criterion_lhs = std::numeric_limits<double>::quiet_NaN();
  double criterion_rhs = std::numeric_limits<double>::quiet_NaN();
};

/// Collects trace rows; elapsed time is pinned to 0 in deterministic mode so
/// traces of equal runs compare byte for byte.
class TraceRecorder {
 public:
  explicit TraceRecorder(bool deterministic = true, std::int64_t log_every = 1)
      : deterministic_(deterministic), log_every_(log_every), start_(std::chrono::steady_clock::now()) {}

  std::function<void(const TraceRow&)> on_row;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  /// Rows with iter % log_every != 0 are dropped unless forced.
  void record(TraceRow row, bool force = false) {
    if (!force && row.iter % log_every_ != 0) return;
    row.elapsed_s = deterministic_ ? 0.0 : elapsed();
    if (!rows_.empty() && rows_.back().iter == row.iter && rows_.back().stage == row.stage) {
      rows_.back() = row;
    } else {
      rows_.push_back(row);
    }
    if (on_row) on_row(rows_.back());
  }

  const std::vector<TraceRow>& rows() const { return rows_; }
  std::vector<TraceRow>& rows() { return rows_; }
  bool deterministic() const { return deterministic_; }
  std::int64_t log_every() const { return log_every_; }

 private:
  bool deterministic_;
  std::int64_t log_every_;
  std::chrono::steady_clock::time_point start_;
  std::vector<TraceRow> rows_;
};

}  // namespace osplit
