#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace osplit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an oracle produces a non-finite value or is called with
/// arguments that do not fit the problem.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { converged, budget_exhausted };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::converged ? "converged" : "budget_exhausted";
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_dim(const Vector& x, Index n, const char* what) {
  if (x.size() != n)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(n) + ")");
}

/// Throws OracleError naming the first non-finite entry.
inline void require_finite(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw OracleError(std::string(what) + ": non-finite output at index " +
                        std::to_string(i));
  }
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw OracleError(std::string(what) + ": non-finite output");
}

}  // namespace osplit
