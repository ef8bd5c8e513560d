#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "osplit/core/functions.hpp"
#include "osplit/core/tally.hpp"
#include "osplit/core/types.hpp"

namespace osplit {

/// g is read through full gradients; one call is one basic unit.
struct FullGradientG {
  std::shared_ptr<const SmoothFunction> fn;
  double lipschitz = 0.0;
};

/// g is read one partial derivative at a time.
struct CoordinateG {
  std::shared_ptr<const CoordinateFunction> fn;
};

/// g = (1/m) sum_k g_k is read one component gradient at a time.
struct FiniteSumG {
  std::shared_ptr<const FiniteSumFunction> fn;
};

using GOracle = std::variant<FullGradientG, CoordinateG, FiniteSumG>;

enum class GMode { full_gradient, coordinate, finite_sum };

inline GMode mode_of(const GOracle& g) { return static_cast<GMode>(g.index()); }

inline const char* to_string(GMode m) {
  switch (m) {
    case GMode::full_gradient: return "full";
    case GMode::coordinate: return "coordinate";
    case GMode::finite_sum: return "finite-sum";
  }
  return "?";
}

inline const SmoothFunction& function_of(const GOracle& g) {
  return std::visit([](const auto& o) -> const SmoothFunction& { return *o.fn; }, g);
}

inline Index dim_of(const GOracle& g) { return function_of(g).dim(); }

/// Basic-oracle units needed for one full gradient of g.
inline std::int64_t kappa_g(const GOracle& g) {
  switch (mode_of(g)) {
    case GMode::full_gradient: return 1;
    case GMode::coordinate: return static_cast<std::int64_t>(dim_of(g));
    case GMode::finite_sum: return static_cast<std::int64_t>(std::get<FiniteSumG>(g).fn->components());
  }
  return 1;
}

/// A valid Lipschitz constant of the full gradient of g: L_g itself, the
/// trace bound sum(beta_i), or the component average (1/m) sum L_{g_k}.
inline double g_smoothness_bound(const GOracle& g) {
  switch (mode_of(g)) {
    case GMode::full_gradient: return std::get<FullGradientG>(g).lipschitz;
    case GMode::coordinate: return std::get<CoordinateG>(g).fn->coordinate_lipschitz().sum();
    case GMode::finite_sum: return std::get<FiniteSumG>(g).fn->component_lipschitz().mean();
  }
  return 0.0;
}

/// min_x f(x) = h(x) + g(x).
class CompositeProblem {
 public:
  CompositeProblem(std::shared_ptr<const SmoothFunction> h, double lipschitz_h, GOracle g,
                   double mu, double lipschitz_f, std::string name = "problem")
      : h_(std::move(h)), lh_(lipschitz_h), g_(std::move(g)), mu_(mu), lf_(lipschitz_f),
        name_(std::move(name)) {
    require(h_ != nullptr, "CompositeProblem: h is null");
    require(std::visit([](const auto& o) { return o.fn != nullptr; }, g_), "CompositeProblem: g is null");
    n_ = h_->dim();
    require(n_ >= 1, "CompositeProblem: dimension must be >= 1");
    require(dim_of(g_) == n_, "CompositeProblem: h and g dimensions differ");
    require(lh_ > 0.0 && std::isfinite(lh_), "CompositeProblem: L_h must be positive");
    require(mu_ >= 0.0 && std::isfinite(mu_), "CompositeProblem: mu must be >= 0");
    require(lf_ >= lh_ && std::isfinite(lf_), "CompositeProblem: L_f must be >= L_h");
    switch (mode_of(g_)) {
      case GMode::full_gradient:
        require(std::get<FullGradientG>(g_).lipschitz >= 0.0, "CompositeProblem: L_g must be >= 0");
        break;
      case GMode::coordinate: {
        const Vector& beta = std::get<CoordinateG>(g_).fn->coordinate_lipschitz();
        require(beta.size() == n_, "CompositeProblem: coordinate constants size mismatch");
        require((beta.array() > 0.0).all(), "CompositeProblem: coordinate constants must be positive");
        break;
      }
      case GMode::finite_sum:
        require(std::get<FiniteSumG>(g_).fn->components() >= 1,
                "CompositeProblem: finite sum needs m >= 1");
        break;
    }
  }

  Index dim() const { return n_; }
  const SmoothFunction& h() const { return *h_; }
  std::shared_ptr<const SmoothFunction> h_ptr() const { return h_; }
  /// h as a coordinate-structured function, when it is one.
  std::shared_ptr<const CoordinateFunction> h_coordinate() const {
    return std::dynamic_pointer_cast<const CoordinateFunction>(h_);
  }
  double lipschitz_h() const { return lh_; }
  const GOracle& g() const { return g_; }
  GMode g_mode() const { return mode_of(g_); }
  std::int64_t kappa() const { return kappa_g(g_); }
  double mu() const { return mu_; }
  double lipschitz_f() const { return lf_; }
  const std::string& name() const { return name_; }

  /// Unmetered objective value, for tests and references.
  double value(const Vector& x) const { return h_->value(x) + function_of(g_).value(x); }

 private:
  std::shared_ptr<const SmoothFunction> h_;
  double lh_;
  GOracle g_;
  double mu_;
  double lf_;
  std::string name_;
  Index n_ = 0;
};

}  // namespace osplit
