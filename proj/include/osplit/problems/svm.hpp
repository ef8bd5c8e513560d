#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "osplit/core/problem.hpp"
#include "osplit/core/rng.hpp"

namespace osplit {

/// Huber-style smoothing of max(0, z): value and derivative.
inline std::pair<double, double> smoothed_hinge(double z, double gamma_s) {
  require(gamma_s > 0.0, "smoothed_hinge: gamma_s must be positive");
  if (z <= 0.0) return {0.0, 0.0};
  if (z >= gamma_s) return {z - 0.5 * gamma_s, 1.0};
  return {z * z / (2.0 * gamma_s), z / gamma_s};
}

/// K(a, a') = exp(-gamma ||a - a'||^2) over the rows of `points`, plus 1e-10 I.
inline Matrix rbf_kernel(const Matrix& points, double gamma_kernel) {
  const Index m = points.rows();
  require(m >= 1, "rbf_kernel: need at least one point");
  require(gamma_kernel >= 0.0, "rbf_kernel: gamma must be >= 0");
  Matrix k(m, m);
  for (Index i = 0; i < m; ++i) {
    k(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      const double v = std::exp(-gamma_kernel * (points.row(i) - points.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  k.diagonal().array() += 1e-10;
  return k;
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_lambda_max(const Matrix& a, int iters = 100, double rel_tol = 1e-6) {
  Vector v = Vector::Ones(a.rows()) / std::sqrt(static_cast<double>(a.rows()));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = a * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / nw;
    const bool done = it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next);
    lambda = next;
    if (done) break;
  }
  // the Rayleigh quotient under-estimates; the residual bounds the miss
  const Vector r = a * v - lambda * v;
  return lambda + r.norm();
}

struct KernelSvmSpec {
  Matrix points;  // m x d
  Vector labels;  // in {-1, +1}
  double gamma_kernel = 10.0;
  double lambda = 0.1;
  double gamma_s = 0.01;
};

/// Synthetic two-class data in [0,1]^d whose labels follow a curved boundary
/// with a few flips.
inline KernelSvmSpec gen_svm(Index m, Index d, std::uint64_t seed, double gamma_kernel = 10.0,
                             double lambda = 0.1, double gamma_s = 0.01) {
  require(m >= 1 && d >= 1, "gen_svm: m and d must be >= 1");
  Rng rng(seed);
  KernelSvmSpec s;
  s.points.resize(m, d);
  s.labels.resize(m);
  for (Index k = 0; k < m; ++k) {
    for (Index j = 0; j < d; ++j) s.points(k, j) = rng.uniform();
    const double x0 = s.points(k, 0), x1 = d > 1 ? s.points(k, 1) : 0.5;
    double side = x1 - 0.5 - 0.3 * std::sin(6.0 * x0);
    if (rng.uniform() < 0.05) side = -side;
    s.labels[k] = side >= 0.0 ? 1.0 : -1.0;
  }
  s.gamma_kernel = gamma_kernel;
  s.lambda = lambda;
  s.gamma_s = gamma_s;
  return s;
}

/// h(x) = (lambda/2) <x, K x> over the first m coordinates; the last
/// coordinate (intercept) does not enter h.
class KernelRegularizer final : public SmoothFunction {
 public:
  KernelRegularizer(std::shared_ptr<const Matrix> k, double lambda) : k_(std::move(k)), lambda_(lambda) {}
  Index dim() const override { return k_->rows() + 1; }
  double value(const Vector& x) const override {
    const auto c = x.head(k_->rows());
    return 0.5 * lambda_ * c.dot(*k_ * c);
  }
  void gradient(const Vector& x, Vector& out) const override {
    const Index m = k_->rows();
    out.resize(m + 1);
    out.head(m).noalias() = lambda_ * (*k_ * x.head(m));
    out[m] = 0.0;
  }
  using SmoothFunction::gradient;

 private:
  std::shared_ptr<const Matrix> k_;
  double lambda_;
};

/// g(x) = (1/m) sum_k l(1 - b_k (x_int + (K c)_k)) with l the smoothed hinge.
class SmoothedHingeSum final : public FiniteSumFunction {
 public:
  SmoothedHingeSum(std::shared_ptr<const Matrix> k, Vector labels, double gamma_s)
      : k_(std::move(k)), b_(std::move(labels)), gamma_s_(gamma_s) {
    require(b_.size() == k_->rows(), "SmoothedHingeSum: label count mismatch");
    lip_.resize(k_->rows());
    for (Index k = 0; k < k_->rows(); ++k) lip_[k] = (k_->row(k).squaredNorm() + 1.0) / gamma_s_;
  }

  Index dim() const override { return k_->rows() + 1; }
  Index components() const override { return k_->rows(); }

  double margin(const Vector& x, Index k) const {
    const Index m = k_->rows();
    return 1.0 - b_[k] * (x[m] + k_->row(k).dot(x.head(m)));
  }

  double component_value(const Vector& x, Index k) const override {
    return smoothed_hinge(margin(x, k), gamma_s_).first;
  }
  void component_gradient(const Vector& x, Index k, Vector& out) const override {
    const Index m = k_->rows();
    const double d = -b_[k] * smoothed_hinge(margin(x, k), gamma_s_).second;
    out.resize(m + 1);
    out.head(m) = d * k_->row(k).transpose();
    out[m] = d;
  }
  const Vector& component_lipschitz() const override { return lip_; }

  void gradient(const Vector& x, Vector& out) const override {
    const Index m = k_->rows();
    const Vector kx = *k_ * x.head(m);
    Vector w(m);
    for (Index k = 0; k < m; ++k)
      w[k] = -b_[k] * smoothed_hinge(1.0 - b_[k] * (x[m] + kx[k]), gamma_s_).second;
    out.resize(m + 1);
    out.head(m).noalias() = k_->transpose() * w / static_cast<double>(m);
    out[m] = w.sum() / static_cast<double>(m);
  }
  using SmoothFunction::gradient;

 private:
  std::shared_ptr<const Matrix> k_;
  Vector b_;
  double gamma_s_;
  Vector lip_;
};

struct KernelSvmInstance {
  std::shared_ptr<const CompositeProblem> problem;
  std::shared_ptr<const Matrix> K;
  double lambda_max_K = 0.0;
};

inline KernelSvmInstance make_kernel_svm(const KernelSvmSpec& s) {
  const Index m = s.points.rows();
  require(m >= 1 && s.labels.size() == m, "make_kernel_svm: need one label per point");
  for (Index k = 0; k < m; ++k)
    require(s.labels[k] == 1.0 || s.labels[k] == -1.0, "make_kernel_svm: labels must be -1 or +1");
  require(s.lambda > 0.0 && s.gamma_s > 0.0, "make_kernel_svm: lambda and gamma_s must be positive");

  KernelSvmInstance inst;
  inst.K = std::make_shared<const Matrix>(rbf_kernel(s.points, s.gamma_kernel));
  inst.lambda_max_K = power_lambda_max(*inst.K);
  const double lh = s.lambda * inst.lambda_max_K;
  auto h = std::make_shared<KernelRegularizer>(inst.K, s.lambda);
  auto g = std::make_shared<SmoothedHingeSum>(inst.K, s.labels, s.gamma_s);
  const double lf = lh + g->component_lipschitz().mean();
  inst.problem = std::make_shared<CompositeProblem>(h, lh, FiniteSumG{g}, 0.0, lf, "kernel-svm");
  return inst;
}

}  // namespace osplit
