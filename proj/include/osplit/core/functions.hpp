#pragma once

#include <memory>
#include <vector>

#include "osplit/core/types.hpp"

namespace osplit {

/// A differentiable function R^n -> R. Implementations are immutable and may
/// be shared across concurrent solves.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual void gradient(const Vector& x, Vector& out) const = 0;

  Vector gradient(const Vector& x) const {
    Vector g;
    gradient(x, g);
    return g;
  }
};

/// A function with coordinate-wise access, structured as G(Mx) for a linear
/// map M ("image"). Coordinate methods keep images of their iterates and
/// refresh them one column at a time, so a partial derivative never needs a
/// full pass over x.
class CoordinateFunction : public SmoothFunction {
 public:
  /// beta_i: Lipschitz constant of the i-th partial along e_i.
  virtual const Vector& coordinate_lipschitz() const = 0;

  virtual Index image_dim() const = 0;
  /// w = M x
  virtual void apply_image(const Vector& x, Vector& w) const = 0;
  /// w += t * M e_i
  virtual void add_image_column(Index i, double t, Vector& w) const = 0;

  /// i-th partial at the point x whose image is a*wu + b*wv; xi is x_i.
  virtual double partial_from_images(Index i, double xi, double a, const Vector& wu,
                                     double b, const Vector& wv) const = 0;
  /// Full gradient at x whose image is a*wu + b*wv.
  virtual void gradient_from_images(const Vector& x, double a, const Vector& wu, double b,
                                    const Vector& wv, Vector& out) const = 0;

  virtual double partial(const Vector& x, Index i) const {
    Vector w;
    apply_image(x, w);
    return partial_from_images(i, x[i], 1.0, w, 0.0, w);
  }
};

/// g(x) = (1/m) sum_k g_k(x) with per-component gradients.
class FiniteSumFunction : public SmoothFunction {
 public:
  virtual Index components() const = 0;
  virtual double component_value(const Vector& x, Index k) const = 0;
  virtual void component_gradient(const Vector& x, Index k, Vector& out) const = 0;
  /// L_{g_k} for each component.
  virtual const Vector& component_lipschitz() const = 0;

  double value(const Vector& x) const override {
    double s = 0.0;
    for (Index k = 0; k < components(); ++k) s += component_value(x, k);
    return s / static_cast<double>(components());
  }

  void gradient(const Vector& x, Vector& out) const override {
    out.setZero(dim());
    Vector gk;
    for (Index k = 0; k < components(); ++k) {
      component_gradient(x, k, gk);
      out += gk;
    }
    out /= static_cast<double>(components());
  }
  using SmoothFunction::gradient;
};

/// 0.5 x^T H x + c^T x with dense symmetric H. The image is Hx.
class QuadraticFunction final : public CoordinateFunction {
 public:
  QuadraticFunction(Matrix hessian, Vector linear)
      : h_(std::move(hessian)), c_(std::move(linear)), beta_(h_.diagonal()) {
    require(h_.rows() == h_.cols(), "QuadraticFunction: Hessian must be square");
    require(c_.size() == h_.rows(), "QuadraticFunction: linear term size mismatch");
    require(h_.rows() >= 1, "QuadraticFunction: dimension must be >= 1");
  }
  explicit QuadraticFunction(Matrix hessian)
      : QuadraticFunction(hessian, Vector::Zero(hessian.rows())) {}

  const Matrix& hessian() const { return h_; }
  const Vector& linear() const { return c_; }

  Index dim() const override { return h_.rows(); }
  double value(const Vector& x) const override { return 0.5 * x.dot(h_ * x) + c_.dot(x); }
  void gradient(const Vector& x, Vector& out) const override { out.noalias() = h_ * x + c_; }
  using SmoothFunction::gradient;

  const Vector& coordinate_lipschitz() const override { return beta_; }
  Index image_dim() const override { return h_.rows(); }
  void apply_image(const Vector& x, Vector& w) const override { w.noalias() = h_ * x; }
  void add_image_column(Index i, double t, Vector& w) const override { w += t * h_.col(i); }
  double partial_from_images(Index i, double, double a, const Vector& wu, double b,
                             const Vector& wv) const override {
    return a * wu[i] + b * wv[i] + c_[i];
  }
  void gradient_from_images(const Vector&, double a, const Vector& wu, double b, const Vector& wv,
                            Vector& out) const override {
    out = a * wu + b * wv + c_;
  }
  double partial(const Vector& x, Index i) const override { return h_.row(i).dot(x) + c_[i]; }

 private:
  Matrix h_;
  Vector c_;
  Vector beta_;
};

/// The zero function on R^n.
class ZeroFunction final : public CoordinateFunction {
 public:
  explicit ZeroFunction(Index n) : n_(n), beta_(Vector::Zero(n)) {
    require(n >= 1, "ZeroFunction: dimension must be >= 1");
  }
  Index dim() const override { return n_; }
  double value(const Vector&) const override { return 0.0; }
  void gradient(const Vector&, Vector& out) const override { out.setZero(n_); }
  using SmoothFunction::gradient;
  const Vector& coordinate_lipschitz() const override { return beta_; }
  Index image_dim() const override { return 0; }
  void apply_image(const Vector&, Vector& w) const override { w.resize(0); }
  void add_image_column(Index, double, Vector&) const override {}
  double partial_from_images(Index, double, double, const Vector&, double,
                             const Vector&) const override {
    return 0.0;
  }
  void gradient_from_images(const Vector&, double, const Vector&, double, const Vector&,
                            Vector& out) const override {
    out.setZero(n_);
  }

 private:
  Index n_;
  Vector beta_;
};

/// g(x) = (1/m) sum_k 0.5 ||B_k x||^2.
class LeastSquaresSum final : public FiniteSumFunction {
 public:
  explicit LeastSquaresSum(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
    require(!blocks_.empty(), "LeastSquaresSum: need at least one component");
    n_ = blocks_.front().cols();
    require(n_ >= 1, "LeastSquaresSum: dimension must be >= 1");
    lip_.resize(static_cast<Index>(blocks_.size()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      require(blocks_[k].cols() == n_, "LeastSquaresSum: inconsistent block widths");
      const Matrix gram = blocks_[k].transpose() * blocks_[k];
      lip_[static_cast<Index>(k)] =
          Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    }
  }

  const Matrix& block(Index k) const { return blocks_[static_cast<std::size_t>(k)]; }

  Index dim() const override { return n_; }
  Index components() const override { return static_cast<Index>(blocks_.size()); }
  double component_value(const Vector& x, Index k) const override {
    return 0.5 * (block(k) * x).squaredNorm();
  }
  void component_gradient(const Vector& x, Index k, Vector& out) const override {
    out.noalias() = block(k).transpose() * (block(k) * x);
  }
  const Vector& component_lipschitz() const override { return lip_; }

 private:
  std::vector<Matrix> blocks_;
  Index n_ = 0;
  Vector lip_;
};

}  // namespace osplit
