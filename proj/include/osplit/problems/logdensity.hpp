#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "osplit/core/csr_matrix.hpp"
#include "osplit/core/problem.hpp"
#include "osplit/core/rng.hpp"

namespace osplit {

namespace detail {

/// log sum exp(w) and softmax(w), shifted by max(w).
inline double logsumexp_softmax(const Vector& w, Vector& soft) {
  const double mx = w.maxCoeff();
  soft = (w.array() - mx).exp();
  const double s = soft.sum();
  soft /= s;
  return mx + std::log(s);
}

}  // namespace detail

/// h(x) = log sum_k exp(<A_k, x>) and A^T softmax(Ax).
inline std::pair<double, Vector> logsumexp_grad(const CsrMatrix& a, const Vector& x) {
  require(a.rows() >= 1, "logsumexp_grad: A needs at least one row");
  const Vector w = a.multiply(x);
  Vector soft;
  const double v = detail::logsumexp_softmax(w, soft);
  return {v, a.multiply_transpose(soft)};
}

/// log sum_k exp(<A_k, x>) + <c, x> as a coordinate function with image Ax.
class LogSumExp final : public CoordinateFunction {
 public:
  explicit LogSumExp(std::shared_ptr<const CsrMatrix> a, Vector linear = {})
      : a_(std::move(a)), c_(std::move(linear)) {
    require(a_->rows() >= 1 && a_->cols() >= 1, "LogSumExp: A must be nonempty");
    if (c_.size() == 0) c_ = Vector::Zero(a_->cols());
    require(c_.size() == a_->cols(), "LogSumExp: linear term size mismatch");
    beta_.resize(a_->cols());
    for (Index j = 0; j < a_->cols(); ++j) {
      double b = 0.0;
      for (double v : a_->col(j).values) b = std::max(b, v * v);
      beta_[j] = b;
    }
  }

  const CsrMatrix& matrix() const { return *a_; }

  Index dim() const override { return a_->cols(); }
  double value(const Vector& x) const override {
    Vector soft;
    return detail::logsumexp_softmax(a_->multiply(x), soft) + c_.dot(x);
  }
  void gradient(const Vector& x, Vector& out) const override {
    Vector soft;
    detail::logsumexp_softmax(a_->multiply(x), soft);
    a_->multiply_transpose(soft, out);
    out += c_;
  }
  using SmoothFunction::gradient;

  const Vector& coordinate_lipschitz() const override { return beta_; }
  Index image_dim() const override { return a_->rows(); }
  void apply_image(const Vector& x, Vector& w) const override { a_->multiply(x, w); }
  void add_image_column(Index i, double t, Vector& w) const override {
    const auto c = a_->col(i);
    for (Index k = 0; k < c.size(); ++k) w[c.indices[k]] += t * c.values[k];
  }
  double partial_from_images(Index i, double, double a, const Vector& wu, double b,
                             const Vector& wv) const override {
    Vector soft;
    detail::logsumexp_softmax(combine(a, wu, b, wv), soft);
    const auto c = a_->col(i);
    double s = 0.0;
    for (Index k = 0; k < c.size(); ++k) s += c.values[k] * soft[c.indices[k]];
    return s + c_[i];
  }
  void gradient_from_images(const Vector&, double a, const Vector& wu, double b, const Vector& wv,
                            Vector& out) const override {
    Vector soft;
    detail::logsumexp_softmax(combine(a, wu, b, wv), soft);
    a_->multiply_transpose(soft, out);
    out += c_;
  }

 private:
  static Vector combine(double a, const Vector& wu, double b, const Vector& wv) {
    if (b == 0.0) return a * wu;
    return a * wu + b * wv;
  }

  std::shared_ptr<const CsrMatrix> a_;
  Vector c_;
  Vector beta_;
};

struct LogDensitySpec {
  CsrMatrix A;  // p x n
  Matrix G2;    // n x n
  Vector linear;  // optional <c, x> term of h; empty means none
};

/// Sparse A with U(-1,1) entries (every row has at least one), and
/// G^2 = sum_i lambda_i e_i e_i^T with lambda on the simplex, e_i ~ U(1,2)^n.
inline LogDensitySpec gen_log_density(Index n, Index p, double density, std::uint64_t seed) {
  require(n >= 1 && p >= 1, "gen_log_density: n and p must be >= 1");
  require(density > 0.0 && density <= 1.0, "gen_log_density: density must lie in (0,1]");
  Rng rng(seed);
  std::vector<Eigen::Triplet<double>> t;
  for (Index k = 0; k < p; ++k) {
    std::vector<Eigen::Triplet<double>> row;
    while (row.empty()) {
      for (Index j = 0; j < n; ++j)
        if (rng.uniform() < density) row.emplace_back(k, j, rng.uniform(-1.0, 1.0));
    }
    t.insert(t.end(), row.begin(), row.end());
  }
  LogDensitySpec s;
  s.A = CsrMatrix::from_triplets(p, n, std::move(t));

  Vector lambda(n);
  for (Index i = 0; i < n; ++i) {
    double u = 0.0;
    while (u == 0.0) u = rng.uniform();
    lambda[i] = -std::log(u);
  }
  lambda /= lambda.sum();
  s.G2 = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Vector e = rng.uniform_vector(n, 1.0, 2.0);
    s.G2.noalias() += lambda[i] * e * e.transpose();
  }
  s.G2 = 0.5 * (s.G2 + s.G2.transpose());
  return s;
}

struct LogDensityInstance {
  std::shared_ptr<const CompositeProblem> problem;
  std::shared_ptr<const LogSumExp> h;
  std::shared_ptr<const QuadraticFunction> g;
  double column_bound = 0.0;  // max_j ||A^<j>||^2
  double row_bound = 0.0;     // max_k ||A_k||^2
};

/// h = logsumexp(Ax) (+ <c,x>), g = 0.5 x^T G^2 x in coordinate mode.
inline LogDensityInstance make_log_density(const LogDensitySpec& s) {
  const Index n = s.A.cols();
  require(s.G2.rows() == n && s.G2.cols() == n, "make_log_density: G2 shape mismatch");
  LogDensityInstance inst;
  for (Index j = 0; j < n; ++j) {
    double c = 0.0;
    for (double v : s.A.col(j).values) c += v * v;
    inst.column_bound = std::max(inst.column_bound, c);
  }
  for (Index k = 0; k < s.A.rows(); ++k) {
    double r = 0.0;
    for (double v : s.A.row(k).values) r += v * v;
    inst.row_bound = std::max(inst.row_bound, r);
  }
  const double lh = std::max(inst.column_bound, inst.row_bound);
  require(lh > 0.0, "make_log_density: A is zero");

  inst.h = std::make_shared<LogSumExp>(std::make_shared<const CsrMatrix>(s.A), s.linear);
  inst.g = std::make_shared<QuadraticFunction>(s.G2);
  require((inst.g->coordinate_lipschitz().array() > 0.0).all(),
          "make_log_density: G2 needs a positive diagonal");
  Eigen::SelfAdjointEigenSolver<Matrix> eg(s.G2, Eigen::EigenvaluesOnly);
  const double mu = std::max(0.0, eg.eigenvalues().minCoeff());
  const double lf = lh + eg.eigenvalues().maxCoeff();
  inst.problem = std::make_shared<CompositeProblem>(inst.h, lh, CoordinateG{inst.g}, mu, lf, "log-density");
  return inst;
}

}  // namespace osplit
