#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "osplit/core/problem.hpp"
#include "osplit/core/rng.hpp"

namespace osplit {

struct QuadraticSpec {
  Index n = 50;
  double L_h = 1.0;
  double L_g = 100.0;
  double mu = 1e-3;           // exact lambda_min(H_h + H_g); 0 gives a convex instance
  GMode split = GMode::full_gradient;
  Index m = 10;               // components in finite-sum mode
  double spread = 1e-3;       // smallest/largest eigenvalue of each part on the complement of the null direction
  bool zero_minimizer = false;  // b = 0, so x* = 0 and f* = 0
};

/// Problem plus closed-form ground truth.
struct QuadraticInstance {
  std::shared_ptr<const CompositeProblem> problem;
  Matrix H_h;  // Hessian of h (linear term of h is -b)
  Matrix H_g;
  Vector b;
  Vector x_star;
  double f_star = 0.0;

  double gap(const Vector& x) const { return problem->value(x) - f_star; }
};

namespace detail {

inline Matrix random_orthogonal(Rng& rng, Index n) {
  Matrix a = Matrix::NullaryExpr(n, n, [&] { return rng.normal(); });
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  // fix column signs so the draw does not depend on the QR sign convention
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

inline Vector log_spaced(Index k, double lo, double hi) {
  Vector s(k);
  if (hi == 0.0) return Vector::Zero(k);
  for (Index i = 0; i < k; ++i)
    s[i] = k == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(k - 1));
  return s;
}

/// Rank-one split of H = sum_j s_j v_j v_j^T into m blocks with
/// (1/m) sum_k B_k^T B_k = H; eigen-terms go round-robin.
inline std::vector<Matrix> split_blocks(const Matrix& v, const Vector& s, Index m) {
  const Index n = v.rows();
  std::vector<std::vector<Index>> owned(static_cast<std::size_t>(m));
  for (Index j = 0; j < s.size(); ++j) owned[static_cast<std::size_t>(j % m)].push_back(j);
  std::vector<Matrix> blocks;
  for (Index k = 0; k < m; ++k) {
    const auto& js = owned[static_cast<std::size_t>(k)];
    Matrix b = Matrix::Zero(std::max<Index>(1, static_cast<Index>(js.size())), n);
    for (std::size_t r = 0; r < js.size(); ++r)
      b.row(static_cast<Index>(r)) = std::sqrt(static_cast<double>(m) * s[js[r]]) * v.col(js[r]).transpose();
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace detail

/// Builds h = 0.5 x'H_h x - b'x and g = 0.5 x'H_g x in the requested split.
/// Constants come from eigensolves unless given.
inline QuadraticInstance make_quadratic_from(const Matrix& H_h, const Matrix& H_g, const Vector& b,
                                             GMode split = GMode::full_gradient, Index m = 1,
                                             std::optional<double> L_h = std::nullopt,
                                             std::optional<double> L_g = std::nullopt,
                                             std::optional<double> mu = std::nullopt) {
  const Index n = H_h.rows();
  require(n >= 1 && H_h.cols() == n && H_g.rows() == n && H_g.cols() == n && b.size() == n,
          "make_quadratic: shape mismatch");
  require((H_h - H_h.transpose()).norm() <= 1e-12 * (1.0 + H_h.norm()) &&
              (H_g - H_g.transpose()).norm() <= 1e-12 * (1.0 + H_g.norm()),
          "make_quadratic: Hessians must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eh(H_h, Eigen::EigenvaluesOnly), eg(H_g), ef(H_h + H_g, Eigen::EigenvaluesOnly);
  const double tol = -1e-10 * (1.0 + ef.eigenvalues().maxCoeff());
  require(eh.eigenvalues().minCoeff() >= tol && eg.eigenvalues().minCoeff() >= tol,
          "make_quadratic: Hessians must be PSD");

  QuadraticInstance q;
  q.H_h = H_h;
  q.H_g = H_g;
  q.b = b;
  const double lh = L_h.value_or(eh.eigenvalues().maxCoeff());
  const double lg = L_g.value_or(std::max(0.0, eg.eigenvalues().maxCoeff()));
  const double muv = mu.value_or(std::max(0.0, ef.eigenvalues().minCoeff()));
  const double lf = std::max(ef.eigenvalues().maxCoeff(), lh);

  auto h = std::make_shared<QuadraticFunction>(H_h, -b);
  GOracle g;
  switch (split) {
    case GMode::full_gradient:
      g = FullGradientG{std::make_shared<QuadraticFunction>(H_g), lg};
      break;
    case GMode::coordinate:
      g = CoordinateG{std::make_shared<QuadraticFunction>(H_g)};
      break;
    case GMode::finite_sum: {
      require(m >= 1, "make_quadratic: m must be >= 1");
      Vector s = eg.eigenvalues().cwiseMax(0.0);
      g = FiniteSumG{std::make_shared<LeastSquaresSum>(detail::split_blocks(eg.eigenvectors(), s, m))};
      break;
    }
  }
  q.problem = std::make_shared<CompositeProblem>(h, lh, g, muv, lf, "quadratic");

  const Matrix H = H_h + H_g;
  if (muv > 0.0 || b.isZero(0.0)) {
    q.x_star = b.isZero(0.0) ? Vector::Zero(n) : Vector(H.ldlt().solve(b));
  } else {
    // singular H: minimum-norm solution (b must lie in the range)
    q.x_star = H.completeOrthogonalDecomposition().solve(b);
  }
  q.f_star = -0.5 * b.dot(q.x_star);
  return q;
}

/// Random instance with exact L_h, L_g and mu. A shared random direction u
/// is a null vector of both parts on the complement spectrum, and h gets mu I
/// on top, so lambda_min(H_h + H_g) = mu with eigenvector u.
inline QuadraticInstance make_quadratic(const QuadraticSpec& spec, Rng& rng) {
  const Index n = spec.n;
  require(n >= 2, "make_quadratic: n must be >= 2");
  require(spec.L_h > spec.mu && spec.mu >= 0.0, "make_quadratic: need 0 <= mu < L_h");
  require(spec.L_g >= 0.0, "make_quadratic: L_g must be >= 0");
  require(spec.spread > 0.0 && spec.spread <= 1.0, "make_quadratic: spread must lie in (0,1]");

  Vector u = rng.normal_vector(n);
  u.normalize();
  // orthonormal basis of the complement of u
  const Matrix proj = Matrix::Identity(n, n) - u * u.transpose();
  auto basis = [&](Rng& r) {
    const Matrix q = detail::random_orthogonal(r, n);
    Eigen::HouseholderQR<Matrix> qr(proj * q.leftCols(n - 1));
    return Matrix(Matrix(qr.householderQ()).leftCols(n - 1));
  };
  const Matrix wh = basis(rng), wg = basis(rng);
  const double top_h = spec.L_h - spec.mu;
  const Vector sh = detail::log_spaced(n - 1, spec.spread * top_h, top_h);
  const Vector sg = detail::log_spaced(n - 1, spec.spread * spec.L_g, spec.L_g);
  Matrix H_h = wh * sh.asDiagonal() * wh.transpose() + spec.mu * Matrix::Identity(n, n);
  Matrix H_g = wg * sg.asDiagonal() * wg.transpose();
  H_h = 0.5 * (H_h + H_h.transpose());
  H_g = 0.5 * (H_g + H_g.transpose());

  Vector b = spec.zero_minimizer ? Vector::Zero(n) : rng.normal_vector(n);
  if (spec.mu == 0.0 && !spec.zero_minimizer) b = proj * b;  // keep b in the range
  return make_quadratic_from(H_h, H_g, b, spec.split, spec.m, spec.L_h, spec.L_g, spec.mu);
}

}  // namespace osplit
