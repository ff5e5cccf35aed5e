#include "fsstokes/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace fsstokes {

const QuadratureRule& triangle_rule() {
  static const QuadratureRule rule = [] {
    constexpr double a = 0.445948490915964886318329253883;
    constexpr double wa = 0.223381589678011465944806133678;
    constexpr double b = 0.091576213509770743459571463402;
    constexpr double wb = 1.0 / 3.0 - wa;
    QuadratureRule r;
    r.points = {Vec2(a, a), Vec2(1.0 - 2.0 * a, a), Vec2(a, 1.0 - 2.0 * a),
                Vec2(b, b), Vec2(1.0 - 2.0 * b, b), Vec2(b, 1.0 - 2.0 * b)};
    r.weights = {0.5 * wa, 0.5 * wa, 0.5 * wa, 0.5 * wb, 0.5 * wb, 0.5 * wb};
    return r;
  }();
  return rule;
}

const QuadratureRule& line_rule() {
  static const QuadratureRule rule = [] {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    QuadratureRule r;
    r.points = {Vec2(0.5 - d, 0.0), Vec2(0.5, 0.0), Vec2(0.5 + d, 0.0)};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
  }();
  return rule;
}

QuadratureRule gauss_legendre(int n) {
  // Jacobi matrix of the Legendre recurrence on [-1, 1].
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule r;
  for (int k = 0; k < n; ++k) {
    const double node = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    r.points.emplace_back(0.5 * (node + 1.0), 0.0);
    r.weights.push_back(v0 * v0);  // 2 v0^2 on [-1, 1], halved for [0, 1]
  }
  return r;
}

}  // namespace fsstokes
