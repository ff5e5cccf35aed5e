#pragma once

#include <vector>

#include "fsstokes/common.hpp"

namespace fsstokes {

/// Points and weights on a reference cell. Triangle rules live on
/// {(xi, eta) : xi, eta >= 0, xi + eta <= 1} (measure 1/2); line rules on
/// [0, 1] (measure 1).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Six-point symmetric rule, exact for polynomials of total degree 4.
const QuadratureRule& triangle_rule();

/// Three-point Gauss-Legendre on [0, 1], exact for degree 5. Only the
/// x-component of the points is used.
const QuadratureRule& line_rule();

/// n-point Gauss-Legendre rule on [0, 1] (Golub-Welsch); used by oracles.
QuadratureRule gauss_legendre(int n);

}  // namespace fsstokes
