#include "fsstokes/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "fsstokes/quadrature.hpp"

namespace fsstokes {

namespace {

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Basis tables at the points of triangle_rule(), shared by all cells.
struct VolumeTables {
  std::vector<Eigen::Matrix<double, 6, 1>> p2;
  std::vector<Eigen::Matrix<double, 6, 2>> p2_grad;
  std::vector<Eigen::Vector3d> p1;
};

const VolumeTables& volume_tables() {
  static const VolumeTables tables = [] {
    VolumeTables t;
    for (const Vec2& pt : triangle_rule().points) {
      t.p2.push_back(p2_basis(pt));
      t.p2_grad.push_back(p2_reference_gradients(pt));
      t.p1.push_back(p1_basis(pt));
    }
    return t;
  }();
  return tables;
}

std::array<int, 6> cell_nodes6(const FunctionSpace& V, std::size_t cell) {
  std::array<int, 6> n{};
  for (int k = 0; k < 6; ++k) {
    n[k] = V.node(cell, k);
  }
  return n;
}

Eigen::Matrix2d symmetric_gradient(const Eigen::Matrix<double, 6, 2>& grad,
                                   const std::array<int, 6>& nodes, const Eigen::VectorXd& u) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();  // G(c, d) = d u_c / d x_d
  for (int a = 0; a < 6; ++a) {
    const double ux = u[2 * nodes[a]];
    const double uz = u[2 * nodes[a] + 1];
    G(0, 0) += ux * grad(a, 0);
    G(0, 1) += ux * grad(a, 1);
    G(1, 0) += uz * grad(a, 0);
    G(1, 1) += uz * grad(a, 1);
  }
  return 0.5 * (G + G.transpose());
}

}  // namespace

FunctionSpace velocity_space(const VolumeMesh& mesh) {
  FunctionSpace V;
  V.kind = SpaceKind::velocity_p2;
  V.components = 2;
  V.nodes_per_cell = 6;
  const int nv = static_cast<int>(mesh.num_vertices());
  V.num_nodes = mesh.num_vertices() + mesh.num_edges();
  V.cell_nodes.reserve(6 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      V.cell_nodes.push_back(mesh.triangles[t][k]);
    }
    for (int k = 0; k < 3; ++k) {
      V.cell_nodes.push_back(nv + mesh.triangle_edges[t][k]);
    }
  }
  for (const BoundaryFacet& f : mesh.facets) {
    auto& nodes = V.boundary_nodes[static_cast<int>(f.marker)];
    nodes.push_back(f.vertices[0]);
    nodes.push_back(f.vertices[1]);
    nodes.push_back(nv + f.edge);
  }
  for (auto& nodes : V.boundary_nodes) {
    sort_unique(nodes);
  }
  return V;
}

FunctionSpace pressure_space(const VolumeMesh& mesh) {
  FunctionSpace Q;
  Q.kind = SpaceKind::pressure_p1;
  Q.components = 1;
  Q.nodes_per_cell = 3;
  Q.num_nodes = mesh.num_vertices();
  Q.cell_nodes.reserve(3 * mesh.num_triangles());
  for (const auto& tri : mesh.triangles) {
    Q.cell_nodes.insert(Q.cell_nodes.end(), tri.begin(), tri.end());
  }
  for (const BoundaryFacet& f : mesh.facets) {
    auto& nodes = Q.boundary_nodes[static_cast<int>(f.marker)];
    nodes.push_back(f.vertices[0]);
    nodes.push_back(f.vertices[1]);
  }
  for (auto& nodes : Q.boundary_nodes) {
    sort_unique(nodes);
  }
  return Q;
}

FunctionSpace surface_space(const SurfaceGrid& grid) {
  FunctionSpace W;
  W.kind = SpaceKind::surface_p1;
  W.components = 1;
  W.nodes_per_cell = 2;
  W.num_nodes = grid.num_nodes();
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    W.cell_nodes.push_back(static_cast<int>(c));
    W.cell_nodes.push_back(static_cast<int>(c + 1));
  }
  W.boundary_nodes[static_cast<int>(BoundaryMarker::lateral)] = {
      0, static_cast<int>(grid.num_nodes()) - 1};
  return W;
}

Eigen::Matrix<double, 6, 1> p2_basis(const Vec2& ref) {
  const double l0 = 1.0 - ref.x() - ref.y();
  const double l1 = ref.x();
  const double l2 = ref.y();
  Eigen::Matrix<double, 6, 1> n;
  n << l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0), 4.0 * l0 * l1,
      4.0 * l1 * l2, 4.0 * l2 * l0;
  return n;
}

Eigen::Matrix<double, 6, 2> p2_reference_gradients(const Vec2& ref) {
  const double l0 = 1.0 - ref.x() - ref.y();
  const double l1 = ref.x();
  const double l2 = ref.y();
  const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
  Eigen::Matrix<double, 6, 2> g;
  g.row(0) = (4.0 * l0 - 1.0) * g0;
  g.row(1) = (4.0 * l1 - 1.0) * g1;
  g.row(2) = (4.0 * l2 - 1.0) * g2;
  g.row(3) = 4.0 * (l1 * g0 + l0 * g1);
  g.row(4) = 4.0 * (l2 * g1 + l1 * g2);
  g.row(5) = 4.0 * (l0 * g2 + l2 * g0);
  return g;
}

Eigen::Vector3d p1_basis(const Vec2& ref) {
  return Eigen::Vector3d(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
}

Eigen::Vector3d p2_line_basis(double xi) {
  return Eigen::Vector3d((1.0 - xi) * (1.0 - 2.0 * xi), xi * (2.0 * xi - 1.0),
                         4.0 * xi * (1.0 - xi));
}

CellFrame cell_frame(const VolumeMesh& mesh, std::size_t cell) {
  const auto& tri = mesh.triangles[cell];
  CellFrame f;
  f.origin = mesh.vertices[tri[0]];
  f.jacobian.col(0) = mesh.vertices[tri[1]] - f.origin;
  f.jacobian.col(1) = mesh.vertices[tri[2]] - f.origin;
  f.det = f.jacobian.determinant();
  if (!(f.det > 0.0)) {
    std::ostringstream msg;
    msg << "triangle " << cell << " is degenerate or inverted (det = " << f.det << ")";
    throw AssemblyError(msg.str());
  }
  f.inverse_transpose = f.jacobian.inverse().transpose();
  return f;
}

QuadratureField constant_field(const VolumeMesh& mesh, double value) {
  return QuadratureField(mesh.num_triangles(), triangle_rule().size(), value);
}

Vec2 velocity_at(const FunctionSpace& V, const Eigen::VectorXd& u, std::size_t cell,
                 const Vec2& ref) {
  const auto phi = p2_basis(ref);
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < 6; ++a) {
    const int n = V.node(cell, a);
    v.x() += phi[a] * u[2 * n];
    v.y() += phi[a] * u[2 * n + 1];
  }
  return v;
}

Eigen::Matrix2d strain_rate_at(const VolumeMesh& mesh, const FunctionSpace& V,
                               const Eigen::VectorXd& u, std::size_t cell, const Vec2& ref) {
  const CellFrame frame = cell_frame(mesh, cell);
  const Eigen::Matrix<double, 6, 2> grad =
      p2_reference_gradients(ref) * frame.inverse_transpose.transpose();
  return symmetric_gradient(grad, cell_nodes6(V, cell), u);
}

StokesOperators assemble_stokes(const VolumeMesh& mesh, const FunctionSpace& V,
                                const FunctionSpace& Q, const QuadratureField& mu) {
  const QuadratureRule& rule = triangle_rule();
  const VolumeTables& tab = volume_tables();
  if (mu.values.size() != mesh.num_triangles() * rule.size()) {
    throw AssemblyError("viscosity samples do not match the mesh quadrature");
  }
  Triplets ta, tb;
  ta.reserve(144 * mesh.num_triangles());
  tb.reserve(36 * mesh.num_triangles());

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const CellFrame frame = cell_frame(mesh, t);
    const Eigen::Matrix2d jinv = frame.inverse_transpose.transpose();
    Eigen::Matrix<double, 12, 12> Ae = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 3, 12> Be = Eigen::Matrix<double, 3, 12>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double m = mu(t, q);
      if (!(m >= 0.0) || !std::isfinite(m)) {
        std::ostringstream msg;
        msg << "invalid viscosity " << m << " in cell " << t << " at point " << q;
        throw AssemblyError(msg.str());
      }
      const double w = rule.weights[q] * frame.det;
      const Eigen::Matrix<double, 6, 2> G = tab.p2_grad[q] * jinv;
      const Eigen::Matrix<double, 6, 6> GG = G * G.transpose();
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              const double val = (c == d ? GG(a, b) : 0.0) + G(a, d) * G(b, c);
              Ae(2 * a + c, 2 * b + d) += m * w * val;
            }
          }
        }
        for (int k = 0; k < 3; ++k) {
          Be(k, 2 * a) += w * tab.p1[q][k] * G(a, 0);
          Be(k, 2 * a + 1) += w * tab.p1[q][k] * G(a, 1);
        }
      }
    }
    const auto nodes = cell_nodes6(V, t);
    for (int i = 0; i < 12; ++i) {
      const int gi = 2 * nodes[i / 2] + i % 2;
      for (int j = 0; j < 12; ++j) {
        ta.emplace_back(gi, 2 * nodes[j / 2] + j % 2, Ae(i, j));
      }
      for (int k = 0; k < 3; ++k) {
        tb.emplace_back(Q.node(t, k), gi, Be(k, i));
      }
    }
  }

  StokesOperators ops;
  const auto nu = static_cast<int>(V.num_dofs());
  const auto np = static_cast<int>(Q.num_dofs());
  ops.A.resize(nu, nu);
  ops.A.setFromTriplets(ta.begin(), ta.end());
  ops.B.resize(np, nu);
  ops.B.setFromTriplets(tb.begin(), tb.end());
  ops.A.makeCompressed();
  ops.B.makeCompressed();
  return ops;
}

Eigen::VectorXd assemble_body_force(const VolumeMesh& mesh, const FunctionSpace& V,
                                    const std::function<Vec2(const Vec2&)>& force) {
  const QuadratureRule& rule = triangle_rule();
  const VolumeTables& tab = volume_tables();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(V.num_dofs()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const CellFrame frame = cell_frame(mesh, t);
    const auto nodes = cell_nodes6(V, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 fq = force(frame.map(rule.points[q]));
      const double w = rule.weights[q] * frame.det;
      for (int a = 0; a < 6; ++a) {
        f[2 * nodes[a]] += w * tab.p2[q][a] * fq.x();
        f[2 * nodes[a] + 1] += w * tab.p2[q][a] * fq.y();
      }
    }
  }
  return f;
}

Eigen::VectorXd assemble_gravity(const VolumeMesh& mesh, const FunctionSpace& V, double rho,
                                 double g) {
  const double rg = rho * g;
  return assemble_body_force(mesh, V, [rg](const Vec2&) { return Vec2(0.0, -rg); });
}

QuadratureField viscosity_field(const VolumeMesh& mesh, const FunctionSpace& V,
                                const Eigen::VectorXd& u, double mu0, double p, double delta) {
  if (!(p > 1.0 && p <= 2.0)) {
    std::ostringstream msg;
    msg << "power-law exponent p = " << p << " outside (1, 2]";
    throw ParameterError(msg.str());
  }
  if (!(mu0 > 0.0) || !(delta >= 0.0)) {
    throw ParameterError("viscosity needs mu0 > 0 and delta >= 0");
  }
  QuadratureField mu = constant_field(mesh, mu0);
  if (p == 2.0) {
    return mu;
  }
  const QuadratureRule& rule = triangle_rule();
  const VolumeTables& tab = volume_tables();
  const double expo = 0.5 * (p - 2.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const CellFrame frame = cell_frame(mesh, t);
    const Eigen::Matrix2d jinv = frame.inverse_transpose.transpose();
    const auto nodes = cell_nodes6(V, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix2d D = symmetric_gradient(tab.p2_grad[q] * jinv, nodes, u);
      mu(t, q) = mu0 * std::pow(D.squaredNorm() + delta * delta, expo);
    }
  }
  return mu;
}

Constraints velocity_constraints(const FunctionSpace& V) {
  Constraints c(static_cast<Eigen::Index>(V.num_dofs()));
  for (int n : V.nodes_on(BoundaryMarker::lateral)) {
    c.fix(V.dof(n, 0));
  }
  for (int n : V.nodes_on(BoundaryMarker::bottom)) {
    c.fix(V.dof(n, 0));
    c.fix(V.dof(n, 1));
  }
  return c;
}

}  // namespace fsstokes
