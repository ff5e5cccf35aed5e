#include <cmath>
#include <sstream>

#include "fsstokes/fem.hpp"
#include "fsstokes/quadrature.hpp"

namespace fsstokes {

double SurfaceTrace::node_speed(std::size_t i) const {
  return std::hypot(node_ux[i], node_uz[i]);
}

SurfaceTrace SurfaceTrace::zero(std::size_t cells) {
  SurfaceTrace tr;
  tr.ux.assign(cells, {0.0, 0.0, 0.0});
  tr.uz.assign(cells, {0.0, 0.0, 0.0});
  tr.node_ux.assign(cells + 1, 0.0);
  tr.node_uz.assign(cells + 1, 0.0);
  return tr;
}

namespace {

void check_columns(const VolumeMesh& mesh, const SurfaceGrid& grid) {
  if (mesh.column_top_facet.size() != grid.num_cells()) {
    throw AssemblyError("surface grid does not match the mesh columns");
  }
}

// Velocity nodes of the top facet above cell c, ordered (left, right, mid).
std::array<int, 3> top_facet_nodes(const VolumeMesh& mesh, std::size_t c) {
  const BoundaryFacet& f = mesh.facets[mesh.column_top_facet[c]];
  const int nv = static_cast<int>(mesh.num_vertices());
  return {f.vertices[0], f.vertices[1], nv + f.edge};
}

// Shared loop for the two surface operators. `entry(Na, Nb, n)` returns the
// 2x2 block (row component, column component) of the integrand without ds;
// `load(Na, n, a)` the 2-vector load integrand.
template <class Entry, class Load>
SurfaceOperator assemble_surface(const VolumeMesh& mesh, const FunctionSpace& V,
                                 const SurfaceGrid& grid, const SourceFn& a, double t,
                                 Entry entry, Load load) {
  check_columns(mesh, grid);
  const QuadratureRule& rule = line_rule();
  Triplets trip;
  trip.reserve(36 * grid.num_cells());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(V.num_dofs()));
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const auto nodes = top_facet_nodes(mesh, c);
    const SurfaceGeometry geo = surface_geometry(grid, c);
    const double dx = grid.cell_diameter(c);
    Eigen::Matrix<double, 6, 6> Ke = Eigen::Matrix<double, 6, 6>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x();
      const double ds = rule.weights[q] * dx * geo.omega;
      const Eigen::Vector3d N = p2_line_basis(xi);
      const double aq = a(grid.x[c] + xi * dx, t);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Ke.block<2, 2>(2 * i, 2 * j) += ds * entry(N[i], N[j], geo);
        }
        const Vec2 li = ds * load(N[i], geo, aq);
        r[2 * nodes[i]] += li.x();
        r[2 * nodes[i] + 1] += li.y();
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (Ke(i, j) != 0.0) {
          trip.emplace_back(2 * nodes[i / 2] + i % 2, 2 * nodes[j / 2] + j % 2, Ke(i, j));
        }
      }
    }
  }
  SurfaceOperator op;
  const auto n = static_cast<int>(V.num_dofs());
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  op.load = std::move(r);
  return op;
}

}  // namespace

SurfaceOperator assemble_normal_penalty(const VolumeMesh& mesh, const FunctionSpace& V,
                                        const SurfaceGrid& grid, double dt, double rho, double g,
                                        const SourceFn& a, double t) {
  const double coef = rho * g * dt;
  return assemble_surface(
      mesh, V, grid, a, t,
      [coef](double Ni, double Nj, const SurfaceGeometry& geo) -> Eigen::Matrix2d {
        return 0.5 * coef * geo.omega * Ni * Nj * geo.normal * geo.normal.transpose();
      },
      [coef](double Ni, const SurfaceGeometry& geo, double aq) -> Vec2 {
        return coef * Ni * aq * geo.normal;
      });
}

SurfaceOperator assemble_fssa(const VolumeMesh& mesh, const FunctionSpace& V,
                              const SurfaceGrid& grid, double dt, double rho, double g,
                              const SourceFn& a, double t) {
  const double coef = rho * g * dt;
  return assemble_surface(
      mesh, V, grid, a, t,
      [coef](double Ni, double Nj, const SurfaceGeometry& geo) -> Eigen::Matrix2d {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        m.row(1) = coef * Ni * Nj * geo.normal.transpose();
        return m;
      },
      [coef](double Ni, const SurfaceGeometry& geo, double aq) -> Vec2 {
        return Vec2(0.0, coef * Ni * geo.normal.y() * aq);
      });
}

SparseMatrix surface_mass(const SurfaceGrid& grid) {
  Triplets trip;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const double dx = grid.cell_diameter(c);
    const auto i = static_cast<int>(c);
    trip.emplace_back(i, i, dx / 3.0);
    trip.emplace_back(i + 1, i + 1, dx / 3.0);
    trip.emplace_back(i, i + 1, dx / 6.0);
    trip.emplace_back(i + 1, i, dx / 6.0);
  }
  const auto n = static_cast<int>(grid.num_nodes());
  SparseMatrix M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

SparseMatrix edge_jump_operator(const SurfaceGrid& grid, const std::vector<double>& gamma) {
  if (gamma.size() != grid.num_nodes()) {
    throw AssemblyError("edge coefficients need one value per surface node");
  }
  Triplets trip;
  for (std::size_t k = 1; k + 1 < grid.num_nodes(); ++k) {
    if (gamma[k] < 0.0) {
      std::ostringstream msg;
      msg << "negative edge coefficient at node " << k;
      throw AssemblyError(msg.str());
    }
    if (gamma[k] == 0.0) {
      continue;
    }
    const double il = 1.0 / grid.cell_diameter(k - 1);
    const double ir = 1.0 / grid.cell_diameter(k);
    const std::array<double, 3> j = {il, -(il + ir), ir};
    const auto base = static_cast<int>(k) - 1;
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        trip.emplace_back(base + r, base + s, gamma[k] * j[r] * j[s]);
      }
    }
  }
  const auto n = static_cast<int>(grid.num_nodes());
  SparseMatrix J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

Eigen::VectorXd surface_load(const SurfaceGrid& grid, const std::function<double(double)>& f) {
  const QuadratureRule& rule = line_rule();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.num_nodes()));
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const double dx = grid.cell_diameter(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x();
      const double wf = rule.weights[q] * dx * f(grid.x[c] + xi * dx);
      r[c] += wf * (1.0 - xi);
      r[c + 1] += wf * xi;
    }
  }
  return r;
}

FreeSurfaceSystem assemble_free_surface(const SurfaceGrid& grid, const std::vector<double>& h_old,
                                        const SurfaceTrace& trace, double dt, AdvectionMode mode,
                                        const std::vector<double>& gamma, const SourceFn& a,
                                        double t) {
  if (trace.num_cells() != grid.num_cells() || h_old.size() != grid.num_nodes()) {
    throw AssemblyError("surface trace or previous height does not match the grid");
  }
  const QuadratureRule& rule = line_rule();
  const SparseMatrix M = surface_mass(grid);
  const Eigen::Map<const Eigen::VectorXd> hn(h_old.data(), static_cast<Eigen::Index>(h_old.size()));

  Eigen::VectorXd rhs = M * hn + dt * surface_load(grid, [&](double x) { return a(x, t); });
  Triplets adv;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const double dx = grid.cell_diameter(c);
    const double s = grid.slope(c);
    const auto i = static_cast<int>(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x();
      const double w = rule.weights[q] * dx;
      const double psi[2] = {1.0 - xi, xi};
      if (mode != AdvectionMode::explicit_advection) {
        const double dpsi[2] = {-1.0 / dx, 1.0 / dx};
        for (int r = 0; r < 2; ++r) {
          rhs[i + r] += dt * w * trace.uz[c][q] * psi[r];
          for (int k = 0; k < 2; ++k) {
            adv.emplace_back(i + r, i + k, dt * w * trace.ux[c][q] * dpsi[k] * psi[r]);
          }
        }
      } else {
        const double d = -trace.ux[c][q] * s + trace.uz[c][q];
        rhs[i] += dt * w * d * psi[0];
        rhs[i + 1] += dt * w * d * psi[1];
      }
    }
  }
  FreeSurfaceSystem sys;
  SparseMatrix C(M.rows(), M.cols());
  C.setFromTriplets(adv.begin(), adv.end());
  sys.matrix = M + C + dt * edge_jump_operator(grid, gamma);
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  return sys;
}

HeightCoupling assemble_height_coupling(const VolumeMesh& mesh, const FunctionSpace& V,
                                        const SurfaceGrid& grid, const std::vector<double>& h_old,
                                        const SurfaceTrace& trace, double dt, double rho_g,
                                        const std::vector<double>& gamma, const SourceFn& a,
                                        double t) {
  check_columns(mesh, grid);
  // u_z is an unknown here, so only the advection speed is taken from the trace.
  SurfaceTrace advect = trace;
  for (auto& cell : advect.uz) {
    cell = {0.0, 0.0, 0.0};
  }
  const FreeSurfaceSystem fs =
      assemble_free_surface(grid, h_old, advect, dt, AdvectionMode::implicit, gamma, a, t);
  const QuadratureRule& rule = line_rule();
  Triplets z;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const auto nodes = top_facet_nodes(mesh, c);
    const double dx = grid.cell_diameter(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x();
      const double w = rule.weights[q] * dx;
      const Eigen::Vector3d N = p2_line_basis(xi);
      const double psi[2] = {1.0 - xi, xi};
      for (int r = 0; r < 2; ++r) {
        for (int j = 0; j < 3; ++j) {
          z.emplace_back(static_cast<int>(c) + r, 2 * nodes[j] + 1, w * psi[r] * N[j]);
        }
      }
    }
  }
  const auto nh = static_cast<int>(grid.num_nodes());
  SparseMatrix Z(nh, static_cast<int>(V.num_dofs()));
  Z.setFromTriplets(z.begin(), z.end());
  Z.makeCompressed();

  HeightCoupling out;
  out.border.upper = rho_g * SparseMatrix(Z.transpose());
  out.border.lower = -dt * Z;
  out.border.corner = fs.matrix;
  out.border.rhs = fs.rhs;
  const Eigen::Map<const Eigen::VectorXd> hk(grid.h.data(), nh);
  out.momentum_load = out.border.upper * hk;
  return out;
}

}  // namespace fsstokes
