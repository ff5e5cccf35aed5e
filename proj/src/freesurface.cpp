#include "fsstokes/freesurface.hpp"

#include "fsstokes/linalg.hpp"
#include "fsstokes/quadrature.hpp"

namespace fsstokes {

SurfaceTrace extract_trace(const VolumeMesh& mesh, const Eigen::VectorXd& u) {
  const std::size_t nc = mesh.nx;
  const int nv = static_cast<int>(mesh.num_vertices());
  const QuadratureRule& rule = line_rule();
  SurfaceTrace tr = SurfaceTrace::zero(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const BoundaryFacet& f = mesh.facets[mesh.column_top_facet[c]];
    const int nodes[3] = {f.vertices[0], f.vertices[1], nv + f.edge};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d N = p2_line_basis(rule.points[q].x());
      for (int k = 0; k < 3; ++k) {
        tr.ux[c][q] += N[k] * u[2 * nodes[k]];
        tr.uz[c][q] += N[k] * u[2 * nodes[k] + 1];
      }
    }
  }
  for (std::size_t i = 0; i <= nc; ++i) {
    const int v = mesh.vertex_index(i, mesh.ny);
    tr.node_ux[i] = u[2 * v];
    tr.node_uz[i] = u[2 * v + 1];
  }
  return tr;
}

std::vector<double> edge_coefficients(const SurfaceGrid& grid, const SurfaceTrace& trace) {
  std::vector<double> gamma(grid.num_nodes(), 0.0);
  for (std::size_t k = 1; k + 1 < grid.num_nodes(); ++k) {
    const double hk = 0.5 * (grid.cell_diameter(k - 1) + grid.cell_diameter(k));
    gamma[k] = 0.5 * hk * hk * trace.node_speed(k);
  }
  return gamma;
}

HeightUpdate advance_height(const SurfaceGrid& grid, const std::vector<double>& h_old,
                            const SurfaceTrace& trace, double dt, AdvectionMode mode,
                            const SourceFn& a, double t, bool edge_stabilization) {
  if (!(dt > 0.0)) {
    throw ParameterError("height update needs dt > 0");
  }
  HeightUpdate up;
  up.dt = dt;
  up.mode = mode;
  up.gamma = edge_stabilization ? edge_coefficients(grid, trace)
                                : std::vector<double>(grid.num_nodes(), 0.0);
  const FreeSurfaceSystem sys = assemble_free_surface(grid, h_old, trace, dt, mode, up.gamma, a, t);
  const Eigen::VectorXd h = factor_solve(sys.matrix, sys.rhs);
  const double scale =
      inf_norm(sys.matrix) * h.lpNorm<Eigen::Infinity>() + sys.rhs.lpNorm<Eigen::Infinity>();
  const double res = (sys.matrix * h - sys.rhs).lpNorm<Eigen::Infinity>();
  up.residual = scale > 0.0 ? res / scale : res;
  up.h.assign(h.data(), h.data() + h.size());
  for (std::size_t i = 0; i < up.h.size(); ++i) {
    if (!(up.h[i] - grid.b[i] > 0.0)) {
      up.thickness_violation = static_cast<int>(i);
      break;
    }
  }
  return up;
}

HeightUpdate advance_height(const SurfaceGrid& grid, const SurfaceTrace& trace, double dt,
                            AdvectionMode mode, const SourceFn& a, double t,
                            bool edge_stabilization) {
  return advance_height(grid, grid.h, trace, dt, mode, a, t, edge_stabilization);
}

}  // namespace fsstokes
