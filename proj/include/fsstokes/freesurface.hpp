#pragma once

#include <vector>

#include "fsstokes/fem.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/stokes.hpp"
#include "fsstokes/surface_trace.hpp"

namespace fsstokes {

/// Samples the P2 velocity on the top facets at the line_rule() points of
/// each surface cell, plus nodal values at the surface vertices.
SurfaceTrace extract_trace(const VolumeMesh& mesh, const Eigen::VectorXd& u);

/// gamma_k = 1/2 h_K^2 |u_k| at interior nodes, h_K the mean width of the
/// two adjacent cells and |u_k| the traced surface speed; zero at the ends.
std::vector<double> edge_coefficients(const SurfaceGrid& grid, const SurfaceTrace& trace);

struct HeightUpdate {
  std::vector<double> h;
  double dt = 0.0;
  AdvectionMode mode = AdvectionMode::explicit_advection;
  std::vector<double> gamma;
  double residual = 0.0;         // relative, inf-norm
  int thickness_violation = -1;  // first node with h - b <= 0, or -1
};

/// One height solve. `grid` carries the surface on which the trace was
/// sampled; `h_old` is h^n.
HeightUpdate advance_height(const SurfaceGrid& grid, const std::vector<double>& h_old,
                            const SurfaceTrace& trace, double dt, AdvectionMode mode,
                            const SourceFn& a, double t, bool edge_stabilization = true);

/// As above with h^n = grid.h.
HeightUpdate advance_height(const SurfaceGrid& grid, const SurfaceTrace& trace, double dt,
                            AdvectionMode mode, const SourceFn& a, double t,
                            bool edge_stabilization = true);

}  // namespace fsstokes
