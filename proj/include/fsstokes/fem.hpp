#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "fsstokes/common.hpp"
#include "fsstokes/linalg.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/surface_trace.hpp"

namespace fsstokes {

enum class SpaceKind { velocity_p2, pressure_p1, surface_p1 };

/// Dof layout of one finite-element space. Geometric nodes carry
/// `components` dofs each, dof = components * node + component.
///
/// velocity_p2: nodes are the mesh vertices followed by the edge midpoints
///   (node nv + e for edge e); local order v0, v1, v2, e01, e12, e20.
/// pressure_p1: nodes are the mesh vertices.
/// surface_p1: nodes are the SurfaceGrid nodes, cells the grid cells.
struct FunctionSpace {
  SpaceKind kind = SpaceKind::pressure_p1;
  int components = 1;
  int nodes_per_cell = 3;
  std::size_t num_nodes = 0;
  std::vector<int> cell_nodes;  // nodes_per_cell entries per cell
  /// Boundary nodes per marker (indexed by BoundaryMarker), sorted, unique.
  std::array<std::vector<int>, 3> boundary_nodes;

  std::size_t num_dofs() const { return components * num_nodes; }
  std::size_t num_cells() const { return cell_nodes.size() / nodes_per_cell; }
  int node(std::size_t cell, int local) const { return cell_nodes[cell * nodes_per_cell + local]; }
  int dof(int node, int component) const { return components * node + component; }
  const std::vector<int>& nodes_on(BoundaryMarker m) const {
    return boundary_nodes[static_cast<int>(m)];
  }
};

FunctionSpace velocity_space(const VolumeMesh& mesh);
FunctionSpace pressure_space(const VolumeMesh& mesh);
FunctionSpace surface_space(const SurfaceGrid& grid);

/// Coefficients of a discrete field together with the space they live in.
struct FEFunction {
  const FunctionSpace* space = nullptr;
  Eigen::VectorXd coefficients;
};

// Reference-element bases: lambda0 = 1 - xi - eta, lambda1 = xi, lambda2 = eta.
Eigen::Matrix<double, 6, 1> p2_basis(const Vec2& ref);
Eigen::Matrix<double, 6, 2> p2_reference_gradients(const Vec2& ref);
Eigen::Vector3d p1_basis(const Vec2& ref);
/// Quadratic Lagrange basis on [0, 1] with nodes 0, 1, 1/2 (in that order).
Eigen::Vector3d p2_line_basis(double xi);

/// Affine map of one triangle from the reference element.
struct CellFrame {
  Vec2 origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_transpose;
  double det = 0.0;

  Vec2 map(const Vec2& ref) const { return origin + jacobian * ref; }
};

CellFrame cell_frame(const VolumeMesh& mesh, std::size_t cell);

/// Per-cell samples at the points of triangle_rule().
struct QuadratureField {
  std::size_t points_per_cell = 0;
  std::vector<double> values;

  QuadratureField() = default;
  QuadratureField(std::size_t cells, std::size_t per_cell, double value = 0.0)
      : points_per_cell(per_cell), values(cells * per_cell, value) {}
  double& operator()(std::size_t cell, std::size_t q) { return values[cell * points_per_cell + q]; }
  double operator()(std::size_t cell, std::size_t q) const {
    return values[cell * points_per_cell + q];
  }
};

QuadratureField constant_field(const VolumeMesh& mesh, double value);

Vec2 velocity_at(const FunctionSpace& V, const Eigen::VectorXd& u, std::size_t cell, const Vec2& ref);
/// Symmetric gradient Du at a reference point of `cell`.
Eigen::Matrix2d strain_rate_at(const VolumeMesh& mesh, const FunctionSpace& V,
                               const Eigen::VectorXd& u, std::size_t cell, const Vec2& ref);

struct StokesOperators {
  SparseMatrix A;  // 2 (mu Du, Dv)
  SparseMatrix B;  // (q, div v)
};

StokesOperators assemble_stokes(const VolumeMesh& mesh, const FunctionSpace& V,
                                const FunctionSpace& Q, const QuadratureField& mu);

/// f_i = -rho g (z_hat, v_i).
Eigen::VectorXd assemble_gravity(const VolumeMesh& mesh, const FunctionSpace& V, double rho, double g);

/// f_i = (force, v_i) for a given body force density.
Eigen::VectorXd assemble_body_force(const VolumeMesh& mesh, const FunctionSpace& V,
                                    const std::function<Vec2(const Vec2&)>& force);

/// mu = mu0 (|Du|^2 + delta^2)^((p - 2) / 2) at every volume quadrature point.
QuadratureField viscosity_field(const VolumeMesh& mesh, const FunctionSpace& V,
                                const Eigen::VectorXd& u, double mu0, double p, double delta);

/// u = 0 on the bottom, u_x = 0 on the lateral walls.
Constraints velocity_constraints(const FunctionSpace& V);

// Surface terms. All facet integrals use line_rule() on each top facet with
// ds = omega dx.

struct SurfaceOperator {
  SparseMatrix matrix;
  Eigen::VectorXd load;  // left-hand-side load (moves to the right with a minus)
};

/// S_ij = (rho g dt / 2) int omega (v_j.n)(v_i.n) ds,
/// r_i  = rho g dt int (v_i.n) a(x, t) ds.
SurfaceOperator assemble_normal_penalty(const VolumeMesh& mesh, const FunctionSpace& V,
                                        const SurfaceGrid& grid, double dt, double rho, double g,
                                        const SourceFn& a, double t);

/// F_ij = rho g dt int (v_j.n)(z_hat.v_i) ds,
/// r_i  = rho g dt int (v_i.z_hat) n_z a(x, t) ds.
SurfaceOperator assemble_fssa(const VolumeMesh& mesh, const FunctionSpace& V,
                              const SurfaceGrid& grid, double dt, double rho, double g,
                              const SourceFn& a, double t);

enum class AdvectionMode { explicit_advection, semi_implicit_advection, implicit };

struct FreeSurfaceSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Height system for one step. `grid` is the surface the trace was sampled
/// on; `h_old` is h^n.
///
/// explicit: (M + dt J) h = M h^n + dt (a, w) + dt (-u_perp dh/dx + u_z, w)
///   with dh/dx taken from `grid`.
/// semi_implicit / implicit: (M + dt C + dt J) h = M h^n + dt (a, w) + dt (u_z, w),
///   C_ij = (u_perp d(phi_j)/dx, phi_i). The two differ only in the time
///   level of the trace the caller passes.
FreeSurfaceSystem assemble_free_surface(const SurfaceGrid& grid, const std::vector<double>& h_old,
                                        const SurfaceTrace& trace, double dt, AdvectionMode mode,
                                        const std::vector<double>& gamma, const SourceFn& a,
                                        double t);

/// Height unknowns solved together with (u, pi) for the implicit scheme on
/// Omega(h^k). The momentum equation carries the weight of the column
/// between h^k and the unknown h,
///   A u - B^T pi + rho g T h = f + rho g T h^k,  T_ij = int (z_hat.v_i) phi_j dx,
/// and the height equation is
///   (M + dt C + dt J) h - dt Z u = M h^n + dt (a, w),  Z_ij = int phi_i (z_hat.v_j) dx,
/// with C built from `trace` (the previous iterate's velocity).
struct HeightCoupling {
  Border border;
  Eigen::VectorXd momentum_load;
};

HeightCoupling assemble_height_coupling(const VolumeMesh& mesh, const FunctionSpace& V,
                                        const SurfaceGrid& grid, const std::vector<double>& h_old,
                                        const SurfaceTrace& trace, double dt, double rho_g,
                                        const std::vector<double>& gamma, const SourceFn& a,
                                        double t);

/// P1 mass matrix on the surface grid.
SparseMatrix surface_mass(const SurfaceGrid& grid);

/// Edge-jump operator J(gamma): sum over interior nodes of gamma_k j_k j_k^T,
/// j_k the jump of dw/dx at node k.
SparseMatrix edge_jump_operator(const SurfaceGrid& grid, const std::vector<double>& gamma);

/// (f, w_i) on the surface grid with line_rule() per cell.
Eigen::VectorXd surface_load(const SurfaceGrid& grid, const std::function<double(double)>& f);

}  // namespace fsstokes
