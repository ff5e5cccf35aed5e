#pragma once

#include <Eigen/Core>

#include "fsstokes/common.hpp"
#include "fsstokes/fem.hpp"
#include "fsstokes/mesh.hpp"

namespace fsstokes {

struct FluidParams {
  double rho = 1.0;
  double g = 9.82;
  double mu0 = 0.3;
  double p = 2.0;
  double delta = 1e-10;

  double rho_g() const { return rho * g; }
  bool newtonian() const { return p == 2.0; }
  void validate() const;
};

enum class StabilizationKind {
  none,
  normal_penalty,  // symmetric surface penalty plus source load
  fssa,            // FSSA block plus source load
  height_coupled   // height unknowns solved with (u, pi), see HeightCoupling
};

struct Stabilization {
  StabilizationKind kind = StabilizationKind::none;
  double dt = 0.0;
  SourceFn source = zero_source;
  double t = 0.0;
  /// Coupling blocks for height_coupled.
  const HeightCoupling* coupling = nullptr;

  static Stabilization none() { return {}; }
};

struct StokesSolution {
  Eigen::VectorXd u;   // P2 velocity, dof = 2 * node + component
  Eigen::VectorXd pi;  // P1 pressure at the vertices
  Eigen::VectorXd h;   // surface heights of a height_coupled solve, empty otherwise
  int picard_iterations = 0;
  double final_relative_change = 0.0;
  /// Viscosity samples of the last linear solve.
  QuadratureField mu;
  double momentum_residual = 0.0;
  double continuity_residual = 0.0;
};

/// One linear Stokes solve with the viscosity frozen at `mu`.
StokesSolution solve_linear(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const QuadratureField& mu,
                            const Stabilization& stab = {});

/// Requires p = 2.
StokesSolution solve_newtonian(const VolumeMesh& mesh, const SurfaceGrid& grid,
                               const FluidParams& params, const Stabilization& stab = {});

/// Picard iteration on the power-law viscosity. Starts from `initial` (the
/// zero field when null) and stops when
///   ||u_{k+1} - u_k||_2 < tol * max(||u_{k+1}||_2, floor),
/// floor = 1e-8 sqrt(N) rho g H^2 / max(mu): a velocity far below anything
/// the load can drive, so exact equilibria stop at once.
StokesSolution solve_picard(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const Stabilization& stab = {},
                            double tol = 1e-6, int max_iter = 50,
                            const Eigen::VectorXd* initial = nullptr);

/// solve_newtonian for p = 2, solve_picard otherwise.
StokesSolution solve_stokes(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const Stabilization& stab = {},
                            double tol = 1e-6, int max_iter = 50,
                            const Eigen::VectorXd* initial = nullptr);

}  // namespace fsstokes
