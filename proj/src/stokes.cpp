#include "fsstokes/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsstokes/linalg.hpp"

namespace fsstokes {

void FluidParams::validate() const {
  if (!(rho > 0.0) || !(g >= 0.0) || !(mu0 > 0.0)) {
    throw ParameterError("fluid parameters need rho, mu0 > 0 and g >= 0");
  }
  if (!(p > 1.0 && p <= 2.0)) {
    std::ostringstream msg;
    msg << "power-law exponent p = " << p << " outside (1, 2]";
    throw ParameterError(msg.str());
  }
  if (!(delta >= 0.0)) {
    throw ParameterError("viscosity regularization delta must be non-negative");
  }
}

StokesSolution solve_linear(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const QuadratureField& mu,
                            const Stabilization& stab) {
  const FunctionSpace V = velocity_space(mesh);
  const FunctionSpace Q = pressure_space(mesh);
  StokesOperators ops = assemble_stokes(mesh, V, Q, mu);

  SaddleSystem sys;
  sys.A = std::move(ops.A);
  sys.B = std::move(ops.B);
  sys.f = assemble_gravity(mesh, V, params.rho, params.g);
  sys.g = Eigen::VectorXd::Zero(sys.B.rows());

  SurfaceOperator extra;
  Eigen::VectorXd load;
  switch (stab.kind) {
    case StabilizationKind::none:
      break;
    case StabilizationKind::normal_penalty:
      extra = assemble_normal_penalty(mesh, V, grid, stab.dt, params.rho, params.g, stab.source,
                                      stab.t);
      load = -extra.load;
      break;
    case StabilizationKind::fssa:
      extra = assemble_fssa(mesh, V, grid, stab.dt, params.rho, params.g, stab.source, stab.t);
      load = -extra.load;
      break;
    case StabilizationKind::height_coupled:
      if (!stab.coupling || stab.coupling->momentum_load.size() != sys.A.rows()) {
        throw ParameterError("height-coupled solve needs coupling blocks of matching size");
      }
      break;
  }
  const bool block = stab.kind == StabilizationKind::normal_penalty ||
                     stab.kind == StabilizationKind::fssa;
  const bool coupled = stab.kind == StabilizationKind::height_coupled;
  if (coupled) {
    load = stab.coupling->momentum_load;
  }

  const SaddleSolution sol = solve_saddle(sys, velocity_constraints(V),
                                          block ? &extra.matrix : nullptr,
                                          block || coupled ? &load : nullptr,
                                          coupled ? &stab.coupling->border : nullptr);
  StokesSolution out;
  out.u = sol.u;
  out.pi = sol.pi;
  out.h = sol.extra;
  out.picard_iterations = 1;
  out.mu = mu;
  out.momentum_residual = sol.momentum_residual;
  out.continuity_residual = sol.continuity_residual;
  return out;
}

StokesSolution solve_newtonian(const VolumeMesh& mesh, const SurfaceGrid& grid,
                               const FluidParams& params, const Stabilization& stab) {
  params.validate();
  if (!params.newtonian()) {
    throw ParameterError("solve_newtonian requires p = 2");
  }
  return solve_linear(mesh, grid, params, constant_field(mesh, params.mu0), stab);
}

StokesSolution solve_picard(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const Stabilization& stab, double tol,
                            int max_iter, const Eigen::VectorXd* initial) {
  params.validate();
  const FunctionSpace V = velocity_space(mesh);
  const auto n = static_cast<Eigen::Index>(V.num_dofs());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (initial && initial->size() == n) {
    u = *initial;
  }
  if (params.newtonian()) {
    max_iter = 1;
  }

  double zmin = mesh.vertices.front().y(), zmax = zmin;
  for (const Vec2& v : mesh.vertices) {
    zmin = std::min(zmin, v.y());
    zmax = std::max(zmax, v.y());
  }
  const double depth = zmax - zmin;

  double change = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const QuadratureField mu = viscosity_field(mesh, V, u, params.mu0, params.p, params.delta);
    StokesSolution next = solve_linear(mesh, grid, params, mu, stab);
    const double mu_max = *std::max_element(mu.values.begin(), mu.values.end());
    const double floor =
        1e-8 * std::sqrt(static_cast<double>(n)) * params.rho_g() * depth * depth / mu_max;
    const double diff = (next.u - u).norm();
    const double size = std::max(next.u.norm(), floor);
    change = diff / size;
    next.picard_iterations = k;
    next.final_relative_change = change;
    if (params.newtonian() || change < tol) {
      return next;
    }
    u = std::move(next.u);
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge in " << max_iter << " iterations (last change "
      << change << ")";
  throw ConvergenceError(msg.str(), change);
}

StokesSolution solve_stokes(const VolumeMesh& mesh, const SurfaceGrid& grid,
                            const FluidParams& params, const Stabilization& stab, double tol,
                            int max_iter, const Eigen::VectorXd* initial) {
  if (params.newtonian()) {
    return solve_newtonian(mesh, grid, params, stab);
  }
  return solve_picard(mesh, grid, params, stab, tol, max_iter, initial);
}

}  // namespace fsstokes
