#include <cmath>

#include "doctest.h"
#include "fsstokes/cases.hpp"
#include "fsstokes/diagnostics.hpp"
#include "fsstokes/stokes.hpp"
#include "oracles.hpp"

using namespace fsstokes;

namespace {

struct Column {
  SurfaceGrid grid;
  VolumeMesh mesh;
};

Column flat_column(double height, std::size_t nx, std::size_t ny) {
  Column c;
  c.grid = make_uniform_grid(0.0, 2.0, nx, [height](double) { return height; },
                             [](double) { return 0.0; });
  c.mesh = build_extruded_mesh(c.grid, ny);
  return c;
}

Column tank_column(std::size_t n) {
  CaseConfig tc = tank_case();
  tc.nx = tc.ny = n;
  Column c;
  c.grid = initial_grid(tc);
  c.mesh = build_extruded_mesh(c.grid, n);
  return c;
}

double max_speed(const Eigen::VectorXd& u) {
  double m = 0.0;
  for (Eigen::Index i = 0; i + 1 < u.size(); i += 2) {
    m = std::max(m, std::hypot(u[i], u[i + 1]));
  }
  return m;
}

// Strain energy and int u_z with the test's own basis and quadrature.
struct VolumeOracle {
  double strain = 0.0;
  double uz = 0.0;
};

VolumeOracle volume_oracle(const VolumeMesh& m, const Eigen::VectorXd& u, double mu) {
  VolumeOracle out;
  const int nv = static_cast<int>(m.num_vertices());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const auto& e = m.triangle_edges[t];
    const Eigen::Vector2d a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
    const oracle::QuadraticBasis basis({a, b, c, 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)});
    const int glob[6] = {tri[0], tri[1], tri[2], nv + e[0], nv + e[1], nv + e[2]};
    out.strain += oracle::integrate_triangle(
        [&](const Eigen::Vector2d& p) {
          Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
          for (int k = 0; k < 6; ++k) {
            const Eigen::Vector2d gk = basis.gradient(k, p);
            G.row(0) += u[2 * glob[k]] * gk.transpose();
            G.row(1) += u[2 * glob[k] + 1] * gk.transpose();
          }
          const Eigen::Matrix2d D = 0.5 * (G + G.transpose());
          return mu * D.squaredNorm();
        },
        a, b, c);
    out.uz += oracle::integrate_triangle(
        [&](const Eigen::Vector2d& p) {
          double v = 0.0;
          for (int k = 0; k < 6; ++k) {
            v += u[2 * glob[k] + 1] * basis.value(k, p);
          }
          return v;
        },
        a, b, c);
  }
  return out;
}

void check_hydrostatic(const Column& c, const FluidParams& fp, const StokesSolution& s) {
  const double H = c.grid.h.front();
  const double mu_scale = fp.newtonian() ? fp.mu0 : s.mu.values.front();
  CHECK(s.u.lpNorm<Eigen::Infinity>() <= 1e-9 * fp.rho_g() * H * H / mu_scale);
  const double pmax = fp.rho_g() * H;
  for (std::size_t i = 0; i < c.mesh.num_vertices(); ++i) {
    const double expected = fp.rho_g() * (H - c.mesh.vertices[i].y());
    CHECK(std::abs(s.pi[i] - expected) <= 1e-9 * pmax);
  }
}

}  // namespace

TEST_CASE("flat column is hydrostatic for Newtonian and power-law fluids") {
  const Column c = flat_column(1.0, 6, 5);
  FluidParams newt;
  newt.rho = 1.0;
  newt.g = 9.82;
  newt.mu0 = 0.3;
  const StokesSolution s2 = solve_newtonian(c.mesh, c.grid, newt);
  CHECK(s2.picard_iterations == 1);
  check_hydrostatic(c, newt, s2);

  FluidParams glen = newt;
  glen.p = 4.0 / 3.0;
  glen.mu0 = 1.0;
  const StokesSolution s43 = solve_picard(c.mesh, c.grid, glen);
  CHECK(s43.picard_iterations <= 2);
  check_hydrostatic(c, glen, s43);
}

TEST_CASE("zero gravity gives the zero solution") {
  const Column c = tank_column(6);
  FluidParams fp;
  fp.g = 0.0;
  const StokesSolution s = solve_newtonian(c.mesh, c.grid, fp);
  CHECK(s.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.pi.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("Picard with p = 2 reproduces the Newtonian solve in one iteration") {
  const Column c = tank_column(8);
  const FluidParams fp = tank_case().fluid;
  const StokesSolution a = solve_newtonian(c.mesh, c.grid, fp);
  const StokesSolution b = solve_picard(c.mesh, c.grid, fp);
  CHECK(b.picard_iterations == 1);
  CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() <= 1e-14 * a.u.lpNorm<Eigen::Infinity>());
}

TEST_CASE("tank at t = 0: regression baseline with residual checks") {
  const Column c = tank_column(40);
  const StokesSolution s = solve_newtonian(c.mesh, c.grid, tank_case().fluid);
  CHECK(s.momentum_residual <= 1e-9);
  CHECK(s.continuity_residual <= 1e-9);
  // Frozen from the first verified run at Nx = Ny = 40.
  CHECK(max_speed(s.u) == doctest::Approx(3.3413922207796851).epsilon(1e-9));
  const FunctionSpace V = velocity_space(c.mesh);
  for (int n : V.nodes_on(BoundaryMarker::bottom)) {
    CHECK(s.u[2 * n] == 0.0);
    CHECK(s.u[2 * n + 1] == 0.0);
  }
}

TEST_CASE("energy identity at the solution, by independent quadrature") {
  const Column c = tank_column(12);
  const FluidParams fp = tank_case().fluid;
  const StokesSolution s = solve_newtonian(c.mesh, c.grid, fp);
  const VolumeOracle o = volume_oracle(c.mesh, s.u, fp.mu0);
  CHECK(std::abs(2.0 * o.strain + fp.rho_g() * o.uz) <= 1e-8 * 2.0 * o.strain);
  CHECK(strain_energy(c.mesh, s.u, s.mu) == doctest::Approx(o.strain).epsilon(1e-12));
}

TEST_CASE("synthetic ice slice: Picard converges below 1e-6") {
  CaseConfig gc = greenland_synthetic_case(1);
  gc.nx = 150;
  gc.ny = 10;
  const SurfaceGrid g = initial_grid(gc);
  const VolumeMesh m = build_extruded_mesh(g, gc.ny);
  const StokesSolution s = solve_picard(m, g, gc.fluid);
  CHECK(s.final_relative_change < 1e-6);
  CHECK(s.picard_iterations <= 50);
  // Frozen from the first verified run.
  CHECK(s.picard_iterations == 36);
  CHECK(s.momentum_residual <= 1e-9);
}

TEST_CASE("Picard raises a convergence error when out of iterations") {
  CaseConfig gc = greenland_synthetic_case(1);
  gc.nx = 30;
  gc.ny = 4;
  const SurfaceGrid g = initial_grid(gc);
  const VolumeMesh m = build_extruded_mesh(g, gc.ny);
  CHECK_THROWS_AS(solve_picard(m, g, gc.fluid, {}, 1e-6, 2), ConvergenceError);
}
