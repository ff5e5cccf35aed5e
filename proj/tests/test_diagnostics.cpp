#include <cmath>
#include <random>

#include "doctest.h"
#include "fields.hpp"
#include "fsstokes/cases.hpp"
#include "fsstokes/diagnostics.hpp"
#include "fsstokes/stokes.hpp"
#include "oracles.hpp"

using namespace fsstokes;

namespace {

SurfaceGrid tank_grid(std::size_t n) {
  CaseConfig c = tank_case();
  c.nx = n;
  return initial_grid(c);
}

}  // namespace

TEST_CASE("strain energy: zero field and constant shear") {
  const SurfaceGrid g = make_uniform_grid(0.0, 1.0, 3, [](double) { return 1.0; },
                                          [](double) { return 0.0; });
  const VolumeMesh m = build_extruded_mesh(g, 3);
  const QuadratureField one = constant_field(m, 1.0);
  CHECK(strain_energy(m, Eigen::VectorXd::Zero(2 * (m.num_vertices() + m.num_edges())), one) == 0.0);
  // u = (z / 2, x / 2): Du = [[0, 1/2], [1/2, 0]], |Du|^2 = 1/2 on unit area.
  const Eigen::VectorXd u =
      testfields::interpolate(m, [](const Vec2& p) { return Vec2(0.5 * p.y(), 0.5 * p.x()); });
  CHECK(strain_energy(m, u, one) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("strain energy equals half the assembled quadratic form") {
  const SurfaceGrid g = tank_grid(5);
  const VolumeMesh m = build_extruded_mesh(g, 4);
  const FunctionSpace V = velocity_space(m), Q = pressure_space(m);
  const QuadratureField mu = constant_field(m, 0.3);
  const StokesOperators ops = assemble_stokes(m, V, Q, mu);
  for (std::uint64_t seed : {1, 2, 3}) {
    const Eigen::VectorXd u = testfields::random_field(m, seed);
    const double quad = u.dot(ops.A * u) / 2.0;
    CHECK(std::abs(strain_energy(m, u, mu) - quad) <= 1e-12 * quad);
  }
}

TEST_CASE("property: power-law identity mu0 ||Du||_p^p = ||sqrt(mu) Du||^2") {
  const SurfaceGrid g = tank_grid(6);
  const VolumeMesh m = build_extruded_mesh(g, 5);
  const FunctionSpace V = velocity_space(m);
  for (double p : {4.0 / 3.0, 1.5, 2.0}) {
    for (std::uint64_t seed : {4, 5, 6}) {
      const Eigen::VectorXd u = testfields::random_field(m, seed);
      const double mu0 = 0.7;
      const QuadratureField mu = viscosity_field(m, V, u, mu0, p, 0.0);
      const double lhs = lp_strain_norm(m, u, mu0, p);
      const double rhs = strain_energy(m, u, mu);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
  }
}

TEST_CASE("surface L2 norm matches the Gauss oracle") {
  const SurfaceGrid g = tank_grid(9);
  double ref = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const double h0 = g.h[c], h1 = g.h[c + 1], x0 = g.x[c], dx = g.cell_diameter(c);
    ref += oracle::integrate(
        [&](double x) {
          const double v = h0 + (h1 - h0) * (x - x0) / dx;
          return v * v;
        },
        x0, x0 + dx);
  }
  CHECK(surface_l2_sq(g, g.h) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("energy sides closed forms") {
  const SurfaceGrid g = tank_grid(10);
  const double h2 = surface_l2_sq(g, g.h);
  const EnergySides rest = energy_sides(g, g.h, g.h, 0.0, 0.5, 9.82, zero_source, 0.0);
  CHECK(rest.E_L == h2);
  CHECK(rest.E_R == h2);

  std::vector<double> h_new = g.h;
  for (double& v : h_new) {
    v += 0.1;
  }
  const EnergySides nodt = energy_sides(g, g.h, h_new, 3.0, 0.0, 9.82,
                                        [](double, double) { return 1.0; }, 0.0);
  CHECK(nodt.E_L - nodt.E_R == doctest::Approx(surface_l2_sq(g, h_new) - h2).epsilon(1e-14));

  const SourceFn a = [](double x, double) { return x; };
  const EnergySides full = energy_sides(g, g.h, h_new, 2.0, 0.25, 4.0, a, 0.0);
  CHECK(full.E_L == doctest::Approx(surface_l2_sq(g, h_new) + 0.5).epsilon(1e-14));
  const double ah = surface_inner(g, [](double x) { return x; }, g.h);
  CHECK(full.E_R == doctest::Approx(h2 + 0.5 * ah + 0.0625 * (2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("normalized energy: closed forms, scaling and empty ledger") {
  const std::vector<double> e = normalized_energy({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  for (double v : e) {
    CHECK(v == 0.0);
  }
  CHECK(normalized_energy({2.0}, {1.0})[0] == 1.0);
  CHECK_THROWS_AS(normalized_energy(std::vector<double>{}, std::vector<double>{}), ParameterError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  std::vector<double> L(20), R(20);
  for (std::size_t i = 0; i < L.size(); ++i) {
    L[i] = u(rng);
    R[i] = u(rng);
  }
  const std::vector<double> base = normalized_energy(L, R);
  for (double k : {1e-6, 0.3, 7.0, 1e8}) {
    std::vector<double> Lk = L, Rk = R;
    for (std::size_t i = 0; i < L.size(); ++i) {
      Lk[i] *= k;
      Rk[i] *= k;
    }
    const std::vector<double> scaled = normalized_energy(Lk, Rk);
    for (std::size_t i = 0; i < L.size(); ++i) {
      CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-14));
    }
  }

  std::vector<DiagnosticsRecord> recs(2);
  recs[0].E_L = 1.0;
  recs[0].E_R = 2.0;
  recs[1].E_L = 5.0;
  recs[1].E_R = 4.0;
  normalized_energy(recs);
  CHECK(recs[0].E_bar == -0.25);
  CHECK(recs[1].E_bar == 0.25);
}

TEST_CASE("volume series") {
  CHECK(volume_series({}, 2.0) == std::vector<double>{0.0});
  std::vector<DiagnosticsRecord> recs(2);
  recs[0].volume = 2.5;
  recs[0].source_increment = 0.5;
  recs[1].volume = 2.75;
  recs[1].source_increment = 0.125;
  const std::vector<double> d = volume_series(recs, 2.0);
  REQUIRE(d.size() == 3);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 0.125);
}

TEST_CASE("lemma residuals: zero field, matched quadrature, solved field") {
  const SurfaceGrid g = tank_grid(16);
  const VolumeMesh m = build_extruded_mesh(g, 8);
  const std::size_t nu = 2 * (m.num_vertices() + m.num_edges());
  const LemmaResiduals z = lemma_residuals(m, g, Eigen::VectorXd::Zero(nu),
                                           [](double) { return 1.0; }, 9.82);
  CHECK(z.r1 == 0.0);
  CHECK(z.r2 == 0.0);

  // w = h, the discrete height itself.
  const auto w = [&](double x) {
    const auto it = std::upper_bound(g.x.begin(), g.x.end(), x);
    const std::size_t c = std::min<std::size_t>(g.num_cells() - 1, std::max<std::ptrdiff_t>(0, it - g.x.begin() - 1));
    return g.h[c] + g.slope(c) * (x - g.x[c]);
  };
  for (std::uint64_t seed : {1, 2}) {
    const Eigen::VectorXd u = testfields::random_field(m, seed);
    const LemmaResiduals r = lemma_residuals(m, g, u, w, 9.82);
    double wnorm = 0.0;
    for (double h : g.h) {
      wnorm = std::max(wnorm, std::abs(h));
    }
    CHECK(r.r1 <= 1e-12 * u.lpNorm<Eigen::Infinity>() * wnorm * (g.x.back() - g.x.front()));
  }

  const StokesSolution s = solve_newtonian(m, g, tank_case().fluid);
  const LemmaResiduals r = lemma_residuals(m, g, s.u, [](double) { return 1.0; }, 9.82);
  CHECK(r.r2 <= 1e-8 * std::abs(r.volume_form));
  // w = 1 with discrete incompressibility: the net surface flux vanishes.
  CHECK(std::abs(r.surface_form) <= 1e-9 * s.u.lpNorm<Eigen::Infinity>());
}

TEST_CASE("total variation") {
  CHECK(total_variation({}) == 0.0);
  CHECK(total_variation({1.0}) == 0.0);
  CHECK(total_variation({0.0, 1.0, -1.0, 2.0}) == 6.0);
}
