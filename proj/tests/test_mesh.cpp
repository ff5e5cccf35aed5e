#include <cmath>
#include <random>
#include <map>
#include <set>

#include "doctest.h"
#include "fsstokes/cases.hpp"
#include "fsstokes/mesh.hpp"
#include "oracles.hpp"

using namespace fsstokes;

namespace {

SurfaceGrid flat_grid(double x0, double x1, std::size_t cells, double h, double b) {
  return make_uniform_grid(x0, x1, cells, [h](double) { return h; }, [b](double) { return b; });
}

// Integral of the piecewise-linear interpolant of h - b, cell by cell.
double interpolant_volume(const SurfaceGrid& g) {
  double v = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const double t0 = g.thickness(c), t1 = g.thickness(c + 1);
    const double x0 = g.x[c], x1 = g.x[c + 1];
    v += oracle::integrate([&](double x) { return t0 + (t1 - t0) * (x - x0) / (x1 - x0); }, x0, x1);
  }
  return v;
}

SurfaceGrid random_grid(std::mt19937_64& rng, std::size_t cells) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SurfaceGrid g;
  double x = -1.0;
  for (std::size_t i = 0; i <= cells; ++i) {
    g.x.push_back(x);
    x += 0.1 + u(rng);
    g.b.push_back(-0.5 * u(rng));
    g.h.push_back(0.2 + 2.0 * u(rng));
  }
  return g;
}

}  // namespace

TEST_CASE("smallest extrusion has the structured counts") {
  const SurfaceGrid g = flat_grid(-1.0, 1.0, 2, 1.0, 0.0);
  const VolumeMesh m = build_extruded_mesh(g, 1);
  CHECK(m.num_vertices() == 6);
  CHECK(m.num_triangles() == 4);
  int count[3] = {0, 0, 0};
  for (const auto& f : m.facets) {
    ++count[static_cast<int>(f.marker)];
  }
  CHECK(count[static_cast<int>(BoundaryMarker::surface)] == 2);
  CHECK(count[static_cast<int>(BoundaryMarker::bottom)] == 2);
  CHECK(count[static_cast<int>(BoundaryMarker::lateral)] == 2);
}

TEST_CASE("vertex count is nodes times layers plus one") {
  std::mt19937_64 rng(7);
  for (std::size_t k : {1, 3, 8}) {
    const SurfaceGrid g = random_grid(rng, 5);
    CHECK(build_extruded_mesh(g, k).num_vertices() == g.num_nodes() * (k + 1));
  }
}

TEST_CASE("tank mesh area equals the volume oracle") {
  CaseConfig c = tank_case();
  c.nx = c.ny = 120;
  const SurfaceGrid g = initial_grid(c);
  const VolumeMesh m = build_extruded_mesh(g, 120);
  const double ref = interpolant_volume(g);
  CHECK(std::abs(m.total_area() - ref) <= 1e-12 * ref);
  CHECK(std::abs(domain_volume(g) - ref) <= 1e-12 * ref);
}

TEST_CASE("domain volume closed forms") {
  CHECK(domain_volume(flat_grid(-1.0, 1.0, 4, 1.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(domain_volume(flat_grid(0.0, 3.0, 7, 0.75, 0.25)) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("tank initial volume equals the Gauss oracle") {
  const CaseConfig c = tank_case();
  const SurfaceGrid g = initial_grid(c);
  const double ref = interpolant_volume(g);
  CHECK(std::abs(domain_volume(g) - ref) <= 1e-12 * ref);
  CHECK(c.height(0.5) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("property: domain volume equals triangle area for any grid and layer count") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SurfaceGrid g = random_grid(rng, 1 + trial % 9);
    const double v = domain_volume(g);
    for (std::size_t ny : {1, 2, 5}) {
      const VolumeMesh m = build_extruded_mesh(g, ny);
      CHECK(std::abs(m.total_area() - v) <= 1e-12 * v);
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        CHECK(m.triangle_area(t) > 0.0);
      }
    }
  }
}

TEST_CASE("surface vertices lie on h and bottom vertices on b") {
  std::mt19937_64 rng(3);
  const SurfaceGrid g = random_grid(rng, 6);
  const VolumeMesh m = build_extruded_mesh(g, 4);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    CHECK(m.vertices[m.vertex_index(i, 0)].y() == g.b[i]);
    CHECK(m.vertices[m.vertex_index(i, 4)].y() == g.h[i]);
  }
  REQUIRE(m.column_top_facet.size() == g.num_cells());
  std::set<int> seen;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const BoundaryFacet& f = m.facets[m.column_top_facet[c]];
    CHECK(f.marker == BoundaryMarker::surface);
    CHECK(m.vertices[f.vertices[0]].x() == g.x[c]);
    CHECK(m.vertices[f.vertices[1]].x() == g.x[c + 1]);
    seen.insert(m.column_top_facet[c]);
  }
  CHECK(seen.size() == g.num_cells());
}

TEST_CASE("boundary markers partition the boundary") {
  std::mt19937_64 rng(5);
  const SurfaceGrid g = random_grid(rng, 4);
  const VolumeMesh m = build_extruded_mesh(g, 3);
  // Every edge used by exactly one triangle is a boundary facet, once.
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++uses[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::set<std::pair<int, int>> facet_set;
  for (const auto& f : m.facets) {
    const auto key = std::make_pair(std::min(f.vertices[0], f.vertices[1]),
                                    std::max(f.vertices[0], f.vertices[1]));
    CHECK(facet_set.insert(key).second);
  }
  std::size_t boundary = 0;
  for (const auto& [key, n] : uses) {
    if (n == 1) {
      ++boundary;
      CHECK(facet_set.count(key) == 1);
    }
  }
  CHECK(boundary == m.facets.size());
}

TEST_CASE("non-positive thickness is rejected with the node named") {
  SurfaceGrid g = flat_grid(0.0, 1.0, 3, 1.0, 0.0);
  g.h[2] = 0.0;
  CHECK_THROWS_AS(build_extruded_mesh(g, 2), GeometryError);
  try {
    build_extruded_mesh(g, 2);
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
}

TEST_CASE("remap: identity, stretch, area and round trip") {
  std::mt19937_64 rng(9);
  SurfaceGrid g = random_grid(rng, 5);
  for (double& b : g.b) {
    b = 0.0;
  }
  const VolumeMesh m = build_extruded_mesh(g, 4);

  const VolumeMesh same = remap_vertical(m, g, g);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(same.vertices[i] == m.vertices[i]);
  }

  SurfaceGrid g2 = g;
  for (double& h : g2.h) {
    h *= 2.0;
  }
  const VolumeMesh stretched = remap_vertical(m, g, g2);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(stretched.vertices[i].y() == doctest::Approx(2.0 * m.vertices[i].y()).epsilon(1e-15));
  }

  SurfaceGrid g3 = g;
  std::uniform_real_distribution<double> u(0.3, 1.5);
  for (double& h : g3.h) {
    h = u(rng);
  }
  const VolumeMesh moved = remap_vertical(m, g, g3);
  const double ref = interpolant_volume(g3);
  CHECK(std::abs(moved.total_area() - ref) <= 1e-12 * ref);
  const VolumeMesh back = remap_vertical(moved, g3, g);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(std::abs(back.vertices[i].y() - m.vertices[i].y()) <= 1e-14);
  }

  SurfaceGrid bad = g;
  bad.h[1] = -0.1;
  CHECK_THROWS_AS(remap_vertical(m, g, bad), GeometryError);
}

TEST_CASE("surface geometry closed forms") {
  const auto sloped = [](double s) {
    return make_uniform_grid(0.0, 1.0, 1, [s](double x) { return 1.0 + s * x; },
                             [](double) { return 0.0; });
  };
  SurfaceGeometry g0 = surface_geometry(sloped(0.0), 0);
  CHECK(g0.normal.x() == 0.0);
  CHECK(g0.normal.y() == 1.0);
  CHECK(g0.omega == 1.0);
  SurfaceGeometry g1 = surface_geometry(sloped(1.0), 0);
  CHECK(g1.normal.x() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(g1.normal.y() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(g1.omega == doctest::Approx(std::sqrt(2.0)));
  SurfaceGeometry g2 = surface_geometry(sloped(0.75), 0);
  CHECK(g2.normal.x() == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(g2.normal.y() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g2.omega == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("property: unit normal and omega n_z = 1 on every cell") {
  std::mt19937_64 rng(13);
  const SurfaceGrid g = random_grid(rng, 30);
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const SurfaceGeometry s = surface_geometry(g, c);
    CHECK(std::abs(s.normal.norm() - 1.0) <= 1e-15);
    CHECK(std::abs(s.omega * s.normal.y() - 1.0) <= 1e-15);
  }
}
