#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fields.hpp"
#include "fsstokes/convergence.hpp"

using namespace fsstokes;

namespace {

Snapshot small_snapshot(std::size_t n, double t_final) {
  SimConfig cfg;
  cfg.problem = tank_case();
  cfg.problem.nx = cfg.problem.ny = n;
  cfg.problem.t_final = t_final;
  cfg.dt = 0.25;
  return final_snapshot(cfg);
}

}  // namespace

TEST_CASE("tank schedule") {
  const ConvergenceSchedule s = tank_schedule();
  REQUIRE(s.levels.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(s.levels[k].dt == 0.5 / std::pow(2.0, k));
    CHECK(s.levels[k].nx == 10u << k);
    CHECK(s.levels[k].ny == s.levels[k].nx);
  }
  CHECK(s.reference.nx == 160);
  CHECK(s.reference.dt <= 0.005);
  CHECK(s.reference_scheme == SchemeKind::EE_UNSTAB_W);
  CHECK(s.t_final == 1.0);
  CHECK(s.viscosity == 1.0);
}

TEST_CASE("fit_order recovers exact power laws") {
  const std::vector<double> size = {0.4, 0.2, 0.1, 0.05};
  for (double q : {1.0, 1.5, 2.0}) {
    std::vector<double> err;
    for (double s : size) {
      err.push_back(3.0 * std::pow(s, q));
    }
    CHECK(fit_order(size, err) == doctest::Approx(q).epsilon(1e-12));
  }
  CHECK_THROWS(fit_order({1.0}, {1.0}));
}

TEST_CASE("point locator finds centroids and reference coordinates") {
  const SurfaceGrid g = make_uniform_grid(-1.0, 1.0, 7, [](double x) { return 0.3 + 0.2 * x; },
                                          [](double x) { return -1.0 + 0.1 * x * x; });
  const VolumeMesh m = build_extruded_mesh(g, 4);
  const PointLocator loc(m);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
    const PointLocator::Hit hit = loc.locate((a + b + c) / 3.0);
    CHECK(hit.cell == t);
    CHECK(hit.ref.x() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(hit.ref.y() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  // Slightly above the surface still lands in the top triangle of its column.
  const PointLocator::Hit above = loc.locate(Vec2(0.05, 0.3 + 0.01 + 1e-3));
  const BoundaryFacet& top = m.facets[m.column_top_facet[3]];
  CHECK(above.cell == top.triangle);
}

TEST_CASE("self comparison has zero error, snapshots round trip") {
  const Snapshot s = small_snapshot(6, 0.5);
  const RelativeErrors e = relative_errors(s, s);
  CHECK(e.h <= 1e-15);
  CHECK(e.u_perp <= 1e-15);
  CHECK(e.u <= 1e-14);

  const auto path = std::filesystem::temp_directory_path() / "fsstokes_snapshot_test.snap";
  save_snapshot(s, path.string());
  const Snapshot back = load_snapshot(path.string());
  std::filesystem::remove(path);
  CHECK(back.t == s.t);
  CHECK(back.grid.h == s.grid.h);
  CHECK(back.grid.x == s.grid.x);
  CHECK(back.u == s.u);
  CHECK_FALSE(s.source.empty());
  CHECK(back.source == s.source);
  CHECK(back.mesh.num_triangles() == s.mesh.num_triangles());
  CHECK_THROWS(load_snapshot("/nonexistent-dir/none.snap"));
}

TEST_CASE("errors against a finer run shrink with refinement") {
  const Snapshot fine = small_snapshot(24, 0.5);
  const RelativeErrors coarse = relative_errors(small_snapshot(6, 0.5), fine);
  const RelativeErrors mid = relative_errors(small_snapshot(12, 0.5), fine);
  CHECK(mid.h < coarse.h);
  CHECK(mid.u < coarse.u);
  CHECK(coarse.h > 0.0);
}

TEST_CASE("reference cache is keyed on the producing configuration") {
  ConvergenceSchedule sched;
  sched.reference = {0.25, 0.25, 0.25, 6, 6};
  sched.reference_scheme = SchemeKind::EE_STAB;
  sched.t_final = 0.5;
  sched.viscosity = 1.0;
  SimConfig base;
  base.problem = tank_case();
  const auto path = std::filesystem::temp_directory_path() / "fsstokes_reference_test.snap";
  std::filesystem::remove(path);

  const Snapshot first = reference_snapshot(base, sched, path.string());
  CHECK(std::filesystem::exists(path));
  CHECK(first.source.find("mu0 = 1\n") != std::string::npos);
  // A planted cache file with matching configuration is returned as is.
  Snapshot planted = first;
  planted.u *= 2.0;
  save_snapshot(planted, path.string());
  CHECK(reference_snapshot(base, sched, path.string()).u == planted.u);
  // A different viscosity invalidates it.
  sched.viscosity = 0.5;
  const Snapshot other = reference_snapshot(base, sched, path.string());
  CHECK(other.source.find("mu0 = 0.5\n") != std::string::npos);
  CHECK(load_snapshot(path.string()).source == other.source);
  std::filesystem::remove(path);
}
