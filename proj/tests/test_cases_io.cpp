#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fsstokes/cases.hpp"
#include "fsstokes/config.hpp"
#include "fsstokes/output.hpp"
#include "fsstokes/schemes.hpp"
#include "oracles.hpp"

using namespace fsstokes;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string csv_of(const std::vector<DiagnosticsRecord>& recs) {
  std::ostringstream out;
  write_ledger_csv(recs, out);
  return out.str();
}

// Minimal legacy VTK reader: positions, connectivity and point vectors.
struct VtkData {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> cells;
  std::vector<Vec2> u;
  std::vector<double> pi;
};

VtkData read_vtk(std::istream& in) {
  VtkData d;
  std::string word;
  while (in >> word) {
    if (word == "POINTS") {
      std::size_t n;
      in >> n >> word;
      d.points.resize(n);
      for (auto& p : d.points) {
        double z;
        in >> p.x() >> p.y() >> z;
      }
    } else if (word == "CELLS") {
      std::size_t n, total;
      in >> n >> total;
      d.cells.resize(n);
      for (auto& c : d.cells) {
        int k;
        in >> k >> c[0] >> c[1] >> c[2];
      }
    } else if (word == "VECTORS") {
      in >> word >> word;
      d.u.resize(d.points.size());
      for (auto& v : d.u) {
        double z;
        in >> v.x() >> v.y() >> z;
      }
    } else if (word == "LOOKUP_TABLE") {
      in >> word;
      d.pi.resize(d.points.size());
      for (double& v : d.pi) {
        in >> v;
      }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("tank initial height and source") {
  const CaseConfig c = tank_case();
  CHECK(c.height(0.5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c.height(-1.0) == doctest::Approx(0.5 * std::tanh(-3.0) + 0.2).epsilon(1e-15));
  CHECK(c.bedrock(0.3) == -1.0);
  CHECK(c.source(0.7, 1.0) == 0.0);
  const CaseConfig s = tank_case(true);
  CHECK(s.source(0.0, 1.0) == 0.0);
  CHECK(s.source(0.5, 0.0) == 0.0);
  CHECK(s.source(0.5, M_PI / 4.0) ==
        doctest::Approx(0.2 * 0.25 * (0.3 + std::sin(0.5))).epsilon(1e-15));

  CaseConfig bump = tank_case();
  bump.step_amplitude = 0.1;
  rebuild_case(bump);
  CHECK(bump.height(0.0) == doctest::Approx(c.height(0.0) + 0.1).epsilon(1e-15));
  CHECK(bump.height(0.5) == c.height(0.5));
}

TEST_CASE("synthetic ice slice: seeded, positive thickness") {
  const SurfaceGrid a = initial_grid(greenland_synthetic_case(1));
  const SurfaceGrid b = initial_grid(greenland_synthetic_case(1));
  const SurfaceGrid c = initial_grid(greenland_synthetic_case(2));
  CHECK(a.h == b.h);
  CHECK(a.b == b.b);
  CHECK(a.h != c.h);

  const CaseConfig gc = greenland_synthetic_case(1);
  for (int i = 0; i <= 2000; ++i) {
    const double x = gc.x0 + (gc.x1 - gc.x0) * i / 2000.0;
    CHECK(gc.height(x) - gc.bedrock(x) >= 100.0);
    CHECK(std::abs(gc.bedrock(x)) <= 400.0 + 1e-9);
  }
  double hmax = 0.0;
  for (double h : a.h) {
    hmax = std::max(hmax, h);
  }
  CHECK(hmax > 2500.0);
  CHECK(hmax < 3500.0);

  double vol = 0.0;
  for (std::size_t k = 0; k < a.num_cells(); ++k) {
    const double t0 = a.h[k] - a.b[k], t1 = a.h[k + 1] - a.b[k + 1];
    const double x0 = a.x[k], dx = a.cell_diameter(k);
    vol += oracle::integrate([&](double x) { return t0 + (t1 - t0) * (x - x0) / dx; }, x0, x0 + dx);
  }
  CHECK(domain_volume(a) == doctest::Approx(vol).epsilon(1e-13));
}

TEST_CASE("config round trip and unit conversion") {
  SimConfig cfg;
  cfg.problem = tank_case(true);
  cfg.problem.nx = 17;
  cfg.problem.step_amplitude = 0.05;
  rebuild_case(cfg.problem);
  cfg.scheme = SchemeKind::EE_FSSA;
  cfg.dt = 0.1 / 3.0;
  cfg.edge_stabilization = false;
  cfg.output.csv_path = "ledger.csv";
  const std::string text = serialize_config(cfg);
  const SimConfig back = parse_config(text);
  CHECK(back.scheme == cfg.scheme);
  CHECK(back.dt == cfg.dt);
  CHECK(back.problem.nx == 17);
  CHECK(back.problem.source_enabled);
  CHECK(back.problem.step_amplitude == 0.05);
  CHECK_FALSE(back.edge_stabilization);
  CHECK(back.output.csv_path == "ledger.csv");
  CHECK(back.problem.height(0.0) == cfg.problem.height(0.0));
  CHECK(serialize_config(back) == text);

  const SimConfig g = parse_config("case = greenland-synthetic\nscheme = EE_STAB\ndt_years = 50\n");
  CHECK(g.dt == 50.0 * 31556926.0);
  CHECK(g.problem.units == UnitSystem::si_years);
  CHECK(parse_config(serialize_config(g)).problem.fluid.mu0 == g.problem.fluid.mu0);

  const SimConfig commented =
      parse_config("# tank\ncase = tank   # default case\n\nscheme = IE\ndt = 0.25\n");
  CHECK(commented.scheme == SchemeKind::IE);
  CHECK(commented.dt == 0.25);
}

TEST_CASE("config errors carry the line number") {
  CHECK(error_line("case = tank\nscheme = IE\ndt = 1\nbogus = 3\n") == 4);
  CHECK(error_line("case = tank\nscheme = IE\ndt = fast\n") == 3);
  CHECK(error_line("case = tank\nnx = 2.5\nscheme = IE\ndt = 1\n") == 2);
  CHECK(error_line("case = tank\nscheme = RK4\ndt = 1\n") == 2);
  CHECK(error_line("case = tank\nscheme = IE\ndt = 1\ndt = 2\n") == 4);
  CHECK(error_line("case = tank\nscheme = IE\ndt_years = 1\n") == 3);
  CHECK(error_line("case = tank\ndt = 1\n") == 0);
  CHECK_THROWS_WITH_AS(parse_config("case = tank\nscheme = IE\n"), doctest::Contains("dt"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("case = tank\nscheme = IE\ndt = 1\nbogus = 3\n"),
                       doctest::Contains("line 4"), ConfigError);
}

TEST_CASE("ledger CSV layout and determinism") {
  const std::string empty = csv_of({});
  CHECK(empty == "step,t,h_l2_sq,strain_energy,E_L,E_R,E_bar,volume,volume_drift,picard_iters,outer_iters\n");

  SimConfig cfg;
  cfg.problem = tank_case();
  cfg.problem.nx = cfg.problem.ny = 6;
  cfg.problem.t_final = 0.5;
  cfg.dt = 0.5;
  const std::string one = csv_of(run(cfg).records);
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  CHECK(one.rfind("1,0.5,", empty.size()) == empty.size());
  CHECK(csv_of(run(cfg).records) == one);

  const auto path = std::filesystem::temp_directory_path() / "fsstokes_ledger_test.csv";
  write_ledger_csv(run(cfg).records, path.string());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == one);
  std::filesystem::remove(path);
  CHECK_THROWS(write_ledger_csv({}, std::string("/nonexistent-dir/x.csv")));
}

TEST_CASE("VTK output reads back through an independent parser") {
  SimConfig cfg;
  cfg.problem = tank_case();
  cfg.problem.nx = 5;
  cfg.problem.ny = 3;
  const SimState s = initial_state(cfg);
  const StokesSolution sol = solve_at_state(s, cfg, cfg.dt);
  std::stringstream out;
  write_vtk(s.mesh, sol, out);
  CHECK(out.str().rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  const VtkData d = read_vtk(out);
  REQUIRE(d.points.size() == s.mesh.num_vertices());
  REQUIRE(d.cells.size() == s.mesh.num_triangles());
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    CHECK((d.points[i] - s.mesh.vertices[i]).norm() <= 1e-15);
    CHECK(std::abs(d.u[i].x() - sol.u[2 * i]) <= 1e-15 * (1.0 + std::abs(sol.u[2 * i])));
    CHECK(std::abs(d.u[i].y() - sol.u[2 * i + 1]) <= 1e-15 * (1.0 + std::abs(sol.u[2 * i + 1])));
    CHECK(std::abs(d.pi[i] - sol.pi[i]) <= 1e-15 * (1.0 + std::abs(sol.pi[i])));
  }
  for (std::size_t t = 0; t < d.cells.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      CHECK(d.cells[t][k] == s.mesh.triangles[t][k]);
    }
  }
}
