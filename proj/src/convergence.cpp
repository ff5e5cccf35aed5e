#include "fsstokes/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fsstokes/config.hpp"
#include "fsstokes/fem.hpp"
#include "fsstokes/freesurface.hpp"
#include "fsstokes/quadrature.hpp"

namespace fsstokes {

ConvergenceSchedule tank_schedule() {
  ConvergenceSchedule s;
  const double dx_perp[4] = {0.2, 0.1, 0.05, 0.025};
  const double dx[4] = {0.24, 0.11, 0.06, 0.03};
  for (int k = 0; k < 4; ++k) {
    RefinementLevel l;
    l.dt = 0.5 / std::pow(2.0, k);
    l.dx_perp = dx_perp[k];
    l.dx = dx[k];
    l.nx = l.ny = static_cast<std::size_t>(10) << k;
    s.levels.push_back(l);
  }
  s.reference = {0.005, 0.0125, 0.015, 160, 160};
  s.reference_scheme = SchemeKind::EE_UNSTAB_W;
  s.t_final = 1.0;
  s.viscosity = 1.0;
  return s;
}

Snapshot final_snapshot(const SimConfig& cfg) {
  RunResult r = run(cfg);
  if (r.failed) {
    throw std::runtime_error(scheme_name(cfg.scheme) + " run failed: " + r.failure);
  }
  Snapshot snap;
  const SimState& s = r.final_state;
  const double dt = r.records.empty() ? cfg.dt : r.records.back().dt;
  snap.u = solve_at_state(s, cfg, dt).u;
  snap.grid = s.grid;
  snap.mesh = s.mesh;
  snap.source = serialize_config(cfg);
  snap.t = s.t;
  return snap;
}

void save_snapshot(const Snapshot& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out.precision(17);
  out << "fsstokes-snapshot 2\n";
  const auto lines = std::count(snap.source.begin(), snap.source.end(), '\n');
  out << lines << '\n' << snap.source;
  out << snap.mesh.nx << ' ' << snap.mesh.ny << ' ' << snap.t << ' ' << snap.u.size() << '\n';
  for (const auto* v : {&snap.grid.x, &snap.grid.h, &snap.grid.b}) {
    for (double d : *v) {
      out << d << '\n';
    }
  }
  for (Eigen::Index i = 0; i < snap.u.size(); ++i) {
    out << snap.u[i] << '\n';
  }
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "fsstokes-snapshot" || version != 2) {
    throw std::runtime_error("'" + path + "' is not a snapshot file");
  }
  std::size_t nx = 0, ny = 0;
  Eigen::Index nu = 0;
  Snapshot snap;
  long lines = 0;
  in >> lines;
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  for (std::string line; lines > 0 && std::getline(in, line); --lines) {
    snap.source += line + '\n';
  }
  in >> nx >> ny >> snap.t >> nu;
  for (auto* v : {&snap.grid.x, &snap.grid.h, &snap.grid.b}) {
    v->resize(nx + 1);
    for (double& d : *v) {
      in >> d;
    }
  }
  snap.u.resize(nu);
  for (Eigen::Index i = 0; i < nu; ++i) {
    in >> snap.u[i];
  }
  if (!in) {
    throw std::runtime_error("'" + path + "' is truncated");
  }
  snap.mesh = build_extruded_mesh(snap.grid, ny);
  if (static_cast<std::size_t>(nu) != 2 * (snap.mesh.num_vertices() + snap.mesh.num_edges())) {
    throw std::runtime_error("'" + path + "': velocity size does not match the mesh");
  }
  return snap;
}

PointLocator::PointLocator(const VolumeMesh& mesh) : mesh_(&mesh) {
  x_.resize(mesh.nx + 1);
  for (std::size_t i = 0; i <= mesh.nx; ++i) {
    x_[i] = mesh.vertices[mesh.vertex_index(i, 0)].x();
  }
}

PointLocator::Hit PointLocator::locate(const Vec2& p) const {
  const VolumeMesh& m = *mesh_;
  const auto it = std::upper_bound(x_.begin(), x_.end(), p.x());
  const std::size_t col = std::min<std::size_t>(
      m.nx - 1, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - x_.begin() - 1)));

  // Layer estimate from the relative height inside the column.
  const double xi = (p.x() - x_[col]) / (x_[col + 1] - x_[col]);
  const auto z_at = [&](std::size_t layer) {
    const double zl = m.vertices[m.vertex_index(col, layer)].y();
    const double zr = m.vertices[m.vertex_index(col + 1, layer)].y();
    return (1.0 - xi) * zl + xi * zr;
  };
  const double bottom = z_at(0), top = z_at(m.ny);
  const double zeta = (p.y() - bottom) / (top - bottom);
  const auto guess = static_cast<std::ptrdiff_t>(std::floor(zeta * static_cast<double>(m.ny)));
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(m.ny) - 1;

  Hit best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(guess - 1, 0, last);
       j <= std::clamp<std::ptrdiff_t>(guess + 1, 0, last); ++j) {
    for (int half = 0; half < 2; ++half) {
      const std::size_t cell = 2 * (col * m.ny + static_cast<std::size_t>(j)) + half;
      const CellFrame f = cell_frame(m, cell);
      const Vec2 ref = f.inverse_transpose.transpose() * (p - f.origin);
      const double lmin = std::min({1.0 - ref.x() - ref.y(), ref.x(), ref.y()});
      if (lmin > best_min) {
        best_min = lmin;
        best.cell = cell;
        best.ref = ref;
      }
    }
  }
  return best;
}

namespace {

double interpolate(const SurfaceGrid& g, const std::vector<double>& v, double x) {
  const auto it = std::upper_bound(g.x.begin(), g.x.end(), x);
  const std::size_t c = std::min<std::size_t>(
      g.num_cells() - 1, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - g.x.begin() - 1)));
  const double t = (x - g.x[c]) / g.cell_diameter(c);
  return (1.0 - t) * v[c] + t * v[c + 1];
}

double ratio(double num_sq, double den_sq) {
  return den_sq > 0.0 ? std::sqrt(num_sq / den_sq) : std::sqrt(num_sq);
}

}  // namespace

RelativeErrors relative_errors(const Snapshot& coarse, const Snapshot& reference) {
  const SurfaceGrid& gc = coarse.grid;
  const SurfaceGrid& gr = reference.grid;
  const FunctionSpace Vc = velocity_space(coarse.mesh);
  const FunctionSpace Vr = velocity_space(reference.mesh);
  const PointLocator in_coarse(coarse.mesh);
  const PointLocator in_reference(reference.mesh);

  RelativeErrors e;
  std::vector<double> dh(gc.num_nodes()), href(gc.num_nodes());
  std::vector<double> du(gc.num_nodes()), uref(gc.num_nodes());
  const SurfaceTrace tc = extract_trace(coarse.mesh, coarse.u);
  for (std::size_t i = 0; i < gc.num_nodes(); ++i) {
    href[i] = interpolate(gr, gr.h, gc.x[i]);
    dh[i] = gc.h[i] - href[i];
    const auto hit = in_reference.locate(Vec2(gc.x[i], href[i]));
    uref[i] = velocity_at(Vr, reference.u, hit.cell, hit.ref).x();
    du[i] = tc.node_ux[i] - uref[i];
  }
  e.h = ratio(surface_l2_sq(gc, dh), surface_l2_sq(gc, href));
  e.u_perp = ratio(surface_l2_sq(gc, du), surface_l2_sq(gc, uref));

  const QuadratureRule& rule = triangle_rule();
  double err = 0.0, norm = 0.0;
  for (std::size_t cell = 0; cell < reference.mesh.num_triangles(); ++cell) {
    const CellFrame f = cell_frame(reference.mesh, cell);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * f.det;
      const Vec2 ur = velocity_at(Vr, reference.u, cell, rule.points[q]);
      const auto hit = in_coarse.locate(f.map(rule.points[q]));
      const Vec2 uc = velocity_at(Vc, coarse.u, hit.cell, hit.ref);
      err += w * (uc - ur).squaredNorm();
      norm += w * ur.squaredNorm();
    }
  }
  e.u = ratio(err, norm);
  return e;
}

double fit_order(const std::vector<double>& size, const std::vector<double>& error) {
  if (size.size() != error.size() || size.size() < 2) {
    throw ParameterError("order fit needs at least two matching samples");
  }
  const auto n = static_cast<double>(size.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < size.size(); ++i) {
    const double x = std::log(size[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SimConfig level_config(const SimConfig& base, SchemeKind scheme, const RefinementLevel& level,
                       double t_final) {
  SimConfig cfg = base;
  cfg.scheme = scheme;
  cfg.dt = level.dt;
  cfg.dt_max = scheme == SchemeKind::EE_UNSTAB_W ? level.dt : 0.0;
  cfg.problem.nx = level.nx;
  cfg.problem.ny = level.ny;
  cfg.problem.t_final = t_final;
  cfg.output = {};
  return cfg;
}

namespace {

SimConfig study_base(const SimConfig& base, const ConvergenceSchedule& schedule) {
  SimConfig cfg = base;
  if (schedule.viscosity > 0.0) {
    cfg.problem.fluid.mu0 = schedule.viscosity;
  }
  return cfg;
}

}  // namespace

ConvergenceReport convergence_study(const SimConfig& study, const std::vector<SchemeKind>& schemes,
                                    const ConvergenceSchedule& schedule,
                                    const Snapshot& reference) {
  const SimConfig base = study_base(study, schedule);
  ConvergenceReport report;
  report.schedule = schedule;
  for (SchemeKind kind : schemes) {
    SchemeConvergence sc;
    sc.scheme = kind;
    std::vector<double> size, eh, eup, eu;
    for (const RefinementLevel& level : schedule.levels) {
      LevelResult lr;
      lr.level = level;
      try {
        const Snapshot snap = final_snapshot(level_config(base, kind, level, schedule.t_final));
        lr.errors = relative_errors(snap, reference);
        size.push_back(level.dx_perp);
        eh.push_back(lr.errors.h);
        eup.push_back(lr.errors.u_perp);
        eu.push_back(lr.errors.u);
      } catch (const std::exception& ex) {
        lr.failed = true;
        lr.failure = ex.what();
      }
      sc.levels.push_back(lr);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool enough = size.size() >= 3;
    sc.order_h = enough ? fit_order(size, eh) : nan;
    sc.order_u_perp = enough ? fit_order(size, eup) : nan;
    sc.order_u = enough ? fit_order(size, eu) : nan;
    report.schemes.push_back(std::move(sc));
  }
  return report;
}

Snapshot reference_snapshot(const SimConfig& base, const ConvergenceSchedule& schedule,
                            const std::string& cache_path) {
  const RefinementLevel& ref = schedule.reference;
  const SimConfig cfg =
      level_config(study_base(base, schedule), schedule.reference_scheme, ref, schedule.t_final);
  if (!cache_path.empty()) {
    std::ifstream probe(cache_path);
    if (probe) {
      try {
        Snapshot snap = load_snapshot(cache_path);
        if (snap.source == serialize_config(cfg)) {
          return snap;
        }
      } catch (const std::exception&) {
        // Unreadable or stale cache: recompute below.
      }
    }
  }
  Snapshot snap = final_snapshot(cfg);
  if (!cache_path.empty()) {
    save_snapshot(snap, cache_path);
  }
  return snap;
}

}  // namespace fsstokes
