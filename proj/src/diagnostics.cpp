#include "fsstokes/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fsstokes/quadrature.hpp"

namespace fsstokes {

namespace {

template <class F>
void for_each_volume_point(const VolumeMesh& mesh, const Eigen::VectorXd& u, F&& visit) {
  const FunctionSpace V = velocity_space(mesh);
  const QuadratureRule& rule = triangle_rule();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const CellFrame frame = cell_frame(mesh, t);
    const Eigen::Matrix2d jinv = frame.inverse_transpose.transpose();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix<double, 6, 2> G = p2_reference_gradients(rule.points[q]) * jinv;
      Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 6; ++a) {
        const int n = V.node(t, a);
        grad.row(0) += u[2 * n] * G.row(a);
        grad.row(1) += u[2 * n + 1] * G.row(a);
      }
      const Eigen::Matrix2d D = 0.5 * (grad + grad.transpose());
      visit(t, q, rule.weights[q] * frame.det, D);
    }
  }
}

}  // namespace

double strain_energy(const VolumeMesh& mesh, const Eigen::VectorXd& u, const QuadratureField& mu) {
  double e = 0.0;
  for_each_volume_point(mesh, u, [&](std::size_t t, std::size_t q, double w, const Eigen::Matrix2d& D) {
    e += w * mu(t, q) * D.squaredNorm();
  });
  return e;
}

double lp_strain_norm(const VolumeMesh& mesh, const Eigen::VectorXd& u, double mu0, double p) {
  double e = 0.0;
  for_each_volume_point(mesh, u, [&](std::size_t, std::size_t, double w, const Eigen::Matrix2d& D) {
    e += w * std::pow(D.norm(), p);
  });
  return mu0 * e;
}

double surface_l2_sq(const SurfaceGrid& grid, const std::vector<double>& h) {
  double s = 0.0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const double a = h[c], b = h[c + 1];
    s += grid.cell_diameter(c) * (a * a + a * b + b * b) / 3.0;
  }
  return s;
}

namespace {

// Sum over cells and line_rule() points of w dx f(x) g(xi) for a P1 g.
template <class F>
double surface_quadrature(const SurfaceGrid& grid, F&& integrand) {
  const QuadratureRule& rule = line_rule();
  double s = 0.0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const double dx = grid.cell_diameter(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x();
      s += rule.weights[q] * dx * integrand(c, q, xi, grid.x[c] + xi * dx);
    }
  }
  return s;
}

}  // namespace

double surface_inner(const SurfaceGrid& grid, const std::function<double(double)>& f,
                     const std::vector<double>& h) {
  return surface_quadrature(grid, [&](std::size_t c, std::size_t, double xi, double x) {
    return f(x) * ((1.0 - xi) * h[c] + xi * h[c + 1]);
  });
}

double surface_norm_sq(const SurfaceGrid& grid, const std::function<double(double)>& f) {
  return surface_quadrature(grid, [&](std::size_t, std::size_t, double, double x) {
    const double v = f(x);
    return v * v;
  });
}

double surface_integral(const SurfaceGrid& grid, const std::function<double(double)>& f) {
  return surface_quadrature(grid, [&](std::size_t, std::size_t, double, double x) { return f(x); });
}

EnergySides energy_sides(const SurfaceGrid& grid, const std::vector<double>& h_prev,
                         const std::vector<double>& h_new, double strain, double dt, double rho_g,
                         const SourceFn& a, double t) {
  const auto at = [&](double x) { return a(x, t); };
  EnergySides e;
  e.E_L = surface_l2_sq(grid, h_new) + 4.0 * dt / rho_g * strain;
  e.E_R = surface_l2_sq(grid, h_prev) + 2.0 * dt * surface_inner(grid, at, h_prev) +
          dt * dt * surface_norm_sq(grid, at);
  return e;
}

std::vector<double> normalized_energy(const std::vector<double>& E_L,
                                      const std::vector<double>& E_R) {
  if (E_L.empty() || E_L.size() != E_R.size()) {
    throw ParameterError("normalized energy needs a non-empty ledger");
  }
  double scale = 0.0;
  for (double e : E_R) {
    scale = std::max(scale, std::abs(e));
  }
  std::vector<double> out(E_L.size());
  for (std::size_t n = 0; n < E_L.size(); ++n) {
    out[n] = (E_L[n] - E_R[n]) / scale;
  }
  return out;
}

std::vector<double> normalized_energy(std::vector<DiagnosticsRecord>& records) {
  std::vector<double> L, R;
  for (const auto& r : records) {
    L.push_back(r.E_L);
    R.push_back(r.E_R);
  }
  std::vector<double> e = normalized_energy(L, R);
  for (std::size_t n = 0; n < records.size(); ++n) {
    records[n].E_bar = e[n];
  }
  return e;
}

std::vector<double> volume_series(const std::vector<DiagnosticsRecord>& records,
                                  double initial_volume) {
  std::vector<double> drift;
  drift.reserve(records.size() + 1);
  drift.push_back(0.0);
  double sources = 0.0;
  for (const auto& r : records) {
    sources += r.source_increment;
    drift.push_back(r.volume - initial_volume - sources);
  }
  return drift;
}

SurfaceFlux surface_flux(const SurfaceGrid& grid, const SurfaceTrace& trace, const SourceFn& a,
                         double t) {
  // omega (u.n) ds = (-s u_x + u_z) dx, so both integrals live on dx.
  SurfaceFlux f;
  f.normal_sq = surface_quadrature(grid, [&](std::size_t c, std::size_t q, double, double) {
    const double un = -grid.slope(c) * trace.ux[c][q] + trace.uz[c][q];
    return un * un;
  });
  f.source = surface_quadrature(grid, [&](std::size_t c, std::size_t q, double, double x) {
    return (-grid.slope(c) * trace.ux[c][q] + trace.uz[c][q]) * a(x, t);
  });
  return f;
}

LemmaResiduals lemma_residuals(const VolumeMesh& mesh, const SurfaceGrid& grid,
                               const Eigen::VectorXd& u, const std::function<double(double)>& w,
                               double rho_g) {
  const FunctionSpace V = velocity_space(mesh);
  const QuadratureRule& line = line_rule();
  LemmaResiduals r;

  // Surface-grid side: P2 trace on the line basis, slope from the grid.
  double surface_form = 0.0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const BoundaryFacet& f = mesh.facets[mesh.column_top_facet[c]];
    const int nodes[3] = {f.vertices[0], f.vertices[1], static_cast<int>(mesh.num_vertices()) + f.edge};
    const double dx = grid.cell_diameter(c);
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double xi = line.points[q].x();
      const Eigen::Vector3d N = p2_line_basis(xi);
      double ux = 0.0, uz = 0.0;
      for (int k = 0; k < 3; ++k) {
        ux += N[k] * u[2 * nodes[k]];
        uz += N[k] * u[2 * nodes[k] + 1];
      }
      surface_form += line.weights[q] * dx * (-ux * grid.slope(c) + uz) * w(grid.x[c] + xi * dx);
    }
  }

  // Boundary side: facet geometry from the mesh, velocity from the triangle.
  double boundary_w = 0.0, boundary_z = 0.0;
  for (const BoundaryFacet& f : mesh.facets) {
    if (f.marker != BoundaryMarker::surface) {
      continue;
    }
    const Vec2 p0 = mesh.vertices[f.vertices[0]];
    const Vec2 p1 = mesh.vertices[f.vertices[1]];
    const Vec2 tangent = p1 - p0;
    const double length = tangent.norm();
    const Vec2 normal(-tangent.y() / length, tangent.x() / length);
    const CellFrame frame = cell_frame(mesh, static_cast<std::size_t>(f.triangle));
    const Eigen::Matrix2d jinv = frame.inverse_transpose.transpose();
    for (std::size_t q = 0; q < line.size(); ++q) {
      const Vec2 x = p0 + line.points[q].x() * tangent;
      const Vec2 ref = jinv * (x - frame.origin);
      const double un = velocity_at(V, u, static_cast<std::size_t>(f.triangle), ref).dot(normal);
      const double ds = line.weights[q] * length;
      boundary_w += ds * un * w(x.x());
      boundary_z += ds * un * x.y();
    }
  }

  double volume_z = 0.0;
  const QuadratureRule& tri = triangle_rule();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const CellFrame frame = cell_frame(mesh, t);
    for (std::size_t q = 0; q < tri.size(); ++q) {
      volume_z += tri.weights[q] * frame.det * velocity_at(V, u, t, tri.points[q]).y();
    }
  }

  r.surface_form = surface_form;
  r.volume_form = rho_g * volume_z;
  r.r1 = std::abs(surface_form - boundary_w);
  r.r2 = std::abs(-rho_g * volume_z + rho_g * boundary_z);
  return r;
}

double total_variation(const std::vector<double>& h) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    tv += std::abs(h[i + 1] - h[i]);
  }
  return tv;
}

}  // namespace fsstokes
