#include "fsstokes/output.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fsstokes {

namespace {

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  return out;
}

void check_written(const std::ofstream& out, const std::string& path) {
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

}  // namespace

void write_ledger_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& out) {
  out.precision(17);
  out << "step,t,h_l2_sq,strain_energy,E_L,E_R,E_bar,volume,volume_drift,picard_iters,outer_iters\n";
  for (const auto& r : records) {
    out << r.step << ',' << r.t << ',' << r.h_l2_sq << ',' << r.strain_energy << ',' << r.E_L << ','
        << r.E_R << ',' << r.E_bar << ',' << r.volume << ',' << r.volume_drift << ','
        << r.picard_iters << ',' << r.outer_iters << '\n';
  }
}

void write_ledger_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream out = open_for_writing(path);
  write_ledger_csv(records, out);
  out.flush();
  check_written(out, path);
}

void write_vtk(const VolumeMesh& mesh, const StokesSolution& sol, std::ostream& out) {
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_triangles();
  out.precision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "free-surface Stokes solution\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2& v : mesh.vertices) {
    out << v.x() << ' ' << v.y() << " 0\n";
  }
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& tri : mesh.triangles) {
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) {
    out << "5\n";
  }
  out << "POINT_DATA " << nv << '\n';
  out << "VECTORS u double\n";
  for (std::size_t i = 0; i < nv; ++i) {
    const bool has_u = sol.u.size() >= static_cast<Eigen::Index>(2 * nv);
    out << (has_u ? sol.u[2 * i] : 0.0) << ' ' << (has_u ? sol.u[2 * i + 1] : 0.0) << " 0\n";
  }
  out << "SCALARS pi double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nv; ++i) {
    out << (sol.pi.size() == static_cast<Eigen::Index>(nv) ? sol.pi[i] : 0.0) << '\n';
  }
}

void write_vtk(const VolumeMesh& mesh, const StokesSolution& sol, const std::string& path) {
  std::ofstream out = open_for_writing(path);
  write_vtk(mesh, sol, out);
  out.flush();
  check_written(out, path);
}

}  // namespace fsstokes
