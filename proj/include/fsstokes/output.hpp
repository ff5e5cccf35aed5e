#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsstokes/diagnostics.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/stokes.hpp"

namespace fsstokes {

/// Columns: step, t, h_l2_sq, strain_energy, E_L, E_R, E_bar, volume,
/// volume_drift, picard_iters, outer_iters.
void write_ledger_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& out);
void write_ledger_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);

/// Legacy ASCII VTK 3.0, triangles, point data u (vertex values of the P2
/// velocity) and pi.
void write_vtk(const VolumeMesh& mesh, const StokesSolution& sol, std::ostream& out);
void write_vtk(const VolumeMesh& mesh, const StokesSolution& sol, const std::string& path);

}  // namespace fsstokes
