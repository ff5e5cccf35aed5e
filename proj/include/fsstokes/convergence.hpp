#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fsstokes/mesh.hpp"
#include "fsstokes/schemes.hpp"

namespace fsstokes {

/// One resolution of a refinement study. dx_perp and dx are the nominal
/// horizontal and volume mesh sizes; nx, ny the extrusion actually used.
struct RefinementLevel {
  double dt = 0.0;
  double dx_perp = 0.0;
  double dx = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
};

struct ConvergenceSchedule {
  std::vector<RefinementLevel> levels;
  RefinementLevel reference;
  SchemeKind reference_scheme = SchemeKind::EE_UNSTAB_W;
  double t_final = 1.0;
  double viscosity = 0.0;  // replaces mu0 of the base case when positive
};

/// Tank schedule: dt = 0.5 / 2^k with Nx = Ny = 10 * 2^k, k = 0..3, and a
/// 160 x 160 EE_UNSTAB_W reference with dt <= 0.005; viscosity 1.
ConvergenceSchedule tank_schedule();

/// Solution at the final time: domain, mesh and the velocity of one more
/// Stokes solve on that domain with the scheme's own stabilization.
struct Snapshot {
  SurfaceGrid grid;
  VolumeMesh mesh;
  Eigen::VectorXd u;
  double t = 0.0;
  std::string source;  // serialized configuration of the run, empty if unknown
};

/// Runs `cfg` to its final time. Throws std::runtime_error if the run fails.
Snapshot final_snapshot(const SimConfig& cfg);

/// Plain-text snapshot file: header, the source configuration, then x, h, b
/// and the P2 velocity at full precision. The mesh is rebuilt from the grid on load.
void save_snapshot(const Snapshot& snap, const std::string& path);
Snapshot load_snapshot(const std::string& path);

/// Finds the triangle of an extruded mesh containing a point, with its
/// reference coordinates. Points just outside the mesh (a finer domain
/// poking through) map to the nearest triangle of their column.
class PointLocator {
public:
  explicit PointLocator(const VolumeMesh& mesh);

  struct Hit {
    std::size_t cell = 0;
    Vec2 ref = Vec2::Zero();
  };
  Hit locate(const Vec2& p) const;

private:
  const VolumeMesh* mesh_;
  std::vector<double> x_;
};

/// Relative L2 errors of `coarse` against `reference`:
///   h:      on the coarse surface grid, reference interpolated to its nodes;
///   u_perp: horizontal surface velocity at the coarse nodes, same norm;
///   u:      on the reference domain, coarse velocity evaluated at the
///           reference quadrature points.
struct RelativeErrors {
  double h = 0.0;
  double u_perp = 0.0;
  double u = 0.0;
};

RelativeErrors relative_errors(const Snapshot& coarse, const Snapshot& reference);

/// Least-squares slope of log(error) against log(size).
double fit_order(const std::vector<double>& size, const std::vector<double>& error);

struct LevelResult {
  RefinementLevel level;
  bool failed = false;
  std::string failure;
  RelativeErrors errors;
};

struct SchemeConvergence {
  SchemeKind scheme = SchemeKind::EE_STAB;
  std::vector<LevelResult> levels;
  double order_h = 0.0;  // NaN when fewer than three levels succeeded
  double order_u_perp = 0.0;
  double order_u = 0.0;
};

struct ConvergenceReport {
  ConvergenceSchedule schedule;
  std::vector<SchemeConvergence> schemes;
};

/// Configuration of one level: `base` with the level's grid and time step.
/// EE_UNSTAB_W takes the level's dt as its cap.
SimConfig level_config(const SimConfig& base, SchemeKind scheme, const RefinementLevel& level,
                       double t_final);

/// Runs every scheme at every level of `schedule` and compares with
/// `reference`. A failing level is marked and left out of the fit.
ConvergenceReport convergence_study(const SimConfig& base, const std::vector<SchemeKind>& schemes,
                                    const ConvergenceSchedule& schedule,
                                    const Snapshot& reference);

/// Loads the reference from `cache_path` when it exists and was produced by
/// the same configuration, else computes and stores it. An empty
/// path disables caching.
Snapshot reference_snapshot(const SimConfig& base, const ConvergenceSchedule& schedule,
                            const std::string& cache_path);

}  // namespace fsstokes
