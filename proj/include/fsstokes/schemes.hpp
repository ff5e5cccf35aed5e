#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fsstokes/cases.hpp"
#include "fsstokes/diagnostics.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/stokes.hpp"

namespace fsstokes {

enum class SchemeKind { IE, EE_UNSTAB, EE_UNSTAB_W, EE_STAB, EE_FSSA, SIE_FSSA };

std::string scheme_name(SchemeKind kind);
/// Accepts the names printed by scheme_name; throws ParameterError.
SchemeKind parse_scheme(const std::string& name);

struct OutputSink {
  std::string csv_path;  // empty: no CSV
  std::string vtk_dir;   // empty: no VTK
  int vtk_every = 1;
};

struct SimConfig {
  CaseConfig problem;
  SchemeKind scheme = SchemeKind::EE_STAB;
  double dt = 0.1;        // nominal step, seconds of the case's time unit
  double epsilon = 0.5;   // EE_UNSTAB_W safety factor
  double dt_max = 0.0;    // EE_UNSTAB_W cap; 0 means dt
  bool edge_stabilization = true;
  double coupling_tol = 1e-8;
  int max_outer = 50;
  double picard_tol = 1e-6;
  int max_picard = 50;
  OutputSink output;

  void validate() const;
};

struct SimState {
  SurfaceGrid grid;
  VolumeMesh mesh;
  double t = 0.0;
  int n = 0;
  StokesSolution last;  // empty until the first step
};

SimState initial_state(const SimConfig& cfg);

/// Advances one step of at most `dt` (EE_UNSTAB_W may take less).
/// Throws GeometryError on a thickness violation, ConvergenceError when the
/// implicit coupling or Picard fails.
DiagnosticsRecord step(SimState& state, const SimConfig& cfg, double dt);

/// Stokes-side stabilization an explicit or semi-implicit scheme uses for a
/// step of length dt starting at t. IE and the unstabilized schemes get none.
Stabilization scheme_stabilization(SchemeKind kind, double dt, const SourceFn& a, double t);

/// Velocity on the state's current domain as the scheme would compute it
/// for a step of length dt (warm-started from the last solution).
StokesSolution solve_at_state(const SimState& state, const SimConfig& cfg, double dt);

/// min(dt_max, eps (4 / rho g) ||sqrt(mu) Du||^2 /
///      (int omega (u.n)^2 ds + 2 int (u.n) a ds)), dt_max if the
/// denominator is not positive. `sol` is the unstabilized solution on the
/// current domain.
double weak_stable_dt(const SimState& state, const StokesSolution& sol, const FluidParams& fluid,
                      double epsilon, double dt_max, const SourceFn& a);

/// A step whose new height crosses the bed. Carries the step's record
/// (energies, volume) so the series up to the failure stays complete.
class ThicknessFailure : public GeometryError {
public:
  ThicknessFailure(const std::string& what, DiagnosticsRecord record)
      : GeometryError(what), record_(std::move(record)) {}
  const DiagnosticsRecord& record() const noexcept { return record_; }

private:
  DiagnosticsRecord record_;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  double initial_volume = 0.0;
  std::vector<double> initial_h;
  SimState final_state;
  bool failed = false;
  std::string failure;

  double max_energy() const;         // max_n E_bar^n (-inf when empty)
  double max_step_defect() const;    // max_n |step_defect| / |Omega^0|
  double final_drift() const;        // |volume_drift| / |Omega^0| at the end
};

/// Steps from t = 0 to t_final; the last step is clipped to land on
/// t_final. A failing step ends the series and sets `failed`.
/// `on_step` sees the state after each accepted step.
RunResult run(const SimConfig& cfg,
              const std::function<void(const SimState&, const DiagnosticsRecord&)>& on_step = {});

}  // namespace fsstokes
