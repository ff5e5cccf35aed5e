#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "fsstokes/fem.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/surface_trace.hpp"

namespace fsstokes {

/// One row of the energy ledger, describing the step from t^n to t^{n+1}.
struct DiagnosticsRecord {
  int step = 0;          // n + 1
  double t = 0.0;        // t^{n+1}
  double dt = 0.0;
  double h_l2_sq = 0.0;  // ||h^{n+1}||^2
  double h_prev_l2_sq = 0.0;
  double strain_energy = 0.0;  // ||sqrt(mu) Du||^2 of the step's velocity
  double E_L = 0.0;
  double E_R = 0.0;
  double E_bar = 0.0;  // filled by normalized_energy over the whole run
  double volume = 0.0;  // |Omega^{n+1}|
  double volume_drift = 0.0;  // |Omega^{n+1}| - |Omega^0| - sum dt int a
  double step_defect = 0.0;   // |Omega^{n+1}| - |Omega^n| - dt int a
  double source_increment = 0.0;  // dt int a
  double edge_energy = 0.0;       // h^{n+1,T} J h^{n+1}
  double ie_lhs = 0.0;  // implicit stability estimate, left side
  double ie_rhs = 0.0;  // implicit stability estimate, right side
  int picard_iters = 0;
  int outer_iters = 0;
  double outer_change = 0.0;
  bool thickness_violated = false;  // h^{n+1} crossed the bed; the run stopped here
};

/// ||sqrt(mu) Du||^2 on the volume quadrature with the given samples.
double strain_energy(const VolumeMesh& mesh, const Eigen::VectorXd& u, const QuadratureField& mu);

/// mu0 ||Du||_{L^p}^p on the volume quadrature.
double lp_strain_norm(const VolumeMesh& mesh, const Eigen::VectorXd& u, double mu0, double p);

/// ||h||^2 on the surface grid (exact for P1).
double surface_l2_sq(const SurfaceGrid& grid, const std::vector<double>& h);

/// (f, h) and ||f||^2 with line_rule() per cell.
double surface_inner(const SurfaceGrid& grid, const std::function<double(double)>& f,
                     const std::vector<double>& h);
double surface_norm_sq(const SurfaceGrid& grid, const std::function<double(double)>& f);
double surface_integral(const SurfaceGrid& grid, const std::function<double(double)>& f);

struct EnergySides {
  double E_L = 0.0;
  double E_R = 0.0;
};

/// E_L = ||h^{n+1}||^2 + (4 dt / rho g) strain,
/// E_R = ||h^n||^2 + 2 dt (a, h^n) + dt^2 ||a||^2, a = a(., t).
EnergySides energy_sides(const SurfaceGrid& grid, const std::vector<double>& h_prev,
                         const std::vector<double>& h_new, double strain, double dt, double rho_g,
                         const SourceFn& a, double t);

/// E_bar^n = (E_L^n - E_R^n) / max_n |E_R^n|, written into the records.
std::vector<double> normalized_energy(std::vector<DiagnosticsRecord>& records);
std::vector<double> normalized_energy(const std::vector<double>& E_L, const std::vector<double>& E_R);

/// drift_n = |Omega^n| - |Omega^0| - sum_{m<n} dt int a(., t^m), from the
/// volumes and source increments stored in the records.
std::vector<double> volume_series(const std::vector<DiagnosticsRecord>& records,
                                  double initial_volume);

/// Surface flux integrals on the traced velocity:
/// int omega (u.n)^2 ds and int (u.n) a ds.
struct SurfaceFlux {
  double normal_sq = 0.0;
  double source = 0.0;
};
SurfaceFlux surface_flux(const SurfaceGrid& grid, const SurfaceTrace& trace, const SourceFn& a,
                         double t);

struct LemmaResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double surface_form = 0.0;  // (-u_perp dh/dx + u_z, w) on the surface grid
  double volume_form = 0.0;   // rho g (z_hat, u) on the domain
};

/// r1 = |(-u_perp dh/dx + u_z, w) - int (u.n) w ds|,
/// r2 = |-rho g (z_hat, u) + rho g int (u.n) z ds|.
/// The surface-grid side uses the trace; the boundary side walks the top
/// facets of the volume mesh and evaluates the triangle basis directly.
LemmaResiduals lemma_residuals(const VolumeMesh& mesh, const SurfaceGrid& grid,
                               const Eigen::VectorXd& u, const std::function<double(double)>& w,
                               double rho_g);

/// Total variation sum |h_{i+1} - h_i|.
double total_variation(const std::vector<double>& h);

}  // namespace fsstokes
