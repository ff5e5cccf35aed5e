#include "fsstokes/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fsstokes/freesurface.hpp"

namespace fsstokes {

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::IE: return "IE";
    case SchemeKind::EE_UNSTAB: return "EE_UNSTAB";
    case SchemeKind::EE_UNSTAB_W: return "EE_UNSTAB_W";
    case SchemeKind::EE_STAB: return "EE_STAB";
    case SchemeKind::EE_FSSA: return "EE_FSSA";
    case SchemeKind::SIE_FSSA: return "SIE_FSSA";
  }
  return "?";
}

SchemeKind parse_scheme(const std::string& name) {
  for (SchemeKind k : {SchemeKind::IE, SchemeKind::EE_UNSTAB, SchemeKind::EE_UNSTAB_W,
                       SchemeKind::EE_STAB, SchemeKind::EE_FSSA, SchemeKind::SIE_FSSA}) {
    if (scheme_name(k) == name) {
      return k;
    }
  }
  throw ParameterError("unknown scheme '" + name + "'");
}

void SimConfig::validate() const {
  problem.fluid.validate();
  if (!(problem.fluid.g > 0.0)) {
    throw ParameterError("time stepping needs g > 0");
  }
  if (!(dt > 0.0) || !(problem.t_final >= 0.0)) {
    throw ParameterError("time step must be positive and the final time non-negative");
  }
  if (scheme == SchemeKind::EE_UNSTAB_W && !(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("EE_UNSTAB_W needs epsilon in (0, 1)");
  }
  if (dt_max < 0.0) {
    throw ParameterError("dt_max must be non-negative");
  }
  if (!(coupling_tol > 0.0 && coupling_tol < 1.0) || !(picard_tol > 0.0 && picard_tol < 1.0)) {
    throw ParameterError("tolerances must lie in (0, 1)");
  }
  if (max_outer < 1 || max_picard < 1) {
    throw ParameterError("iteration limits must be positive");
  }
  if (problem.nx < 1 || problem.ny < 1) {
    throw ParameterError("nx and ny must be at least 1");
  }
  if (output.vtk_every < 1) {
    throw ParameterError("VTK cadence must be at least 1");
  }
}

SimState initial_state(const SimConfig& cfg) {
  SimState s;
  s.grid = initial_grid(cfg.problem);
  s.mesh = build_extruded_mesh(s.grid, cfg.problem.ny);
  return s;
}

double weak_stable_dt(const SimState& state, const StokesSolution& sol, const FluidParams& fluid,
                      double epsilon, double dt_max, const SourceFn& a) {
  const double strain = strain_energy(state.mesh, sol.u, sol.mu);
  const SurfaceFlux flux = surface_flux(state.grid, extract_trace(state.mesh, sol.u), a, state.t);
  const double denom = flux.normal_sq + 2.0 * flux.source;
  if (!(denom > 0.0)) {
    return dt_max;
  }
  return std::min(dt_max, epsilon * 4.0 / fluid.rho_g() * strain / denom);
}

Stabilization scheme_stabilization(SchemeKind kind, double dt, const SourceFn& a, double t) {
  Stabilization stab;
  switch (kind) {
    case SchemeKind::EE_STAB:
      stab.kind = StabilizationKind::normal_penalty;
      break;
    case SchemeKind::SIE_FSSA:
    case SchemeKind::EE_FSSA:
      stab.kind = StabilizationKind::fssa;
      break;
    default:
      break;
  }
  stab.dt = dt;
  stab.source = a;
  stab.t = t;
  return stab;
}

StokesSolution solve_at_state(const SimState& state, const SimConfig& cfg, double dt) {
  const Stabilization stab = scheme_stabilization(cfg.scheme, dt, cfg.problem.source, state.t);
  const Eigen::VectorXd* warm = state.last.u.size() ? &state.last.u : nullptr;
  return solve_stokes(state.mesh, state.grid, cfg.problem.fluid, stab, cfg.picard_tol,
                      cfg.max_picard, warm);
}

namespace {

std::string thickness_message(const HeightUpdate& up, const SurfaceGrid& grid, double t) {
  const auto i = static_cast<std::size_t>(up.thickness_violation);
  std::ostringstream msg;
  msg << "non-positive thickness " << up.h[i] - grid.b[i] << " at node " << i
      << " (x = " << grid.x[i] << ") at t = " << t;
  return msg.str();
}

void check_thickness(const HeightUpdate& up, const SurfaceGrid& grid, double t) {
  if (up.thickness_violation >= 0) {
    throw GeometryError(thickness_message(up, grid, t));
  }
}

void finish_record(DiagnosticsRecord& rec, SimState& s, const SurfaceGrid& new_grid,
                   const VolumeMesh& from_mesh, const SurfaceGrid& from_grid,
                   const HeightUpdate& up, double volume_old) {
  rec.h_l2_sq = surface_l2_sq(new_grid, new_grid.h);
  rec.volume = domain_volume(new_grid);
  rec.step_defect = rec.volume - volume_old - rec.source_increment;
  const Eigen::Map<const Eigen::VectorXd> h(new_grid.h.data(),
                                            static_cast<Eigen::Index>(new_grid.h.size()));
  rec.edge_energy = h.dot(edge_jump_operator(new_grid, up.gamma) * h);
  s.mesh = remap_vertical(from_mesh, from_grid, new_grid);
  s.grid = new_grid;
}

DiagnosticsRecord explicit_step(SimState& s, const SimConfig& cfg, double dt) {
  const FluidParams& fluid = cfg.problem.fluid;
  const SourceFn& a = cfg.problem.source;
  const Eigen::VectorXd* warm = s.last.u.size() ? &s.last.u : nullptr;

  const Stabilization stab = scheme_stabilization(cfg.scheme, dt, a, s.t);
  const AdvectionMode mode = cfg.scheme == SchemeKind::SIE_FSSA
                                 ? AdvectionMode::semi_implicit_advection
                                 : AdvectionMode::explicit_advection;
  // The unstabilized velocity does not depend on dt, so the adaptive step
  // is chosen after the solve.
  const StokesSolution sol =
      solve_stokes(s.mesh, s.grid, fluid, stab, cfg.picard_tol, cfg.max_picard, warm);
  if (cfg.scheme == SchemeKind::EE_UNSTAB_W) {
    dt = weak_stable_dt(s, sol, fluid, cfg.epsilon, dt, a);
  }

  DiagnosticsRecord rec;
  rec.step = s.n + 1;
  rec.dt = dt;
  const SurfaceTrace trace = extract_trace(s.mesh, sol.u);
  const HeightUpdate up =
      advance_height(s.grid, trace, dt, mode, a, s.t, cfg.edge_stabilization);

  SurfaceGrid next = s.grid;
  next.h = up.h;
  rec.h_prev_l2_sq = surface_l2_sq(s.grid, s.grid.h);
  rec.strain_energy = strain_energy(s.mesh, sol.u, sol.mu);
  const EnergySides e =
      energy_sides(s.grid, s.grid.h, next.h, rec.strain_energy, dt, fluid.rho_g(), a, s.t);
  rec.E_L = e.E_L;
  rec.E_R = e.E_R;
  const double t_src = s.t;
  rec.source_increment = dt * surface_integral(s.grid, [&](double x) { return a(x, t_src); });
  rec.picard_iters = sol.picard_iterations;
  rec.outer_iters = 1;

  const double volume_old = domain_volume(s.grid);
  if (up.thickness_violation >= 0) {
    rec.h_l2_sq = surface_l2_sq(next, next.h);
    rec.volume = domain_volume(next);
    rec.step_defect = rec.volume - volume_old - rec.source_increment;
    rec.t = s.t + dt;
    rec.thickness_violated = true;
    throw ThicknessFailure(thickness_message(up, s.grid, s.t + dt), rec);
  }
  const SurfaceGrid from_grid = s.grid;
  const VolumeMesh from_mesh = s.mesh;
  finish_record(rec, s, next, from_mesh, from_grid, up, volume_old);
  s.last = sol;
  s.t += dt;
  s.n += 1;
  rec.t = s.t;
  return rec;
}

// Implicit Euler. Coupling iterate k: on Omega(h^k), solve Stokes together
// with the height equation, the momentum equation carrying the weight of
// the column between h^k and the new height. Advection speed and edge
// coefficients come from the previous iterate.
DiagnosticsRecord implicit_step(SimState& s, const SimConfig& cfg, double dt) {
  const FluidParams& fluid = cfg.problem.fluid;
  const SourceFn& a = cfg.problem.source;
  const double t_new = s.t + dt;

  DiagnosticsRecord rec;
  rec.step = s.n + 1;
  rec.dt = dt;

  SurfaceGrid gk = s.grid;
  VolumeMesh mk = s.mesh;
  int picard_total = 0;
  Eigen::VectorXd prev = s.last.u;
  if (prev.size() == 0) {
    const StokesSolution start = solve_stokes(mk, gk, fluid, {}, cfg.picard_tol, cfg.max_picard);
    picard_total += start.picard_iterations;
    prev = start.u;
  }
  const FunctionSpace V = velocity_space(mk);
  double change = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= cfg.max_outer; ++k) {
    const SurfaceTrace prev_trace = extract_trace(mk, prev);
    const std::vector<double> gamma = cfg.edge_stabilization
                                          ? edge_coefficients(gk, prev_trace)
                                          : std::vector<double>(gk.num_nodes(), 0.0);
    const HeightCoupling coupling = assemble_height_coupling(
        mk, V, gk, s.grid.h, prev_trace, dt, fluid.rho_g(), gamma, a, t_new);
    Stabilization stab;
    stab.kind = StabilizationKind::height_coupled;
    stab.dt = dt;
    stab.t = t_new;
    stab.coupling = &coupling;
    StokesSolution sol = solve_stokes(mk, gk, fluid, stab, cfg.picard_tol, cfg.max_picard, &prev);
    picard_total += sol.picard_iterations;

    HeightUpdate up;
    up.h.assign(sol.h.data(), sol.h.data() + sol.h.size());
    for (std::size_t i = 0; i < up.h.size(); ++i) {
      if (!(up.h[i] - gk.b[i] > 0.0)) {
        up.thickness_violation = static_cast<int>(i);
        break;
      }
    }
    check_thickness(up, gk, t_new);

    const Eigen::Map<const Eigen::VectorXd> hk(gk.h.data(), static_cast<Eigen::Index>(gk.h.size()));
    change = (sol.h - hk).norm() / sol.h.norm();

    SurfaceGrid next = gk;
    next.h = up.h;
    if (change < cfg.coupling_tol) {
      // Final height solve with the slope of the converged domain: same
      // fixed point, and the flux integrates to zero against w = 1.
      const SurfaceTrace trace = extract_trace(mk, sol.u);
      const HeightUpdate fin = advance_height(gk, s.grid.h, trace, dt,
                                              AdvectionMode::explicit_advection, a, t_new,
                                              cfg.edge_stabilization);
      check_thickness(fin, gk, t_new);
      next.h = fin.h;
      rec.outer_iters = k;
      rec.outer_change = change;
      rec.picard_iters = picard_total;
      rec.h_prev_l2_sq = surface_l2_sq(s.grid, s.grid.h);
      rec.strain_energy = strain_energy(mk, sol.u, sol.mu);
      const EnergySides e = energy_sides(s.grid, s.grid.h, next.h, rec.strain_energy, dt,
                                         fluid.rho_g(), a, t_new);
      rec.E_L = e.E_L;
      rec.E_R = e.E_R;
      const auto at = [&](double x) { return a(x, t_new); };
      const double a_norm = std::sqrt(surface_norm_sq(s.grid, at));
      rec.ie_lhs = surface_l2_sq(next, next.h) + 4.0 * dt / fluid.rho_g() * rec.strain_energy;
      rec.ie_rhs = rec.h_prev_l2_sq + 2.0 * dt * a_norm * std::sqrt(rec.h_prev_l2_sq) +
                   2.0 * dt * dt * a_norm * a_norm;
      rec.source_increment = dt * surface_integral(s.grid, at);
      const double volume_old = domain_volume(s.grid);
      finish_record(rec, s, next, mk, gk, fin, volume_old);
      s.last = std::move(sol);
      s.t = t_new;
      s.n += 1;
      rec.t = s.t;
      return rec;
    }
    mk = remap_vertical(mk, gk, next);
    gk = std::move(next);
    prev = std::move(sol.u);
  }
  std::ostringstream msg;
  msg << "implicit coupling did not converge in " << cfg.max_outer << " iterations at t = " << t_new
      << " (last change " << change << ")";
  throw ConvergenceError(msg.str(), change);
}

}  // namespace

DiagnosticsRecord step(SimState& state, const SimConfig& cfg, double dt) {
  if (!(dt > 0.0)) {
    throw ParameterError("step needs dt > 0");
  }
  if (cfg.scheme == SchemeKind::IE) {
    return implicit_step(state, cfg, dt);
  }
  return explicit_step(state, cfg, dt);
}

double RunResult::max_energy() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    m = std::max(m, r.E_bar);
  }
  return m;
}

double RunResult::max_step_defect() const {
  double m = 0.0;
  for (const auto& r : records) {
    m = std::max(m, std::abs(r.step_defect));
  }
  return m / initial_volume;
}

double RunResult::final_drift() const {
  return records.empty() ? 0.0 : std::abs(records.back().volume_drift) / initial_volume;
}

RunResult run(const SimConfig& cfg,
              const std::function<void(const SimState&, const DiagnosticsRecord&)>& on_step) {
  cfg.validate();
  RunResult result;
  SimState s = initial_state(cfg);
  result.initial_volume = domain_volume(s.grid);
  result.initial_h = s.grid.h;

  const double t_final = cfg.problem.t_final;
  const bool adaptive = cfg.scheme == SchemeKind::EE_UNSTAB_W;
  const double cap = cfg.dt_max > 0.0 ? cfg.dt_max : cfg.dt;
  double sources = 0.0;
  while (t_final - s.t > 1e-12 * std::max(t_final, cfg.dt)) {
    double t_next = 0.0;
    double dt = 0.0;
    if (adaptive) {
      dt = std::min(cap, t_final - s.t);
    } else {
      t_next = std::min(t_final, (s.n + 1) * cfg.dt);
      if (t_final - t_next < 1e-9 * cfg.dt) {
        t_next = t_final;
      }
      dt = t_next - s.t;
    }
    DiagnosticsRecord rec;
    try {
      rec = step(s, cfg, dt);
    } catch (const ThicknessFailure& e) {
      result.failed = true;
      result.failure = e.what();
      rec = e.record();
      sources += rec.source_increment;
      rec.volume_drift = rec.volume - result.initial_volume - sources;
      result.records.push_back(rec);
      break;
    } catch (const std::exception& e) {
      result.failed = true;
      result.failure = e.what();
      break;
    }
    if (!adaptive) {
      s.t = t_next;
      rec.t = t_next;
    }
    sources += rec.source_increment;
    rec.volume_drift = rec.volume - result.initial_volume - sources;
    result.records.push_back(rec);
    if (on_step) {
      on_step(s, rec);
    }
  }
  if (!result.records.empty()) {
    normalized_energy(result.records);
  }
  result.final_state = std::move(s);
  return result;
}

}  // namespace fsstokes
