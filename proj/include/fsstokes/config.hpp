#pragma once

#include <string>

#include "fsstokes/schemes.hpp"

namespace fsstokes {

/// Parses the line-oriented `key = value` format (`#` starts a comment).
/// Required keys: case, scheme, and one of dt / dt_years. The case defaults
/// are installed first, the remaining keys override them in any order.
/// Throws ConfigError carrying the offending line number.
///
///   case            tank | greenland-synthetic
///   scheme          IE | EE_UNSTAB | EE_UNSTAB_W | EE_STAB | EE_FSSA | SIE_FSSA
///   dt, t_final     time in the case's unit (seconds for greenland-synthetic)
///   dt_years, t_final_years, dt_max_years
///                   years, greenland-synthetic only
///   nx, ny, seed, source (none | tank), bed_level, step_amplitude,
///   step_half_width, rho, g, mu0, p, delta, epsilon, dt_max,
///   edge_stabilization (true | false), coupling_tol, max_outer,
///   picard_tol, max_picard, csv, vtk_dir, vtk_every
SimConfig parse_config(const std::string& text);

/// Writes every key with round-trip precision; parse_config inverts it.
std::string serialize_config(const SimConfig& cfg);

SimConfig load_config(const std::string& path);

}  // namespace fsstokes
