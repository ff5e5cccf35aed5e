#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "fsstokes/common.hpp"
#include "fsstokes/mesh.hpp"
#include "fsstokes/stokes.hpp"

namespace fsstokes {

inline constexpr double seconds_per_year = 31556926.0;

enum class CaseKind { tank, greenland_synthetic, custom };
enum class UnitSystem { nondimensional, si_years };

/// Geometry, fluid and forcing of one experiment. The closed forms are
/// rebuilt from the descriptor fields by `rebuild_case`, so a CaseConfig can
/// be serialized through its descriptors alone.
struct CaseConfig {
  CaseKind kind = CaseKind::tank;
  UnitSystem units = UnitSystem::nondimensional;
  double x0 = -1.0;
  double x1 = 1.0;
  std::function<double(double)> height;
  std::function<double(double)> bedrock;
  SourceFn source = zero_source;
  FluidParams fluid;
  std::size_t nx = 40;
  std::size_t ny = 40;
  double t_final = 4.0;

  // Descriptors.
  bool source_enabled = false;
  double bed_level = -1.0;        // tank bedrock
  double step_amplitude = 0.0;    // tank: added to h0 on |x| < step_half_width
  double step_half_width = 0.25;
  std::uint64_t seed = 1;         // greenland_synthetic profiles
};

/// Tank: h0 = 0.5 tanh(2x - 1) + 0.2 on [-1, 1], flat bedrock at -1,
/// rho g = 9.82, mu = 0.3, p = 2, t_final = 4. With `with_source`,
/// a = 0.2 x^2 (0.3 + sin x) sin(2t).
CaseConfig tank_case(bool with_source = false);

double tank_source(double x, double t);

/// Synthetic ice-sheet slice in SI units (times in seconds). Seeded smooth
/// bedrock of at most 400 m and a dome of about 3000 m with a 100 m
/// thickness floor.
CaseConfig greenland_synthetic_case(std::uint64_t seed = 1);

/// Reinstalls height, bedrock and source from the descriptor fields
/// (no-op for custom cases).
void rebuild_case(CaseConfig& c);

SurfaceGrid initial_grid(const CaseConfig& c);

}  // namespace fsstokes
