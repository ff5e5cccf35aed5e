#include "fsstokes/cases.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace fsstokes {

double tank_source(double x, double t) {
  return 0.2 * x * x * (0.3 + std::sin(x)) * std::sin(2.0 * t);
}

CaseConfig tank_case(bool with_source) {
  CaseConfig c;
  c.kind = CaseKind::tank;
  c.units = UnitSystem::nondimensional;
  c.x0 = -1.0;
  c.x1 = 1.0;
  c.fluid.rho = 1.0;
  c.fluid.g = 9.82;
  c.fluid.mu0 = 0.3;
  c.fluid.p = 2.0;
  c.nx = 40;
  c.ny = 40;
  c.t_final = 4.0;
  c.source_enabled = with_source;
  c.bed_level = -1.0;
  rebuild_case(c);
  return c;
}

namespace {

constexpr int kModes = 20;

struct Modes {
  std::array<double, kModes> amplitude{};
  std::array<double, kModes> phase{};
  int first_wavenumber = 1;
  double scale = 1.0;  // 1 / max |sum| on a fine sampling

  double operator()(double xi) const {
    double s = 0.0;
    for (int k = 0; k < kModes; ++k) {
      s += amplitude[k] * std::sin(M_PI * (first_wavenumber + k) * xi + phase[k]);
    }
    return s * scale;
  }
};

Modes draw_modes(std::mt19937_64& rng, int first_wavenumber) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Modes m;
  m.first_wavenumber = first_wavenumber;
  for (int k = 0; k < kModes; ++k) {
    m.amplitude[k] = unit(rng) / (first_wavenumber + k);
    m.phase[k] = 2.0 * M_PI * unit(rng);
  }
  double peak = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    peak = std::max(peak, std::abs(m(-1.0 + i / 2000.0)));
  }
  m.scale = 1.0 / peak;
  return m;
}

double smooth_max(double a, double b, double width) {
  return 0.5 * (a + b + std::sqrt((a - b) * (a - b) + width * width));
}

}  // namespace

CaseConfig greenland_synthetic_case(std::uint64_t seed) {
  CaseConfig c;
  c.kind = CaseKind::greenland_synthetic;
  c.units = UnitSystem::si_years;
  c.x0 = -428675.0;
  c.x1 = 489475.0;
  c.fluid.rho = 910.0;
  c.fluid.g = 9.82;
  c.fluid.p = 4.0 / 3.0;
  // Glen rate factor A = 3.1688e-24 Pa^-3 s^-1, n = 3, written against the
  // Frobenius norm of Du: mu0 = 2^(-2/3) A^(-1/3).
  c.fluid.mu0 = std::pow(2.0, -2.0 / 3.0) * std::pow(3.1688e-24, -1.0 / 3.0);
  c.nx = 300;
  c.ny = 20;
  c.t_final = 200.0 * seconds_per_year;
  c.seed = seed;
  rebuild_case(c);
  return c;
}

void rebuild_case(CaseConfig& c) {
  switch (c.kind) {
    case CaseKind::tank: {
      const double bed = c.bed_level;
      const double amp = c.step_amplitude;
      const double half = c.step_half_width;
      c.bedrock = [bed](double) { return bed; };
      c.height = [amp, half](double x) {
        const double step = std::abs(x) < half ? amp : 0.0;
        return 0.5 * std::tanh(2.0 * x - 1.0) + 0.2 + step;
      };
      c.source = c.source_enabled ? SourceFn(tank_source) : SourceFn(zero_source);
      break;
    }
    case CaseKind::greenland_synthetic: {
      std::mt19937_64 rng(c.seed);
      const Modes bed_modes = draw_modes(rng, 1);
      const Modes surface_modes = draw_modes(rng, 4);
      const double x0 = c.x0, x1 = c.x1;
      auto xi = [x0, x1](double x) { return 2.0 * (x - x0) / (x1 - x0) - 1.0; };
      c.bedrock = [=](double x) { return 400.0 * bed_modes(xi(x)); };
      c.height = [=](double x) {
        const double s = xi(x);
        const double dome = 3000.0 * std::sqrt(std::max(0.0, 1.0 - s * s));
        const double b = 400.0 * bed_modes(s);
        return smooth_max(dome + 30.0 * surface_modes(s), b + 100.0, 50.0);
      };
      c.source = zero_source;
      c.source_enabled = false;
      break;
    }
    case CaseKind::custom:
      break;
  }
}

SurfaceGrid initial_grid(const CaseConfig& c) {
  SurfaceGrid grid = make_uniform_grid(c.x0, c.x1, c.nx, c.height, c.bedrock);
  grid.validate();
  return grid;
}

}  // namespace fsstokes
