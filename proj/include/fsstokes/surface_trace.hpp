#pragma once

#include <array>
#include <vector>

namespace fsstokes {

/// Velocity restricted to the top boundary, sampled per surface cell at the
/// points of line_rule().
struct SurfaceTrace {
  std::vector<std::array<double, 3>> ux;
  std::vector<std::array<double, 3>> uz;
  /// Nodal velocity at the surface grid nodes.
  std::vector<double> node_ux;
  std::vector<double> node_uz;

  std::size_t num_cells() const { return ux.size(); }
  double node_speed(std::size_t i) const;

  static SurfaceTrace zero(std::size_t cells);
};

}  // namespace fsstokes
