#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fsstokes/common.hpp"

namespace fsstokes {

/// Piecewise-linear height h and bedrock b on a fixed 1D grid of the
/// horizontal domain. Nodes are strictly increasing; cell c spans
/// [x[c], x[c+1]].
struct SurfaceGrid {
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> b;

  std::size_t num_nodes() const { return x.size(); }
  std::size_t num_cells() const { return x.empty() ? 0 : x.size() - 1; }
  double cell_diameter(std::size_t c) const { return x[c + 1] - x[c]; }
  double slope(std::size_t c) const { return (h[c + 1] - h[c]) / cell_diameter(c); }
  double thickness(std::size_t i) const { return h[i] - b[i]; }

  /// Checks ordering, sizes and positive thickness; throws GeometryError.
  void validate() const;
};

/// Uniform grid on [x0, x1] with h and b sampled at the nodes.
SurfaceGrid make_uniform_grid(double x0, double x1, std::size_t cells,
                              const std::function<double(double)>& height,
                              const std::function<double(double)>& bedrock);

enum class BoundaryMarker { surface, bottom, lateral };

struct BoundaryFacet {
  std::array<int, 2> vertices;  // surface facets are ordered left to right
  BoundaryMarker marker;
  int triangle;
  int edge;  // global edge index (P2 mid-node)
};

/// Structured extrusion of a SurfaceGrid: Ny layers per column, every quad
/// split along its lower-left/upper-right diagonal. Vertex (i, j) of column i
/// and layer j has index i * (ny + 1) + j.
struct VolumeMesh {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  /// Local edge k of a triangle joins local vertices k and (k + 1) % 3.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::array<int, 2>> edges;
  std::vector<BoundaryFacet> facets;
  /// Surface cell c -> index into `facets` of the top facet above it.
  std::vector<int> column_top_facet;

  int vertex_index(std::size_t column, std::size_t layer) const {
    return static_cast<int>(column * (ny + 1) + layer);
  }
  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  double triangle_area(std::size_t t) const;
  double total_area() const;
};

VolumeMesh build_extruded_mesh(const SurfaceGrid& grid, std::size_t ny);

/// Moves every vertex vertically so that its relative height between b and
/// h is preserved when h changes from `grid_old` to `grid_new`.
VolumeMesh remap_vertical(const VolumeMesh& mesh, const SurfaceGrid& grid_old,
                          const SurfaceGrid& grid_new);

struct SurfaceGeometry {
  Vec2 normal;   // outward unit normal (-s, 1) / sqrt(1 + s^2)
  double omega;  // arclength weight sqrt(1 + s^2) = 1 / n_z
};

SurfaceGeometry surface_geometry(const SurfaceGrid& grid, std::size_t cell);

/// Integral of (h - b) over the horizontal domain; trapezoid rule is exact.
double domain_volume(const SurfaceGrid& grid);

}  // namespace fsstokes
