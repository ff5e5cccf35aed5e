#include "fsstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

namespace fsstokes {

void SurfaceGrid::validate() const {
  if (x.size() < 2) {
    throw GeometryError("surface grid needs at least two nodes");
  }
  if (h.size() != x.size() || b.size() != x.size()) {
    throw GeometryError("surface grid: h and b must have one value per node");
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) {
      std::ostringstream msg;
      msg << "surface grid nodes not strictly increasing at node " << i + 1;
      throw GeometryError(msg.str());
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(h[i] - b[i] > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive thickness " << h[i] - b[i] << " at node " << i << " (x = " << x[i]
          << ")";
      throw GeometryError(msg.str());
    }
  }
}

SurfaceGrid make_uniform_grid(double x0, double x1, std::size_t cells,
                              const std::function<double(double)>& height,
                              const std::function<double(double)>& bedrock) {
  if (cells == 0 || !(x1 > x0)) {
    throw GeometryError("uniform grid needs a nonempty interval and at least one cell");
  }
  SurfaceGrid grid;
  grid.x.resize(cells + 1);
  grid.h.resize(cells + 1);
  grid.b.resize(cells + 1);
  const double dx = (x1 - x0) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double xi = i == cells ? x1 : x0 + dx * static_cast<double>(i);
    grid.x[i] = xi;
    grid.h[i] = height(xi);
    grid.b[i] = bedrock(xi);
  }
  return grid;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

}  // namespace

double VolumeMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double VolumeMesh::total_area() const {
  double area = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    area += triangle_area(t);
  }
  return area;
}

VolumeMesh build_extruded_mesh(const SurfaceGrid& grid, std::size_t ny) {
  grid.validate();
  if (ny == 0) {
    throw GeometryError("extrusion needs at least one layer");
  }
  VolumeMesh mesh;
  mesh.nx = grid.num_cells();
  mesh.ny = ny;
  const std::size_t nx = mesh.nx;

  mesh.vertices.resize((nx + 1) * (ny + 1));
  for (std::size_t i = 0; i <= nx; ++i) {
    const double depth = grid.h[i] - grid.b[i];
    for (std::size_t j = 0; j <= ny; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(ny);
      const double z = j == ny ? grid.h[i] : grid.b[i] + s * depth;
      mesh.vertices[mesh.vertex_index(i, j)] = Vec2(grid.x[i], z);
    }
  }

  mesh.triangles.reserve(2 * nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const int v00 = mesh.vertex_index(i, j);
      const int v10 = mesh.vertex_index(i + 1, j);
      const int v11 = mesh.vertex_index(i + 1, j + 1);
      const int v01 = mesh.vertex_index(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(3 * mesh.triangles.size());
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      auto [it, inserted] = edge_ids.try_emplace(edge_key(a, b), static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({a, b});
      }
      mesh.triangle_edges[t][k] = it->second;
    }
  }

  // Triangle (i, j, lower) has index 2 * (i * ny + j); upper is +1.
  auto lower = [&](std::size_t i, std::size_t j) { return static_cast<int>(2 * (i * ny + j)); };
  auto upper = [&](std::size_t i, std::size_t j) { return lower(i, j) + 1; };
  auto add_facet = [&](int a, int b, BoundaryMarker marker, int tri) {
    mesh.facets.push_back({{a, b}, marker, tri, edge_ids.at(edge_key(a, b))});
  };

  mesh.column_top_facet.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    mesh.column_top_facet[i] = static_cast<int>(mesh.facets.size());
    add_facet(mesh.vertex_index(i, ny), mesh.vertex_index(i + 1, ny), BoundaryMarker::surface,
              upper(i, ny - 1));
  }
  for (std::size_t i = 0; i < nx; ++i) {
    add_facet(mesh.vertex_index(i, 0), mesh.vertex_index(i + 1, 0), BoundaryMarker::bottom,
              lower(i, 0));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    add_facet(mesh.vertex_index(0, j), mesh.vertex_index(0, j + 1), BoundaryMarker::lateral,
              upper(0, j));
    add_facet(mesh.vertex_index(nx, j), mesh.vertex_index(nx, j + 1), BoundaryMarker::lateral,
              lower(nx - 1, j));
  }
  return mesh;
}

VolumeMesh remap_vertical(const VolumeMesh& mesh, const SurfaceGrid& grid_old,
                          const SurfaceGrid& grid_new) {
  if (grid_old.num_cells() != mesh.nx || grid_new.num_cells() != mesh.nx) {
    throw GeometryError("remap: grids do not match the mesh columns");
  }
  grid_old.validate();
  grid_new.validate();
  VolumeMesh out = mesh;
  for (std::size_t i = 0; i <= mesh.nx; ++i) {
    if (grid_new.x[i] != grid_old.x[i] || grid_new.b[i] != grid_old.b[i]) {
      throw GeometryError("remap: grids must share nodes and bedrock");
    }
    if (grid_new.h[i] == grid_old.h[i]) {
      continue;
    }
    const double b = grid_old.b[i];
    const double old_depth = grid_old.h[i] - b;
    const double new_depth = grid_new.h[i] - b;
    for (std::size_t j = 0; j <= mesh.ny; ++j) {
      Vec2& v = out.vertices[mesh.vertex_index(i, j)];
      if (j == mesh.ny) {
        v.y() = grid_new.h[i];
      } else if (j > 0) {
        const double s = (v.y() - b) / old_depth;
        v.y() = b + s * new_depth;
      }
    }
  }
  return out;
}

SurfaceGeometry surface_geometry(const SurfaceGrid& grid, std::size_t cell) {
  const double s = grid.slope(cell);
  const double omega = std::sqrt(1.0 + s * s);
  return {Vec2(-s / omega, 1.0 / omega), omega};
}

double domain_volume(const SurfaceGrid& grid) {
  double volume = 0.0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    volume += 0.5 * grid.cell_diameter(c) * (grid.thickness(c) + grid.thickness(c + 1));
  }
  return volume;
}

}  // namespace fsstokes
