#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cutfem/background_mesh.hpp"

namespace cutfem {

/// Planar cut polygon of one tetrahedron: a triangle (1/3 sign split) or a
/// quadrilateral (2/2 split), fanned into one or two triangles. The normal is
/// the normalized gradient of the linear interpolant, so normal . grad(rho_h)
/// is positive.
struct SurfaceCell {
  int parent_tet = -1;
  int n_vertices = 0;
  std::array<Vec3, 4> polygon;
  int n_triangles = 0;
  std::array<std::array<int, 3>, 2> triangles;
  double area = 0.0;
  Vec3 normal = Vec3::Zero();
};

struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

/// Intersects one tet with the zero set of the linear interpolant of the
/// given (snapped, nonzero) vertex values. Returns nothing when all values
/// share one sign.
std::optional<SurfaceCell> cut_tet(const std::array<Vec3, 4>& coords,
                                   const std::array<double, 4>& values,
                                   int parent_tet = -1);

/// Quadrature on the cell's triangle fan; degree in {1, 2, 4}.
QuadratureRule surface_quadrature(const SurfaceCell& cell, int degree);

/// Quadrature on a tetrahedron; degree in {1, 2}.
QuadratureRule tet_quadrature(const std::array<Vec3, 4>& coords, int degree);

/// One cut polygon per active tet, in active-tet order.
std::vector<SurfaceCell> extract_surface_cells(const ActiveMesh& active);

/// Debug dump: parent tet, polygon coordinates, area, normal per line block.
void write_surface_cells(const std::vector<SurfaceCell>& cells,
                         const std::string& path);

double tet_volume(const std::array<Vec3, 4>& coords);

}  // namespace cutfem
