#pragma once

#include <array>
#include <string>
#include <vector>

#include "cutfem/level_set.hpp"

namespace cutfem {

/// Structured tetrahedral mesh of a box: each cube cell is split into six
/// tetrahedra by the Kuhn pattern with a globally consistent diagonal, which
/// makes the mesh conforming and quasi-uniform.
struct BoxMesh {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  std::array<int, 3> n_cells = {0, 0, 0};
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  double h = 0.0;  // mesh size: longest tet edge (the cell body diagonal)

  Vec3 cell_size() const {
    return Vec3((hi.x() - lo.x()) / n_cells[0], (hi.y() - lo.y()) / n_cells[1],
                (hi.z() - lo.z()) / n_cells[2]);
  }
  /// Mesh parameter of the structured grid (longest cell edge); used as the
  /// length scale of the volume stabilization. Falls back to h for hand-built
  /// meshes without cell counts.
  double cell_edge_length() const {
    if (n_cells[0] < 1 || n_cells[1] < 1 || n_cells[2] < 1) return h;
    return cell_size().maxCoeff();
  }
  std::array<Vec3, 4> tet_coords(int t) const {
    const auto& tet = tets[t];
    return {vertices[tet[0]], vertices[tet[1]], vertices[tet[2]],
            vertices[tet[3]]};
  }
};

struct InteriorFace {
  int tet_plus = -1;
  int tet_minus = -1;
  std::array<int, 3> vertices = {-1, -1, -1};  // sorted global vertex indices
};

/// Subset of the background mesh cut by the discrete surface, with its
/// interior faces and the dof numbering of the active vertices.
struct ActiveMesh {
  const BoxMesh* parent = nullptr;
  std::vector<int> active_tets;          // ascending tet indices
  std::vector<InteriorFace> interior_faces;
  std::vector<int> active_vertices;      // ascending vertex indices
  std::vector<double> vertex_values;     // snapped level-set values, all vertices
  int n_dofs = 0;

  /// Dof index of a global vertex, or -1 if the vertex is not active.
  int dof_of_vertex(int vertex) const;

  std::array<double, 4> tet_values(int t) const {
    const auto& tet = parent->tets[t];
    return {vertex_values[tet[0]], vertex_values[tet[1]],
            vertex_values[tet[2]], vertex_values[tet[3]]};
  }
};

BoxMesh build_box_mesh(const Vec3& lo, const Vec3& hi,
                       const std::array<int, 3>& n_cells);

/// Vertex values of the level set with near-zero values snapped away from
/// zero (sign-preserving; exact zeros become +snap_tol, snap_tol = 1e-10 h).
std::vector<double> interpolate_levelset(const BoxMesh& mesh,
                                         const ImplicitSurface& surface);

/// Collects the tets on which the vertex values change sign, their interior
/// faces and the active vertex numbering. Throws surface_outside_mesh if no
/// tet is cut.
ActiveMesh extract_active_mesh(const BoxMesh& mesh,
                               const std::vector<double>& values);

/// Legacy-VTK ASCII dump (points = active vertices in dof order, cells =
/// active tets) for external visualization.
void write_active_mesh_vtk(const ActiveMesh& active, const std::string& path);

}  // namespace cutfem
