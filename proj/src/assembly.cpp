#include "cutfem/assembly.hpp"

#include <cmath>
#include <cstdint>

#include "cutfem/errors.hpp"
#include "parallel_util.hpp"

namespace cutfem {

TetBasis::TetBasis(const std::array<Vec3, 4>& coords) : v0(coords[0]) {
  Mat3 edges;
  edges.col(0) = coords[1] - coords[0];
  edges.col(1) = coords[2] - coords[0];
  edges.col(2) = coords[3] - coords[0];
  inv_edges = edges.inverse();
  for (int i = 0; i < 3; ++i) grad[i + 1] = inv_edges.row(i);
  grad[0] = -(grad[1] + grad[2] + grad[3]);
}

std::array<double, 4> TetBasis::eval(const Vec3& x) const {
  const Vec3 l = inv_edges * (x - v0);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

namespace {

using DofArray = std::array<int, 4>;

DofArray tet_dofs(const ActiveMesh& active, int tet) {
  const auto& verts = active.parent->tets[tet];
  DofArray dofs;
  for (int v = 0; v < 4; ++v) dofs[v] = active.dof_of_vertex(verts[v]);
  return dofs;
}

// Per-cell 4x4 contributions written into a preallocated slice of 16
// triplets, so the parallel element loop produces a fixed layout.
template <typename LocalMatrix>
SparseMatrix assemble_cellwise(const ActiveMesh& active,
                               const std::vector<SurfaceCell>& cells,
                               LocalMatrix&& local) {
  const std::int64_t n_cells = static_cast<std::int64_t>(cells.size());
  std::vector<Triplet> triplets(16 * n_cells);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n_cells; ++c) {
    const SurfaceCell& cell = cells[c];
    const DofArray dofs = tet_dofs(active, cell.parent_tet);
    std::array<std::array<double, 4>, 4> m{};
    local(cell, m);
    int k = 0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        triplets[16 * c + k++] = {dofs[a], dofs[b], m[a][b]};
      }
    }
  }
  return SparseMatrix::from_triplets(active.n_dofs, std::move(triplets));
}

}  // namespace

SparseMatrix assemble_tangential_stiffness(const ActiveMesh& active,
                                           const std::vector<SurfaceCell>& cells) {
  return assemble_cellwise(
      active, cells,
      [&](const SurfaceCell& cell, std::array<std::array<double, 4>, 4>& m) {
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        std::array<Vec3, 4> pg;
        for (int a = 0; a < 4; ++a) {
          pg[a] = basis.grad[a] - cell.normal.dot(basis.grad[a]) * cell.normal;
        }
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            m[a][b] = cell.area * pg[a].dot(pg[b]);
          }
        }
      });
}

SparseMatrix assemble_full_stiffness(const ActiveMesh& active,
                                     const std::vector<SurfaceCell>& cells) {
  return assemble_cellwise(
      active, cells,
      [&](const SurfaceCell& cell, std::array<std::array<double, 4>, 4>& m) {
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            m[a][b] = cell.area * basis.grad[a].dot(basis.grad[b]);
          }
        }
      });
}

SparseMatrix assemble_normal_stiffness(const ActiveMesh& active,
                                       const std::vector<SurfaceCell>& cells) {
  return assemble_cellwise(
      active, cells,
      [&](const SurfaceCell& cell, std::array<std::array<double, 4>, 4>& m) {
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        std::array<double, 4> ng;
        for (int a = 0; a < 4; ++a) ng[a] = cell.normal.dot(basis.grad[a]);
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            m[a][b] = cell.area * ng[a] * ng[b];
          }
        }
      });
}

SparseMatrix assemble_full_gradient_stabilization(const ActiveMesh& active,
                                                  double stab_power) {
  const double weight = std::pow(active.parent->cell_edge_length(), stab_power);
  const std::int64_t n_tets = static_cast<std::int64_t>(active.active_tets.size());
  std::vector<Triplet> triplets(16 * n_tets);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n_tets; ++i) {
    const int t = active.active_tets[i];
    const auto coords = active.parent->tet_coords(t);
    const TetBasis basis(coords);
    const double scale = weight * tet_volume(coords);
    const DofArray dofs = tet_dofs(active, t);
    int k = 0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        triplets[16 * i + k++] = {dofs[a], dofs[b],
                                  scale * basis.grad[a].dot(basis.grad[b])};
      }
    }
  }
  return SparseMatrix::from_triplets(active.n_dofs, std::move(triplets));
}

SparseMatrix assemble_face_stabilization(const ActiveMesh& active,
                                         double face_power) {
  const double weight =
      face_power == 0.0 ? 1.0 : std::pow(active.parent->cell_edge_length(), face_power);
  const std::int64_t n_faces =
      static_cast<std::int64_t>(active.interior_faces.size());
  // A face couples the union of the two tets' vertices (5 in a conforming
  // mesh); count first, then fill fixed slices.
  std::vector<int> offsets(n_faces + 1, 0);
  std::vector<std::array<int, 8>> local_verts(n_faces);
  std::vector<int> local_count(n_faces);
  for (std::int64_t f = 0; f < n_faces; ++f) {
    const InteriorFace& face = active.interior_faces[f];
    std::array<int, 8> verts{};
    int m = 0;
    for (int v : active.parent->tets[face.tet_plus]) verts[m++] = v;
    for (int v : active.parent->tets[face.tet_minus]) {
      bool seen = false;
      for (int i = 0; i < m; ++i) seen = seen || verts[i] == v;
      if (!seen) verts[m++] = v;
    }
    local_verts[f] = verts;
    local_count[f] = m;
    offsets[f + 1] = offsets[f] + m * m;
  }
  std::vector<Triplet> triplets(offsets[n_faces]);
#pragma omp parallel for schedule(static)
  for (std::int64_t f = 0; f < n_faces; ++f) {
    const InteriorFace& face = active.interior_faces[f];
    const Vec3& p0 = active.parent->vertices[face.vertices[0]];
    const Vec3& p1 = active.parent->vertices[face.vertices[1]];
    const Vec3& p2 = active.parent->vertices[face.vertices[2]];
    const Vec3 cross = (p1 - p0).cross(p2 - p0);
    const double area = 0.5 * cross.norm();
    const Vec3 n_f = cross.normalized();

    const TetBasis basis_plus(active.parent->tet_coords(face.tet_plus));
    const TetBasis basis_minus(active.parent->tet_coords(face.tet_minus));
    const auto& tet_plus = active.parent->tets[face.tet_plus];
    const auto& tet_minus = active.parent->tets[face.tet_minus];

    const int m = local_count[f];
    std::array<double, 8> jump{};
    for (int i = 0; i < m; ++i) {
      const int v = local_verts[f][i];
      double j = 0.0;
      for (int a = 0; a < 4; ++a) {
        if (tet_plus[a] == v) j += n_f.dot(basis_plus.grad[a]);
        if (tet_minus[a] == v) j -= n_f.dot(basis_minus.grad[a]);
      }
      jump[i] = j;
    }
    int k = offsets[f];
    for (int a = 0; a < m; ++a) {
      const int dof_a = active.dof_of_vertex(local_verts[f][a]);
      for (int b = 0; b < m; ++b) {
        triplets[k++] = {dof_a, active.dof_of_vertex(local_verts[f][b]),
                         weight * area * jump[a] * jump[b]};
      }
    }
  }
  return SparseMatrix::from_triplets(active.n_dofs, std::move(triplets));
}

SparseMatrix assemble_surface_mass(const ActiveMesh& active,
                                   const std::vector<SurfaceCell>& cells,
                                   int degree) {
  return assemble_cellwise(
      active, cells,
      [&](const SurfaceCell& cell, std::array<std::array<double, 4>, 4>& m) {
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        const QuadratureRule rule = surface_quadrature(cell, degree);
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const auto phi = basis.eval(rule.points[q]);
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
              m[a][b] += rule.weights[q] * phi[a] * phi[b];
            }
          }
        }
      });
}

namespace {

std::vector<double> accumulate_cellwise(
    const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
    const std::function<double(const Vec3&)>& f, int degree) {
  const std::int64_t n_cells = static_cast<std::int64_t>(cells.size());
  std::vector<std::array<double, 4>> local(n_cells);
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t c = 0; c < n_cells; ++c) {
    guard.run([&, c] {
      const SurfaceCell& cell = cells[c];
      const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
      const QuadratureRule rule = surface_quadrature(cell, degree);
      std::array<double, 4> acc{};
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const double fq = f ? f(rule.points[q]) : 1.0;
        const auto phi = basis.eval(rule.points[q]);
        for (int a = 0; a < 4; ++a) acc[a] += rule.weights[q] * fq * phi[a];
      }
      local[c] = acc;
    });
  }
  guard.rethrow();
  std::vector<double> out(active.n_dofs, 0.0);
  for (std::int64_t c = 0; c < n_cells; ++c) {
    const DofArray dofs = tet_dofs(active, cells[c].parent_tet);
    for (int a = 0; a < 4; ++a) out[dofs[a]] += local[c][a];
  }
  return out;
}

}  // namespace

std::vector<double> assemble_load(const ActiveMesh& active,
                                  const std::vector<SurfaceCell>& cells,
                                  const std::function<double(const Vec3&)>& f_extended,
                                  int degree) {
  if (!f_extended) {
    return std::vector<double>(active.n_dofs, 0.0);
  }
  return accumulate_cellwise(active, cells, f_extended, degree);
}

std::vector<double> surface_basis_weights(const ActiveMesh& active,
                                          const std::vector<SurfaceCell>& cells) {
  return accumulate_cellwise(active, cells, {}, 2);
}

SparseSystem combine(const FormRecipe& recipe, const ActiveMesh& active,
                     const std::vector<SurfaceCell>& cells,
                     const std::function<double(const Vec3&)>& f_extended) {
  if (recipe.tau < 0.0) {
    throw Error(ErrorCode::invalid_config, "combine: tau must be >= 0");
  }
  SparseSystem system;
  system.n = active.n_dofs;
  system.recipe = recipe;
  system.matrix = recipe.gradient == GradientVariant::tangential
                      ? assemble_tangential_stiffness(active, cells)
                      : assemble_full_stiffness(active, cells);
  if (recipe.tau > 0.0) {
    switch (recipe.stabilization) {
      case Stabilization::none:
        break;
      case Stabilization::full_gradient:
        system.matrix = system.matrix.axpy(
            recipe.tau,
            assemble_full_gradient_stabilization(active, recipe.stab_power));
        break;
      case Stabilization::face:
        system.matrix = system.matrix.axpy(
            recipe.tau, assemble_face_stabilization(active, recipe.face_power));
        break;
    }
  }
  if (recipe.include_mass) {
    system.matrix = system.matrix.axpy(1.0, assemble_surface_mass(active, cells));
  }
  system.rhs = assemble_load(active, cells, f_extended);
  system.surface_weights = surface_basis_weights(active, cells);
  return system;
}

}  // namespace cutfem
