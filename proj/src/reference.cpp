#include "cutfem/reference.hpp"

#include <cmath>
#include <map>

#include "cutfem/errors.hpp"

namespace cutfem::reference {

namespace {

using Accumulator = std::map<std::pair<int, int>, double>;

SparseMatrix to_matrix(int n, const Accumulator& acc) {
  std::vector<Triplet> triplets;
  triplets.reserve(acc.size());
  for (const auto& [key, value] : acc) {
    triplets.push_back({key.first, key.second, value});
  }
  return SparseMatrix::from_triplets(n, std::move(triplets));
}

std::array<int, 4> tet_dofs(const ActiveMesh& active, int tet) {
  const auto& verts = active.parent->tets[tet];
  std::array<int, 4> dofs;
  for (int v = 0; v < 4; ++v) dofs[v] = active.dof_of_vertex(verts[v]);
  return dofs;
}

}  // namespace

std::vector<double> spmv(const SparseMatrix& matrix,
                         const std::vector<double>& x) {
  const auto& row_ptr = matrix.row_ptr();
  const auto& col = matrix.col();
  const auto& val = matrix.values();
  std::vector<double> y(matrix.rows(), 0.0);
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      y[i] += val[k] * x[col[k]];
    }
  }
  return y;
}

std::vector<SurfaceCell> extract_surface_cells(const ActiveMesh& active) {
  std::vector<SurfaceCell> cells;
  cells.reserve(active.active_tets.size());
  for (int t : active.active_tets) {
    auto cell = cut_tet(active.parent->tet_coords(t), active.tet_values(t), t);
    if (!cell) {
      throw Error(ErrorCode::contract_violation,
                  "reference::extract_surface_cells: uncut active tet");
    }
    cells.push_back(*cell);
  }
  return cells;
}

SparseSystem combine(const FormRecipe& recipe, const ActiveMesh& active,
                     const std::vector<SurfaceCell>& cells,
                     const std::function<double(const Vec3&)>& f_extended) {
  Accumulator acc;
  std::vector<double> rhs(active.n_dofs, 0.0);
  std::vector<double> weights(active.n_dofs, 0.0);

  for (const SurfaceCell& cell : cells) {
    const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
    const auto dofs = tet_dofs(active, cell.parent_tet);

    std::array<Vec3, 4> g;
    for (int a = 0; a < 4; ++a) {
      g[a] = recipe.gradient == GradientVariant::tangential
                 ? Vec3(basis.grad[a] -
                        cell.normal.dot(basis.grad[a]) * cell.normal)
                 : basis.grad[a];
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        acc[{dofs[a], dofs[b]}] += cell.area * g[a].dot(g[b]);
      }
    }

    if (recipe.include_mass) {
      const QuadratureRule rule = surface_quadrature(cell, 2);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const auto phi = basis.eval(rule.points[q]);
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            acc[{dofs[a], dofs[b]}] += rule.weights[q] * phi[a] * phi[b];
          }
        }
      }
    }

    {
      const QuadratureRule rule = surface_quadrature(cell, 2);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const auto phi = basis.eval(rule.points[q]);
        for (int a = 0; a < 4; ++a) weights[dofs[a]] += rule.weights[q] * phi[a];
      }
    }

    if (f_extended) {
      const QuadratureRule rule = surface_quadrature(cell, 4);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const double fq = f_extended(rule.points[q]);
        const auto phi = basis.eval(rule.points[q]);
        for (int a = 0; a < 4; ++a) {
          rhs[dofs[a]] += rule.weights[q] * fq * phi[a];
        }
      }
    }
  }

  if (recipe.tau > 0.0 && recipe.stabilization == Stabilization::full_gradient) {
    const double weight =
        recipe.tau * std::pow(active.parent->cell_edge_length(), recipe.stab_power);
    for (int t : active.active_tets) {
      const auto coords = active.parent->tet_coords(t);
      const TetBasis basis(coords);
      const double scale = weight * tet_volume(coords);
      const auto dofs = tet_dofs(active, t);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          acc[{dofs[a], dofs[b]}] += scale * basis.grad[a].dot(basis.grad[b]);
        }
      }
    }
  }
  if (recipe.tau > 0.0 && recipe.stabilization == Stabilization::face) {
    const double weight =
        recipe.face_power == 0.0
            ? recipe.tau
            : recipe.tau * std::pow(active.parent->cell_edge_length(), recipe.face_power);
    for (const InteriorFace& face : active.interior_faces) {
      const Vec3& p0 = active.parent->vertices[face.vertices[0]];
      const Vec3& p1 = active.parent->vertices[face.vertices[1]];
      const Vec3& p2 = active.parent->vertices[face.vertices[2]];
      const Vec3 cross = (p1 - p0).cross(p2 - p0);
      const double area = 0.5 * cross.norm();
      const Vec3 n_f = cross.normalized();
      const TetBasis bp(active.parent->tet_coords(face.tet_plus));
      const TetBasis bm(active.parent->tet_coords(face.tet_minus));
      std::map<int, double> jump;
      for (int a = 0; a < 4; ++a) {
        jump[active.parent->tets[face.tet_plus][a]] += n_f.dot(bp.grad[a]);
        jump[active.parent->tets[face.tet_minus][a]] -= n_f.dot(bm.grad[a]);
      }
      for (const auto& [va, ja] : jump) {
        for (const auto& [vb, jb] : jump) {
          acc[{active.dof_of_vertex(va), active.dof_of_vertex(vb)}] +=
              weight * area * ja * jb;
        }
      }
    }
  }

  SparseSystem system;
  system.n = active.n_dofs;
  system.recipe = recipe;
  system.matrix = to_matrix(active.n_dofs, acc);
  system.rhs = std::move(rhs);
  system.surface_weights = std::move(weights);
  return system;
}

double l2_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree) {
  double sum = 0.0;  // one global accumulator, point by point
  for (const SurfaceCell& cell : cells) {
    const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
    const auto& tet = active.parent->tets[cell.parent_tet];
    const QuadratureRule rule = surface_quadrature(cell, degree);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = basis.eval(rule.points[q]);
      double uh = 0.0;
      for (int v = 0; v < 4; ++v) {
        uh += coefficients[active.dof_of_vertex(tet[v])] * phi[v];
      }
      const double ue =
          extend_scalar(problem.exact_u, problem.surface, rule.points[q]);
      sum += rule.weights[q] * (uh - ue) * (uh - ue);
    }
  }
  return std::sqrt(sum);
}

}  // namespace cutfem::reference
