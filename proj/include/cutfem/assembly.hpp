#pragma once

#include <functional>
#include <vector>

#include "cutfem/cut_geometry.hpp"
#include "cutfem/sparse.hpp"

namespace cutfem {

enum class GradientVariant { tangential, full };
enum class Stabilization { none, full_gradient, face };

/// Which discrete bilinear form to assemble: gradient variant, stabilization
/// term scaled by tau, optional surface mass term, and the h-exponent of the
/// full-gradient stabilization weight (1 by default; the face term carries no
/// h-weight unless face_power is set).
struct FormRecipe {
  GradientVariant gradient = GradientVariant::tangential;
  Stabilization stabilization = Stabilization::none;
  double tau = 0.0;
  bool include_mass = false;
  double stab_power = 1.0;
  double face_power = 0.0;
};

/// Assembled symmetric operator and load vector over the active dofs,
/// together with the recipe that produced it and the surface weights
/// w_j = integral of basis_j over the discrete surface (the zero-average
/// functional).
struct SparseSystem {
  int n = 0;
  SparseMatrix matrix;
  std::vector<double> rhs;
  FormRecipe recipe;
  std::vector<double> surface_weights;
};

/// Constant P1 basis gradients on a tet and barycentric evaluation.
struct TetBasis {
  std::array<Vec3, 4> grad;
  Vec3 v0;
  Mat3 inv_edges;  // maps (x - v0) to barycentric (l1, l2, l3)

  explicit TetBasis(const std::array<Vec3, 4>& coords);
  std::array<double, 4> eval(const Vec3& x) const;
};

SparseMatrix assemble_tangential_stiffness(const ActiveMesh& active,
                                           const std::vector<SurfaceCell>& cells);
SparseMatrix assemble_full_stiffness(const ActiveMesh& active,
                                     const std::vector<SurfaceCell>& cells);
/// (n_h . grad v)(n_h . grad w) over the surface cells; together with the
/// tangential form this splits the full form exactly.
SparseMatrix assemble_normal_stiffness(const ActiveMesh& active,
                                       const std::vector<SurfaceCell>& cells);
/// h^stab_power (grad v, grad w) over the active tets (volume integrals).
SparseMatrix assemble_full_gradient_stabilization(const ActiveMesh& active,
                                                  double stab_power = 1.0);
/// (n_F . [grad v], n_F . [grad w]) summed over interior faces, optionally
/// weighted by h^face_power.
SparseMatrix assemble_face_stabilization(const ActiveMesh& active,
                                         double face_power = 0.0);
SparseMatrix assemble_surface_mass(const ActiveMesh& active,
                                   const std::vector<SurfaceCell>& cells,
                                   int degree = 2);
/// Load vector of an already-extended right-hand side f^e.
std::vector<double> assemble_load(const ActiveMesh& active,
                                  const std::vector<SurfaceCell>& cells,
                                  const std::function<double(const Vec3&)>& f_extended,
                                  int degree = 4);
std::vector<double> surface_basis_weights(const ActiveMesh& active,
                                          const std::vector<SurfaceCell>& cells);

/// Assembles the full recipe. A null f yields a zero load vector (used by the
/// condition-number studies, which only need the operator).
SparseSystem combine(const FormRecipe& recipe, const ActiveMesh& active,
                     const std::vector<SurfaceCell>& cells,
                     const std::function<double(const Vec3&)>& f_extended = {});

}  // namespace cutfem
