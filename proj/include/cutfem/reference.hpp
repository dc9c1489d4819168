#pragma once

#include "cutfem/assembly.hpp"
#include "cutfem/manufactured.hpp"

namespace cutfem::reference {

/// Serial reference implementations of the parallel kernels. They share the
/// per-element math but accumulate in plain loops (map-based for assembly),
/// so they exercise a different summation path. Tests compare them against
/// the OpenMP kernels; the benchmark tool times both.

std::vector<double> spmv(const SparseMatrix& matrix,
                         const std::vector<double>& x);

std::vector<SurfaceCell> extract_surface_cells(const ActiveMesh& active);

SparseSystem combine(const FormRecipe& recipe, const ActiveMesh& active,
                     const std::vector<SurfaceCell>& cells,
                     const std::function<double(const Vec3&)>& f_extended = {});

double l2_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree = 4);

}  // namespace cutfem::reference
