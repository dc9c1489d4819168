#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cutfem/assembly.hpp"
#include "cutfem/background_mesh.hpp"

namespace cutfem {

struct SpectrumReport {
  double lambda_max = 0.0;           // largest |eigenvalue|
  double lambda_min_nonzero = 0.0;   // smallest |eigenvalue| above threshold
  int kernel_dim_detected = 0;
  double kappa = 0.0;                // lambda_max / lambda_min_nonzero
};

/// Condition number by dense symmetric eigendecomposition (n <= ~5000).
/// Eigenvalues with |lambda| <= zero_threshold_rel * |lambda_max| count as
/// kernel. A supplied kernel vector is deflated exactly first; any kernel
/// still detected afterwards is a mismatch (error in strict mode).
SpectrumReport condition_number(const SparseMatrix& matrix,
                                const std::vector<double>* known_kernel = nullptr,
                                double zero_threshold_rel = 1e-9,
                                bool strict = false);

struct SweepRow {
  double delta = 0.0;
  int n_dofs = 0;
  double lambda_max = 0.0;
  double lambda_min_nonzero = 0.0;
  double kappa = 0.0;
  double h2_kappa = 0.0;
  int kernel_dim_detected = 0;
  bool failed = false;
  std::string error;
};

/// For each delta: interpolate the level set, extract the active mesh and
/// surface cells, assemble the pure Laplace-Beltrami operator (no mass) per
/// recipe and compute its condition number. A failing delta is recorded and
/// the sweep continues.
std::vector<SweepRow> condition_sweep(
    const std::function<ImplicitSurface(double)>& surface_family,
    const BoxMesh& mesh, const FormRecipe& recipe,
    const std::vector<double>& deltas, bool diag_scale = false);

}  // namespace cutfem
