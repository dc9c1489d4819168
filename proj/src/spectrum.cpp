#include "cutfem/spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>

#include "cutfem/cut_geometry.hpp"
#include "cutfem/errors.hpp"

namespace cutfem {

SpectrumReport condition_number(const SparseMatrix& matrix,
                                const std::vector<double>* known_kernel,
                                double zero_threshold_rel, bool strict) {
  const int n = matrix.rows();
  if (n > 5000) {
    throw Error(ErrorCode::invalid_config,
                "condition_number: dense path limited to n <= 5000");
  }
  Eigen::MatrixXd a = matrix.to_dense();

  int deflated = 0;
  if (known_kernel) {
    if (static_cast<int>(known_kernel->size()) != n) {
      throw Error(ErrorCode::contract_violation,
                  "condition_number: kernel vector size mismatch");
    }
    Eigen::VectorXd k =
        Eigen::Map<const Eigen::VectorXd>(known_kernel->data(), n);
    k.normalize();
    Eigen::VectorXd w = k;
    w[0] -= 1.0;
    const double w_norm = w.norm();
    if (w_norm > 1e-14) {
      w /= w_norm;
      const Eigen::MatrixXd q =
          Eigen::MatrixXd::Identity(n, n) - 2.0 * w * w.transpose();
      a = q * a * q;
    }
    a = a.bottomRightCorner(n - 1, n - 1).eval();
    deflated = 1;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues();

  SpectrumReport report;
  report.lambda_max = lambda.cwiseAbs().maxCoeff();
  if (report.lambda_max == 0.0) {
    throw Error(ErrorCode::zero_matrix,
                "condition_number: all eigenvalues are zero");
  }
  const double threshold = zero_threshold_rel * report.lambda_max;
  double min_nonzero = report.lambda_max;
  int kernel_dim = 0;
  for (int i = 0; i < lambda.size(); ++i) {
    const double mag = std::abs(lambda[i]);
    if (mag <= threshold) {
      ++kernel_dim;
    } else {
      min_nonzero = std::min(min_nonzero, mag);
    }
  }
  if (kernel_dim == lambda.size()) {
    throw Error(ErrorCode::zero_matrix,
                "condition_number: all eigenvalues below threshold");
  }
  if (deflated && kernel_dim > 0 && strict) {
    throw Error(ErrorCode::kernel_mismatch,
                "condition_number: " + std::to_string(kernel_dim) +
                    " kernel directions left after deflation");
  }
  report.kernel_dim_detected = kernel_dim;
  report.lambda_min_nonzero = min_nonzero;
  report.kappa = report.lambda_max / min_nonzero;
  return report;
}

std::vector<SweepRow> condition_sweep(
    const std::function<ImplicitSurface(double)>& surface_family,
    const BoxMesh& mesh, const FormRecipe& recipe,
    const std::vector<double>& deltas, bool diag_scale) {
  FormRecipe operator_recipe = recipe;
  operator_recipe.include_mass = false;  // pure Laplace-Beltrami operator
  const double h2 = mesh.h * mesh.h;
  const std::int64_t n = static_cast<std::int64_t>(deltas.size());
  std::vector<SweepRow> rows(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    SweepRow row;
    row.delta = deltas[i];
    try {
      const ImplicitSurface surface = surface_family(deltas[i]);
      if (!(surface.bounding_box.lo.array() > mesh.lo.array()).all() ||
          !(surface.bounding_box.hi.array() < mesh.hi.array()).all()) {
        throw Error(ErrorCode::surface_outside_mesh,
                    "condition_sweep: translated surface leaves the mesh");
      }
      const std::vector<double> values = interpolate_levelset(mesh, surface);
      const ActiveMesh active = extract_active_mesh(mesh, values);
      const std::vector<SurfaceCell> cells = extract_surface_cells(active);
      SparseSystem system = combine(operator_recipe, active, cells);
      const SparseMatrix& op = system.matrix;
      const SpectrumReport report =
          condition_number(diag_scale ? op.diagonally_scaled() : op);
      row.n_dofs = system.n;
      row.lambda_max = report.lambda_max;
      row.lambda_min_nonzero = report.lambda_min_nonzero;
      row.kappa = report.kappa;
      row.h2_kappa = h2 * report.kappa;
      row.kernel_dim_detected = report.kernel_dim_detected;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows[i] = row;
  }
  return rows;
}

}  // namespace cutfem
