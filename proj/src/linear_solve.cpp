#include "cutfem/linear_solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cutfem/errors.hpp"

namespace cutfem {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Removes the mean, i.e. projects onto the complement of span{1}.
void project_out_constants(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

std::vector<double> enforce_zero_mean(const std::vector<double>& coefficients,
                                      const std::vector<double>& surface_weights) {
  if (coefficients.size() != surface_weights.size()) {
    throw Error(ErrorCode::contract_violation,
                "enforce_zero_mean: size mismatch");
  }
  double wv = 0.0, w1 = 0.0;
  for (size_t i = 0; i < coefficients.size(); ++i) {
    wv += surface_weights[i] * coefficients[i];
    w1 += surface_weights[i];
  }
  const double shift = wv / w1;
  std::vector<double> out(coefficients.size());
  for (size_t i = 0; i < coefficients.size(); ++i) {
    out[i] = coefficients[i] - shift;
  }
  return out;
}

SolveReport solve(const SparseSystem& system, double tol, int max_iter) {
  const int n = system.n;
  if (max_iter < 0) max_iter = 10 * n;
  const bool kernel = !system.recipe.include_mass;

  SolveReport report;
  report.deflated = kernel;

  std::vector<double> b = system.rhs;
  if (kernel) {
    double sum = 0.0;
    for (double x : b) sum += x;
    const double b_norm = norm(b);
    if (b_norm > 0.0 && std::abs(sum) > tol * b_norm) {
      report.rhs_projected = true;
    }
    project_out_constants(b);
  }

  const double b_norm = norm(b);
  if (b_norm == 0.0) {
    report.coefficients.assign(n, 0.0);
    return report;
  }

  std::vector<double> inv_diag = system.matrix.diagonal();
  double d_max = 0.0;
  for (double d : inv_diag) d_max = std::max(d_max, std::abs(d));
  for (double& d : inv_diag) d = (d > 1e-14 * d_max) ? 1.0 / d : 1.0;

  std::vector<double> x(n, 0.0), r(n), z(n), p(n), ap(n);
  int it = 0;
  double rel = 1.0;
  double prev_restart_rel = std::numeric_limits<double>::infinity();

  // Restarting against the true residual closes the drift of the recursive
  // residual on ill-conditioned systems; stop once a restart makes no
  // further progress.
  for (int restart = 0; restart < 8; ++restart) {
    system.matrix.multiply(x.data(), ap.data());
    for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    if (kernel) project_out_constants(r);
    rel = norm(r) / b_norm;
    if (rel <= tol || it >= max_iter || rel >= 0.5 * prev_restart_rel) break;
    prev_restart_rel = rel;

    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    if (kernel) project_out_constants(z);
    p = z;
    double rz = dot(r, z);
    while (rel > 0.25 * tol && it < max_iter) {
      system.matrix.multiply(p.data(), ap.data());
      const double pap = dot(p, ap);
      if (pap <= 0.0) {
        if (pap < -1e-12 * d_max * dot(p, p)) {
          throw Error(ErrorCode::matrix_not_psd,
                      "solve: negative curvature direction in CG");
        }
        break;  // numerical breakdown at the round-off floor
      }
      const double alpha = rz / pap;
      for (int i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      if (kernel) project_out_constants(r);
      for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      if (kernel) project_out_constants(z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      ++it;
      rel = norm(r) / b_norm;
    }
  }

  if (rel > tol) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "solve: CG did not reach tolerance, residual %.3e after %d "
                  "iterations",
                  rel, it);
    throw Error(ErrorCode::solver_not_converged, msg);
  }

  report.iterations = it;
  report.relative_residual = rel;
  report.coefficients =
      kernel ? enforce_zero_mean(x, system.surface_weights) : std::move(x);
  return report;
}

std::vector<double> solve_dense(const SparseSystem& system) {
  const int n = system.n;
  if (n > 4000) {
    throw Error(ErrorCode::invalid_config, "solve_dense: n > 4000");
  }
  const Eigen::MatrixXd a = system.matrix.to_dense();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = system.rhs[i];

  const bool kernel = !system.recipe.include_mass;
  Eigen::VectorXd x(n);
  if (!kernel) {
    x = a.ldlt().solve(b);
  } else {
    // Householder reflection sending 1/sqrt(n) to e_0; dropping the first row
    // and column removes the constant kernel exactly.
    Eigen::VectorXd k = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    Eigen::VectorXd w = k;
    w[0] -= 1.0;
    const double w_norm = w.norm();
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    if (w_norm > 1e-14) {
      w /= w_norm;
      q -= 2.0 * w * w.transpose();
    }
    const Eigen::MatrixXd qaq = q * a * q;
    const Eigen::VectorXd qb = q * b;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    y.tail(n - 1) =
        qaq.bottomRightCorner(n - 1, n - 1).ldlt().solve(qb.tail(n - 1));
    x = q * y;
  }
  std::vector<double> out(x.data(), x.data() + n);
  return kernel ? enforce_zero_mean(out, system.surface_weights) : out;
}

}  // namespace cutfem
