#pragma once

#include <vector>

#include "cutfem/assembly.hpp"

namespace cutfem {

struct SolveReport {
  std::vector<double> coefficients;
  int iterations = 0;
  double relative_residual = 0.0;
  bool deflated = false;
  bool rhs_projected = false;  // rhs had a component in the kernel
};

/// Diagonally preconditioned conjugate gradients. Pure Laplace-Beltrami
/// systems (no mass term) are solved in the subspace orthogonal to the
/// constant vector and the returned representative has zero surface-weighted
/// average. max_iter < 0 selects 10 * n.
SolveReport solve(const SparseSystem& system, double tol = 1e-10,
                  int max_iter = -1);

/// v - (w.v / w.1) 1: removes the surface-weighted mean.
std::vector<double> enforce_zero_mean(const std::vector<double>& coefficients,
                                      const std::vector<double>& surface_weights);

/// Dense symmetric factorization fallback (n <= 4000), with the constant
/// kernel handled by Householder deflation. Used as the oracle path.
std::vector<double> solve_dense(const SparseSystem& system);

}  // namespace cutfem
