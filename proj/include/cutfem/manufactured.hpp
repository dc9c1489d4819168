#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cutfem/assembly.hpp"
#include "cutfem/level_set.hpp"

namespace cutfem {

/// Analytic reference problem: a surface, an exact solution defined in the
/// ambient space (so it extends off the surface) and its derivatives.
struct ManufacturedProblem {
  ImplicitSurface surface;
  std::function<double(const Vec3&)> exact_u;
  std::function<Vec3(const Vec3&)> exact_grad_u;
  std::function<Mat3(const Vec3&)> exact_hess_u;
  std::string name;
};

/// u = sin(pi x/2) sin(pi y/2) sin(pi z/2) on the unit sphere.
ManufacturedProblem make_example1();
/// u = xy - 5y + z + xz on the sextic blob surface.
ManufacturedProblem make_example2();

/// Surface Laplacian of exact_u at a surface point via
/// lap u - n.(hess u)n - tr(grad n)(grad u . n) with n = grad phi/|grad phi|.
/// tr(grad n) uses the level-set Hessian when available, otherwise central
/// differences of the normal field with step fd_step.
double laplace_beltrami_at(const ManufacturedProblem& problem,
                           const SurfacePoint& point, double fd_step = -1.0);

/// Right-hand side of -lap_G u + u = f, evaluated through the closest-point
/// projection: already the extended f^e.
double manufactured_rhs(const ManufacturedProblem& problem, const Vec3& x);

/// Exact solution and gradient sampled at the quadrature points of every
/// cell, so several error evaluations over the same geometry can share the
/// projection work.
struct ExactFieldCache {
  int degree = 0;
  std::vector<std::vector<double>> u;       // per cell, per quadrature point
  std::vector<std::vector<Vec3>> grad_u;    // filled on demand for H1
  bool has_gradients = false;
};

ExactFieldCache sample_exact_fields(const ActiveMesh& active,
                                    const std::vector<SurfaceCell>& cells,
                                    const ManufacturedProblem& problem,
                                    int degree, bool with_gradients);

/// || u_h - u^e || over the discrete surface (quadrature degree 4).
double l2_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree = 4,
                const ExactFieldCache* cache = nullptr);

/// sqrt(L2^2 + || P (grad u_h - grad u^e) ||^2) with P the projection by the
/// cell normal; full_gradient_norm = true skips the projection.
double h1_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree = 4,
                bool full_gradient_norm = false,
                const ExactFieldCache* cache = nullptr);

/// Experimental orders of convergence log(E_{k-1}/E_k)/((l_k - l_{k-1}) log 2)
/// for a list of (level, error) pairs.
std::vector<double> eoc(const std::vector<std::pair<int, double>>& errors);

}  // namespace cutfem
