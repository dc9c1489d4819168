// Times the OpenMP kernels against their serial reference implementations on
// a sphere discretization: cut extraction, system assembly, sparse
// matrix-vector products and the L2 error integral.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cutfem/reference.hpp"
#include "cutfem/study.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx\n",
              name, 1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int level = argc > 1 ? std::atoi(argv[1]) : 3;
  const int n = 5 << level;
#ifdef _OPENMP
  std::printf("mesh level %d (%d cells/axis), %d OpenMP threads\n", level, n,
              omp_get_max_threads());
#else
  std::printf("mesh level %d (%d cells/axis), OpenMP disabled\n", level, n);
#endif

  const cutfem::ManufacturedProblem problem = cutfem::make_example1();
  const cutfem::BoxMesh mesh = cutfem::build_box_mesh(
      cutfem::Vec3::Constant(-1.6), cutfem::Vec3::Constant(1.6), {n, n, n});
  const std::vector<double> values =
      cutfem::interpolate_levelset(mesh, problem.surface);
  const cutfem::ActiveMesh active = cutfem::extract_active_mesh(mesh, values);

  auto t0 = Clock::now();
  const auto cells_serial = cutfem::reference::extract_surface_cells(active);
  const double t_cells_serial = seconds_since(t0);
  t0 = Clock::now();
  const auto cells = cutfem::extract_surface_cells(active);
  const double t_cells_parallel = seconds_since(t0);
  std::printf("active tets %zu, surface cells %zu, dofs %d\n",
              active.active_tets.size(), cells.size(), active.n_dofs);
  report("extract_surface_cells", t_cells_serial, t_cells_parallel);

  cutfem::FormRecipe recipe;
  recipe.gradient = cutfem::GradientVariant::full;
  recipe.stabilization = cutfem::Stabilization::full_gradient;
  recipe.tau = 1.0;
  recipe.include_mass = true;
  auto f = [&](const cutfem::Vec3& x) {
    return cutfem::manufactured_rhs(problem, x);
  };

  t0 = Clock::now();
  const auto system_serial = cutfem::reference::combine(recipe, active, cells, f);
  const double t_asm_serial = seconds_since(t0);
  t0 = Clock::now();
  const auto system = cutfem::combine(recipe, active, cells, f);
  const double t_asm_parallel = seconds_since(t0);
  report("combine", t_asm_serial, t_asm_parallel);

  std::vector<double> x(system.n);
  for (int i = 0; i < system.n; ++i) x[i] = 1.0 + 0.001 * (i % 97);
  const int reps = 200;
  std::vector<double> y(system.n);
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) y = cutfem::reference::spmv(system.matrix, x);
  const double t_spmv_serial = seconds_since(t0);
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) system.matrix.multiply(x.data(), y.data());
  const double t_spmv_parallel = seconds_since(t0);
  report("spmv x200", t_spmv_serial, t_spmv_parallel);

  const std::vector<double> coeffs(system.n, 1.0);
  t0 = Clock::now();
  const double e_serial =
      cutfem::reference::l2_error(active, cells, coeffs, problem);
  const double t_err_serial = seconds_since(t0);
  t0 = Clock::now();
  const double e_parallel = cutfem::l2_error(active, cells, coeffs, problem);
  const double t_err_parallel = seconds_since(t0);
  report("l2_error", t_err_serial, t_err_parallel);
  std::printf("l2_error agreement: serial %.12e parallel %.12e\n", e_serial,
              e_parallel);
  return 0;
}
