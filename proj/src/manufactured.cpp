#include "cutfem/manufactured.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "cutfem/errors.hpp"
#include "parallel_util.hpp"

namespace cutfem {

ManufacturedProblem make_example1() {
  ManufacturedProblem p;
  p.name = "example1";
  p.surface = builtin_surface("sphere");
  const double c = M_PI / 2.0;
  p.exact_u = [c](const Vec3& x) {
    return std::sin(c * x.x()) * std::sin(c * x.y()) * std::sin(c * x.z());
  };
  p.exact_grad_u = [c](const Vec3& x) {
    const double sx = std::sin(c * x.x()), cx = std::cos(c * x.x());
    const double sy = std::sin(c * x.y()), cy = std::cos(c * x.y());
    const double sz = std::sin(c * x.z()), cz = std::cos(c * x.z());
    return Vec3(c * cx * sy * sz, c * sx * cy * sz, c * sx * sy * cz);
  };
  p.exact_hess_u = [c](const Vec3& x) {
    const double sx = std::sin(c * x.x()), cx = std::cos(c * x.x());
    const double sy = std::sin(c * x.y()), cy = std::cos(c * x.y());
    const double sz = std::sin(c * x.z()), cz = std::cos(c * x.z());
    Mat3 h;
    h(0, 0) = -c * c * sx * sy * sz;
    h(1, 1) = -c * c * sx * sy * sz;
    h(2, 2) = -c * c * sx * sy * sz;
    h(0, 1) = h(1, 0) = c * c * cx * cy * sz;
    h(0, 2) = h(2, 0) = c * c * cx * sy * cz;
    h(1, 2) = h(2, 1) = c * c * sx * cy * cz;
    return h;
  };
  return p;
}

ManufacturedProblem make_example2() {
  ManufacturedProblem p;
  p.name = "example2";
  p.surface = builtin_surface("blob");
  p.exact_u = [](const Vec3& x) {
    return x.x() * x.y() - 5.0 * x.y() + x.z() + x.x() * x.z();
  };
  p.exact_grad_u = [](const Vec3& x) {
    return Vec3(x.y() + x.z(), x.x() - 5.0, 1.0 + x.x());
  };
  p.exact_hess_u = [](const Vec3&) {
    Mat3 h = Mat3::Zero();
    h(0, 1) = h(1, 0) = 1.0;
    h(0, 2) = h(2, 0) = 1.0;
    return h;
  };
  return p;
}

double laplace_beltrami_at(const ManufacturedProblem& problem,
                           const SurfacePoint& point, double fd_step) {
  const ImplicitSurface& surface = problem.surface;
  const Vec3& x = point.position;
  const Vec3 grad_phi = surface.gradient(x);
  const double grad_norm = grad_phi.norm();
  if (grad_norm < 0.5 * surface.g_min) {
    throw Error(ErrorCode::degenerate_gradient,
                "laplace_beltrami_at: degenerate level-set gradient");
  }
  const Vec3 n = grad_phi / grad_norm;

  const Mat3 hess_u = problem.exact_hess_u(x);
  const Vec3 grad_u = problem.exact_grad_u(x);
  const double lap_u = hess_u.trace();

  double div_n;
  if (surface.hessian) {
    const Mat3 hess_phi = surface.hessian(x);
    div_n = (hess_phi.trace() - n.dot(hess_phi * n)) / grad_norm;
  } else {
    if (fd_step <= 0.0) {
      fd_step = std::sqrt(std::numeric_limits<double>::epsilon()) *
                surface.diameter();
    }
    div_n = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = x, xm = x;
      xp[i] += fd_step;
      xm[i] -= fd_step;
      const double np = surface.gradient(xp).normalized()[i];
      const double nm = surface.gradient(xm).normalized()[i];
      div_n += (np - nm) / (2.0 * fd_step);
    }
  }
  return lap_u - n.dot(hess_u * n) - div_n * grad_u.dot(n);
}

double manufactured_rhs(const ManufacturedProblem& problem, const Vec3& x) {
  const SurfacePoint p = closest_point(problem.surface, x);
  return -laplace_beltrami_at(problem, p) + problem.exact_u(p.position);
}

ExactFieldCache sample_exact_fields(const ActiveMesh& active,
                                    const std::vector<SurfaceCell>& cells,
                                    const ManufacturedProblem& problem,
                                    int degree, bool with_gradients) {
  ExactFieldCache cache;
  cache.degree = degree;
  cache.has_gradients = with_gradients;
  const std::int64_t n_cells = static_cast<std::int64_t>(cells.size());
  cache.u.resize(n_cells);
  cache.grad_u.resize(n_cells);
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t c = 0; c < n_cells; ++c) {
    guard.run([&, c] {
      const QuadratureRule rule = surface_quadrature(cells[c], degree);
      auto& u_row = cache.u[c];
      auto& g_row = cache.grad_u[c];
      u_row.resize(rule.points.size());
      if (with_gradients) g_row.resize(rule.points.size());
      for (size_t q = 0; q < rule.points.size(); ++q) {
        u_row[q] =
            extend_scalar(problem.exact_u, problem.surface, rule.points[q]);
        if (with_gradients) {
          g_row[q] = extended_gradient(problem.exact_u, problem.surface,
                                       rule.points[q]);
        }
      }
    });
  }
  guard.rethrow();
  (void)active;
  return cache;
}

namespace {

// Deterministic parallel reduction: per-cell partial sums combined in cell
// order.
template <typename CellTerm>
double reduce_over_cells(std::int64_t n_cells, CellTerm&& term) {
  std::vector<double> partial(n_cells);
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t c = 0; c < n_cells; ++c) {
    guard.run([&, c] { partial[c] = term(c); });
  }
  guard.rethrow();
  double sum = 0.0;
  for (std::int64_t c = 0; c < n_cells; ++c) sum += partial[c];
  return sum;
}

}  // namespace

double l2_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree,
                const ExactFieldCache* cache) {
  if (cache && cache->degree != degree) {
    throw Error(ErrorCode::contract_violation, "l2_error: cache degree mismatch");
  }
  const double sum = reduce_over_cells(
      static_cast<std::int64_t>(cells.size()), [&](std::int64_t c) {
        const SurfaceCell& cell = cells[c];
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        const auto& tet = active.parent->tets[cell.parent_tet];
        std::array<double, 4> coeff;
        for (int v = 0; v < 4; ++v) {
          coeff[v] = coefficients[active.dof_of_vertex(tet[v])];
        }
        const QuadratureRule rule = surface_quadrature(cell, degree);
        double acc = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const auto phi = basis.eval(rule.points[q]);
          double uh = 0.0;
          for (int v = 0; v < 4; ++v) uh += coeff[v] * phi[v];
          const double ue =
              cache ? cache->u[c][q]
                    : extend_scalar(problem.exact_u, problem.surface,
                                    rule.points[q]);
          acc += rule.weights[q] * (uh - ue) * (uh - ue);
        }
        return acc;
      });
  return std::sqrt(sum);
}

double h1_error(const ActiveMesh& active, const std::vector<SurfaceCell>& cells,
                const std::vector<double>& coefficients,
                const ManufacturedProblem& problem, int degree,
                bool full_gradient_norm, const ExactFieldCache* cache) {
  if (cache && (!cache->has_gradients || cache->degree != degree)) {
    throw Error(ErrorCode::contract_violation, "h1_error: cache mismatch");
  }
  const double l2 = l2_error(active, cells, coefficients, problem, degree, cache);
  const double grad_sq = reduce_over_cells(
      static_cast<std::int64_t>(cells.size()), [&](std::int64_t c) {
        const SurfaceCell& cell = cells[c];
        const TetBasis basis(active.parent->tet_coords(cell.parent_tet));
        const auto& tet = active.parent->tets[cell.parent_tet];
        Vec3 grad_uh = Vec3::Zero();
        for (int v = 0; v < 4; ++v) {
          grad_uh +=
              coefficients[active.dof_of_vertex(tet[v])] * basis.grad[v];
        }
        const QuadratureRule rule = surface_quadrature(cell, degree);
        double acc = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const Vec3 grad_ue =
              cache ? cache->grad_u[c][q]
                    : extended_gradient(problem.exact_u, problem.surface,
                                        rule.points[q]);
          Vec3 diff = grad_uh - grad_ue;
          if (!full_gradient_norm) {
            diff -= cell.normal.dot(diff) * cell.normal;
          }
          acc += rule.weights[q] * diff.squaredNorm();
        }
        return acc;
      });
  return std::sqrt(l2 * l2 + grad_sq);
}

std::vector<double> eoc(const std::vector<std::pair<int, double>>& errors) {
  std::vector<double> rates;
  for (size_t k = 1; k < errors.size(); ++k) {
    const double levels = errors[k].first - errors[k - 1].first;
    rates.push_back(std::log(errors[k - 1].second / errors[k].second) /
                    (levels * std::log(2.0)));
  }
  return rates;
}

}  // namespace cutfem
