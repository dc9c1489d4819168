#include "cutfem/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace cutfem {

namespace {

constexpr double min_damping = 1e-12;
constexpr double parallel_tol = 1e-12;  // internal angle stagnation target

struct DescentResult {
  Vec3 point = Vec3::Zero();
  bool converged = false;
};

// Damped first-order update p <- p - lambda * phi * grad / |grad|^2 with
// halving on |phi| increase. Accepted iterates have strictly decreasing |phi|.
DescentResult descend_to_surface(const ImplicitSurface& surface, Vec3 p,
                                 double proj_tol, int max_iter,
                                 ProjectionTrace* trace) {
  double phi = surface.value(p);
  double lambda = 1.0;
  bool converged = false;
  for (int it = 0; it < max_iter && !converged; ++it) {
    if (std::abs(phi) <= proj_tol) {
      converged = true;
      break;
    }
    const Vec3 g = surface.gradient(p);
    const double g_norm = g.norm();
    if (g_norm < 0.5 * surface.g_min) {
      // Inside the declared band this breaks the surface contract; on the
      // way in from far away it is a saddle and the caller reseeds.
      if (std::abs(phi) <= surface.band_phi) {
        throw Error(ErrorCode::degenerate_gradient,
                    "closest_point: |grad phi| below g_min/2 at an iterate");
      }
      return {p, false};
    }
    while (lambda >= min_damping) {
      const Vec3 q = p - (lambda * phi / (g_norm * g_norm)) * g;
      const double phi_q = surface.value(q);
      if (std::abs(phi_q) < std::abs(phi)) {
        p = q;
        phi = phi_q;
        lambda = std::min(1.0, 2.0 * lambda);
        if (trace) trace->abs_phi.push_back(std::abs(phi));
        break;
      }
      lambda *= 0.5;
    }
    if (lambda < min_damping) return {p, false};  // stalled (e.g. at a saddle)
  }
  if (!converged && std::abs(phi) > proj_tol) return {p, false};
  // One full Newton polish step; quadratic convergence pushes |phi| to the
  // rounding floor, well below the tolerance.
  const Vec3 g = surface.gradient(p);
  const double g2 = g.squaredNorm();
  if (g2 > 0.0) {
    const Vec3 q = p - (phi / g2) * g;
    if (std::abs(surface.value(q)) < std::abs(phi)) p = q;
  }
  return {p, true};
}

// Deterministic cloud of surface samples, built once per surface and cached:
// a lattice over the bounding box with every sample descended onto the
// surface. Far-field projections are seeded from the cloud point closest to
// the query, which avoids both interior saddles and nearest-branch mistakes.
std::shared_ptr<const std::vector<Vec3>> surface_seed_cloud(
    const ImplicitSurface& surface) {
  static std::mutex build_mutex;
  std::lock_guard<std::mutex> lock(build_mutex);
  if (surface.seed_cloud) return surface.seed_cloud;

  const int n = 24;
  const Vec3 lo = surface.bounding_box.lo;
  const Vec3 span = surface.bounding_box.hi - lo;
  const double seed_tol = 1e-9 * surface.diameter();
  auto cloud = std::make_shared<std::vector<Vec3>>();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) {
        const Vec3 q0 =
            lo + Vec3(span.x() * i / n, span.y() * j / n, span.z() * k / n);
        DescentResult res;
        try {
          res = descend_to_surface(surface, q0, seed_tol, 25, nullptr);
        } catch (const Error&) {
          continue;
        }
        if (res.converged) cloud->push_back(res.point);
      }
    }
  }
  surface.seed_cloud = std::move(cloud);
  return surface.seed_cloud;
}

Vec3 global_seed(const ImplicitSurface& surface, const Vec3& x) {
  const auto cloud = surface_seed_cloud(surface);
  Vec3 best = x;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Vec3& q : *cloud) {
    const double d = (x - q).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = q;
    }
  }
  if (!std::isfinite(best_dist)) {
    throw DivergedProjection(x, "closest_point: no surface seed found in box");
  }
  return best;
}

Vec3 unit_normal_at(const ImplicitSurface& surface, const Vec3& p) {
  const Vec3 g = surface.gradient(p);
  const double g_norm = g.norm();
  if (g_norm < 0.5 * surface.g_min) {
    throw Error(ErrorCode::degenerate_gradient,
                "closest_point: degenerate gradient at surface point");
  }
  return g / g_norm;
}

}  // namespace

SurfacePoint closest_point(const ImplicitSurface& surface, const Vec3& x,
                           double proj_tol, int max_iter,
                           ProjectionTrace* trace, const Vec3* initial_guess) {
  if (max_iter < 1) {
    throw Error(ErrorCode::contract_violation, "closest_point: max_iter < 1");
  }
  if (proj_tol <= 0.0) proj_tol = surface.default_projection_tolerance();

  if (surface.analytic_projection) {
    const Vec3 p = surface.analytic_projection(x);
    if (trace) trace->abs_phi.push_back(std::abs(surface.value(p)));
    return {p, unit_normal_at(surface, p)};
  }

  // Far outside the band the nearest branch is ambiguous and the plain
  // descent can stall at interior saddles; combine it with a seeded start
  // from the cached surface sample cloud and keep the closer candidate.
  const bool far_start =
      !initial_guess && std::abs(surface.value(x)) > surface.band_phi;
  DescentResult res{x, false};
  try {
    res = descend_to_surface(surface, initial_guess ? *initial_guess : x,
                             proj_tol, max_iter, trace);
  } catch (const Error& e) {
    if (!far_start) throw;  // inside the band this is a contract violation
  }
  if (!res.converged || far_start) {
    DescentResult seeded{x, false};
    try {
      seeded = descend_to_surface(surface, global_seed(surface, x), proj_tol,
                                  max_iter, res.converged ? nullptr : trace);
    } catch (const Error&) {
    }
    if (seeded.converged &&
        (!res.converged ||
         (x - seeded.point).norm() < (x - res.point).norm())) {
      res = seeded;
    }
    if (!res.converged) {
      throw DivergedProjection(res.point,
                               "closest_point: descent did not converge");
    }
  }

  // Slide tangentially toward the stationary point of the distance,
  // re-projecting after each slide. A slide is accepted when it reduces the
  // angle between (x - p) and the normal (or, as a safeguard, the distance).
  // Linear convergence with rate ~ dist * curvature, so the budget is much
  // larger than the descent phase; each iteration costs a few evaluations.
  Vec3 p = res.point;
  const double len_tol = proj_tol;
  const double abs_floor = 1e3 * proj_tol;  // positional optimality floor
  auto angle_of = [&](const Vec3& q, double* t_norm = nullptr) {
    const Vec3 d = x - q;
    const double dn = d.norm();
    if (dn <= len_tol) {
      if (t_norm) *t_norm = 0.0;
      return 0.0;
    }
    const Vec3 n = unit_normal_at(surface, q);
    const double t = (d - d.dot(n) * n).norm();
    if (t_norm) *t_norm = t;
    return t / dn;
  };
  for (int it = 0; it < 50 * max_iter; ++it) {
    const Vec3 d = x - p;
    const double dist = d.norm();
    if (dist <= len_tol) break;
    const Vec3 n = unit_normal_at(surface, p);
    const Vec3 tangential = d - d.dot(n) * n;
    const double theta = tangential.norm() / dist;
    if (theta <= 1e-7 || tangential.norm() <= abs_floor) break;
    bool accepted = false;
    for (double step = 1.0; step >= 1.0 / 1024.0; step *= 0.5) {
      const DescentResult slid = descend_to_surface(
          surface, p + step * tangential, proj_tol, max_iter, nullptr);
      if (!slid.converged) continue;
      const double slid_dist = (x - slid.point).norm();
      const double slid_theta = angle_of(slid.point);
      if (slid_dist < dist ||
          (slid_theta < theta && slid_dist <= dist * (1.0 + 1e-9))) {
        p = slid.point;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // at the rounding floor of the minimizer
  }
  // The parallelism tolerance is a contract only inside the declared band;
  // beyond the reach of the surface the distance minimizer is ill-conditioned
  // and the stationary point reached is the best available answer.
  if ((x - p).norm() > len_tol &&
      std::abs(surface.value(x)) <= surface.band_phi) {
    double t_norm = 0.0;
    const double theta = angle_of(p, &t_norm);
    if (theta > 1e-6 && t_norm > abs_floor) {
      throw DivergedProjection(
          p, "closest_point: tangential residual above tolerance");
    }
  }
  return {p, unit_normal_at(surface, p)};
}

double extend_scalar(const std::function<double(const Vec3&)>& u,
                     const ImplicitSurface& surface, const Vec3& x) {
  return u(closest_point(surface, x).position);
}

Vec3 extended_gradient(const std::function<double(const Vec3&)>& u,
                       const ImplicitSurface& surface, const Vec3& x,
                       double fd_step) {
  if (fd_step <= 0.0) {
    fd_step = std::sqrt(std::numeric_limits<double>::epsilon()) *
              surface.diameter();
  }
  // Seed all stencil projections from the center projection so the whole
  // stencil stays on one branch of the closest-point map.
  const Vec3 center = closest_point(surface, x).position;
  Vec3 grad;
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = x;
    Vec3 xm = x;
    xp[i] += fd_step;
    xm[i] -= fd_step;
    const Vec3 pp =
        closest_point(surface, xp, -1.0, 50, nullptr, &center).position;
    const Vec3 pm =
        closest_point(surface, xm, -1.0, 50, nullptr, &center).position;
    grad[i] = (u(pp) - u(pm)) / (2.0 * fd_step);
  }
  return grad;
}

ImplicitSurface translated_sphere(const Vec3& center) {
  ImplicitSurface s;
  s.name = "sphere";
  s.value = [center](const Vec3& x) { return (x - center).squaredNorm() - 1.0; };
  s.gradient = [center](const Vec3& x) { return Vec3(2.0 * (x - center)); };
  s.hessian = [](const Vec3&) { return Mat3(2.0 * Mat3::Identity()); };
  s.bounding_box = {center - Vec3::Constant(1.001), center + Vec3::Constant(1.001)};
  s.g_min = 0.8;        // |grad| = 2r >= 0.8 for r >= 0.4
  s.band_phi = 1.5;     // r in [0.4, ~1.58]
  s.analytic_projection = [center](const Vec3& x) {
    const Vec3 r = x - center;
    const double len = r.norm();
    if (len < 1e-300) {
      throw Error(ErrorCode::degenerate_gradient,
                  "sphere projection undefined at the center");
    }
    return Vec3(center + r / len);
  };
  return s;
}

namespace {

ImplicitSurface make_blob() {
  ImplicitSurface s;
  s.name = "blob";
  s.value = [](const Vec3& p) {
    const double x2 = p.x() * p.x(), y2 = p.y() * p.y(), z2 = p.z() * p.z();
    auto sq = [](double t) { return t * t; };
    return sq(x2 - 1.0) + sq(y2 - 1.0) + sq(z2 - 1.0) + sq(x2 + y2 - 4.0) +
           sq(x2 + z2 - 4.0) + sq(y2 + z2 - 4.0) - 16.0;
  };
  s.gradient = [](const Vec3& p) {
    const double x2 = p.x() * p.x(), y2 = p.y() * p.y(), z2 = p.z() * p.z();
    return Vec3(4.0 * p.x() * (3.0 * x2 + y2 + z2 - 9.0),
                4.0 * p.y() * (x2 + 3.0 * y2 + z2 - 9.0),
                4.0 * p.z() * (x2 + y2 + 3.0 * z2 - 9.0));
  };
  s.hessian = [](const Vec3& p) {
    const double x2 = p.x() * p.x(), y2 = p.y() * p.y(), z2 = p.z() * p.z();
    Mat3 h;
    h(0, 0) = 4.0 * (9.0 * x2 + y2 + z2 - 9.0);
    h(1, 1) = 4.0 * (x2 + 9.0 * y2 + z2 - 9.0);
    h(2, 2) = 4.0 * (x2 + y2 + 9.0 * z2 - 9.0);
    h(0, 1) = h(1, 0) = 8.0 * p.x() * p.y();
    h(0, 2) = h(2, 0) = 8.0 * p.x() * p.z();
    h(1, 2) = h(2, 1) = 8.0 * p.y() * p.z();
    return h;
  };
  // Zero set extends to |coordinate| ~ 2.033; min |grad| on the surface ~ 13.6.
  // The band must stay within the reach of the high-curvature neck regions:
  // |phi| <= 1 keeps distances below ~0.1 (min |grad| there is ~12.7).
  s.bounding_box = {Vec3::Constant(-2.04), Vec3::Constant(2.04)};
  s.g_min = 5.0;
  s.band_phi = 1.0;
  return s;
}

}  // namespace

const ImplicitSurface& builtin_surface(const std::string& name) {
  static const ImplicitSurface sphere = translated_sphere(Vec3::Zero());
  static const ImplicitSurface blob = make_blob();
  if (name == "sphere") return sphere;
  if (name == "blob") return blob;
  throw Error(ErrorCode::invalid_config, "unknown surface: " + name);
}

}  // namespace cutfem
