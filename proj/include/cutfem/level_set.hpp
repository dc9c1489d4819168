#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cutfem/errors.hpp"

namespace cutfem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec3& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

/// A point on the continuous surface together with the unit normal
/// grad(phi)/|grad(phi)| evaluated there.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
};

/// Level-set description of a closed surface {phi = 0}. The gradient must be
/// bounded below by g_min on the band |phi| <= band_phi around the zero set.
struct ImplicitSurface {
  std::string name;
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;  // optional, may be empty
  Box bounding_box;                          // guaranteed to contain the zero set
  double g_min = 1.0;
  double band_phi = 1.0;
  // Optional exact projection (set for spheres); bypasses the iteration.
  std::function<Vec3(const Vec3&)> analytic_projection;
  // Lazily built cloud of on-surface samples seeding far-field projections;
  // shared between copies made after the first far-field query.
  mutable std::shared_ptr<const std::vector<Vec3>> seed_cloud;

  double diameter() const { return bounding_box.diameter(); }
  double default_projection_tolerance() const { return 1e-12 * diameter(); }
};

/// Accepted |phi| values of the damped descent, recorded for diagnostics.
struct ProjectionTrace {
  std::vector<double> abs_phi;
};

/// Closest-point projection onto {phi = 0}. Returns a point p with
/// |phi(p)| <= proj_tol and (x - p) parallel to the normal at p.
/// proj_tol < 0 selects the surface default (1e-12 * diameter). An initial
/// guess starts the iteration there instead of at x (used to keep finite
/// difference stencils on one branch of the projection).
SurfacePoint closest_point(const ImplicitSurface& surface, const Vec3& x,
                           double proj_tol = -1.0, int max_iter = 50,
                           ProjectionTrace* trace = nullptr,
                           const Vec3* initial_guess = nullptr);

/// Extension of a surface function to the band: u^e(x) = u(p(x)).
double extend_scalar(const std::function<double(const Vec3&)>& u,
                     const ImplicitSurface& surface, const Vec3& x);

/// Central finite difference of extend_scalar in each coordinate.
/// fd_step < 0 selects sqrt(machine eps) * diameter.
Vec3 extended_gradient(const std::function<double(const Vec3&)>& u,
                       const ImplicitSurface& surface, const Vec3& x,
                       double fd_step = -1.0);

/// Built-in surfaces selectable by name: "sphere" (x^2+y^2+z^2-1) and
/// "blob" (the sextic with negative pockets at the cube corners).
const ImplicitSurface& builtin_surface(const std::string& name);

/// Unit sphere translated to the given center, with analytic projection.
ImplicitSurface translated_sphere(const Vec3& center);

}  // namespace cutfem
