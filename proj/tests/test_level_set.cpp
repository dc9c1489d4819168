#include <doctest.h>

#include <cmath>
#include <random>

#include "cutfem/level_set.hpp"
#include "support/oracles.hpp"

using namespace cutfem;

namespace {

// Sphere without the analytic shortcut, to exercise the iteration itself.
ImplicitSurface iterative_sphere() {
  ImplicitSurface s = builtin_surface("sphere");
  s.analytic_projection = nullptr;
  return s;
}

std::function<double(const Vec3&)> coordinate(int i) {
  return [i](const Vec3& x) { return x[i]; };
}

}  // namespace

TEST_CASE("sphere projection hits the radial point") {
  const ImplicitSurface& sphere = builtin_surface("sphere");
  const SurfacePoint p = closest_point(sphere, Vec3(2, 0, 0));
  CHECK(p.position.isApprox(Vec3(1, 0, 0), 1e-12));
  CHECK(p.normal.isApprox(Vec3(1, 0, 0), 1e-12));

  const Vec3 on_surface(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0);
  const SurfacePoint q = closest_point(sphere, on_surface);
  CHECK((q.position - on_surface).norm() < 1e-12);
}

TEST_CASE("sphere exactness for radii in [0.5, 1.5]") {
  const ImplicitSurface& sphere = builtin_surface("sphere");
  const ImplicitSurface iter = iterative_sphere();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> radius(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    dir.normalize();
    const Vec3 x = radius(rng) * dir;
    CHECK((closest_point(sphere, x).position - dir).norm() < 1e-12);
    CHECK((closest_point(iter, x).position - dir).norm() < 1e-9);
  }
}

TEST_CASE("projection is idempotent and descent reduces |phi|") {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> offset(-0.2, 0.2);
  for (const char* name : {"sphere", "blob"}) {
    ImplicitSurface surface = builtin_surface(name);
    surface.analytic_projection = nullptr;
    for (int i = 0; i < 1000; ++i) {
      Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
      dir.normalize();
      // band point: project a random ray point onto the surface, then offset
      const Vec3 probe = 1.2 * dir * surface.bounding_box.hi.x();
      SurfacePoint base;
      try {
        base = closest_point(surface, 0.9 * dir);
      } catch (const Error&) {
        continue;
      }
      const Vec3 x = base.position + offset(rng) * base.normal;

      ProjectionTrace trace;
      const SurfacePoint p = closest_point(surface, x, -1.0, 50, &trace);
      for (size_t k = 1; k < trace.abs_phi.size(); ++k) {
        CHECK(trace.abs_phi[k] < trace.abs_phi[k - 1]);
      }
      const SurfacePoint q = closest_point(surface, p.position);
      CHECK((q.position - p.position).norm() <
            1e-10 * surface.diameter());
      (void)probe;
    }
  }
}

TEST_CASE("blob projection from the symmetry axis matches brute force") {
  const ImplicitSurface& blob = builtin_surface("blob");
  const Vec3 x(2.2, 0.0, 0.0);
  const SurfacePoint p = closest_point(blob, x);
  CHECK(std::abs(blob.value(p.position)) <= 1e-12);
  const oracles::NearestSample oracle = oracles::brute_force_closest(blob, x);
  CHECK((x - p.position).norm() ==
        doctest::Approx(oracle.distance).epsilon(1e-6));
}

TEST_CASE("blob projection matches brute force at band points") {
  const ImplicitSurface& blob = builtin_surface("blob");
  for (const Vec3& seed : {Vec3(1.3, 0.9, 1.1), Vec3(0.4, 1.9, 0.3)}) {
    const SurfacePoint base = closest_point(blob, seed);
    const Vec3 x = base.position + 0.05 * base.normal;
    const SurfacePoint p = closest_point(blob, x);
    CHECK(std::abs(blob.value(p.position)) <= 1e-12);
    const oracles::NearestSample oracle = oracles::brute_force_closest(blob, x);
    CHECK((x - p.position).norm() ==
          doctest::Approx(oracle.distance).epsilon(1e-6));
  }
}

TEST_CASE("projection reports the contract errors") {
  ImplicitSurface flat;  // zero set {x = 0} with vanishing gradient there
  flat.name = "degenerate";
  flat.value = [](const Vec3& x) { return x.x() * x.x(); };
  flat.gradient = [](const Vec3& x) { return Vec3(2.0 * x.x(), 0.0, 0.0); };
  flat.bounding_box = {Vec3::Constant(-1.0), Vec3::Constant(1.0)};
  flat.g_min = 1.0;
  flat.band_phi = 1.0;
  CHECK_THROWS_AS(closest_point(flat, Vec3(0.1, 0, 0)), Error);

  ImplicitSurface empty;  // no zero set: every descent fails
  empty.name = "empty";
  empty.value = [](const Vec3& x) { return x.squaredNorm() + 1.0; };
  empty.gradient = [](const Vec3& x) { return Vec3(2.0 * x); };
  empty.bounding_box = {Vec3::Constant(-1.0), Vec3::Constant(1.0)};
  empty.g_min = 1e-3;
  empty.band_phi = 0.5;
  CHECK_THROWS_AS(closest_point(empty, Vec3(0.5, 0.2, 0.1)),
                  DivergedProjection);
}

TEST_CASE("surface gradients match finite differences of the value") {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> offset(-0.1, 0.1);
  for (const char* name : {"sphere", "blob"}) {
    const ImplicitSurface& surface = builtin_surface(name);
    const double step = 1e-5 * surface.diameter();
    int tested = 0;
    for (int i = 0; tested < 100 && i < 1000; ++i) {
      Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
      dir.normalize();
      SurfacePoint base;
      try {
        base = closest_point(surface, dir);
      } catch (const Error&) {
        continue;
      }
      const Vec3 x = base.position + offset(rng) * base.normal;
      if (std::abs(surface.value(x)) > surface.band_phi) continue;
      ++tested;
      const Vec3 g = surface.gradient(x);
      CHECK(g.norm() >= surface.g_min);
      for (int c = 0; c < 3; ++c) {
        Vec3 xp = x, xm = x;
        xp[c] += step;
        xm[c] -= step;
        const double fd =
            (surface.value(xp) - surface.value(xm)) / (2.0 * step);
        CHECK(fd == doctest::Approx(g[c]).epsilon(1e-6));
      }
      const Mat3 h = surface.hessian(x);
      for (int c = 0; c < 3; ++c) {
        Vec3 xp = x, xm = x;
        xp[c] += step;
        xm[c] -= step;
        const Vec3 fd = (surface.gradient(xp) - surface.gradient(xm)) /
                        (2.0 * step);
        CHECK((fd - h.col(c)).norm() <= 1e-6 * (1.0 + h.norm()));
      }
    }
    CHECK(tested == 100);
  }
}

TEST_CASE("scalar extension pulls values back along the projection") {
  const ImplicitSurface& sphere = builtin_surface("sphere");
  auto one = [](const Vec3&) { return 1.0; };
  CHECK(extend_scalar(one, sphere, Vec3(0.7, -0.3, 0.9)) == 1.0);
  CHECK(extend_scalar(coordinate(0), sphere, Vec3(0, 0, 3)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(extend_scalar(coordinate(0), sphere, Vec3(2, 0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("extended gradient is tangential and matches the projected field") {
  const ImplicitSurface& sphere = builtin_surface("sphere");
  auto one = [](const Vec3&) { return 1.0; };
  CHECK(extended_gradient(one, sphere, Vec3(0.2, 0.9, -0.1)).norm() <= 1e-10);

  // grad of x^e at (1,0,0): tangential part of e1 vanishes there
  CHECK(extended_gradient(coordinate(0), sphere, Vec3(1, 0, 0)).norm() <= 1e-6);

  // at (0,1,0) the projection leaves e1 untouched
  const Vec3 g = extended_gradient(coordinate(0), sphere, Vec3(0, 1, 0));
  CHECK((g - Vec3(1, 0, 0)).norm() <= 1e-8);
}

TEST_CASE("extension on the blob goes through the iterative projection") {
  const ImplicitSurface& blob = builtin_surface("blob");
  const SurfacePoint p = closest_point(blob, Vec3(1.1, 1.0, 0.9));
  const Vec3 x = p.position + 0.05 * p.normal;
  CHECK(extend_scalar(coordinate(1), blob, x) ==
        doctest::Approx(p.position.y()).epsilon(1e-9));
}
