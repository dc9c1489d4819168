#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "cutfem/cut_geometry.hpp"
#include "support/oracles.hpp"

using namespace cutfem;

namespace {

const std::array<Vec3, 4> reference_tet = {Vec3(0, 0, 0), Vec3(1, 0, 0),
                                           Vec3(0, 1, 0), Vec3(0, 0, 1)};

SurfaceCell flat_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  SurfaceCell cell;
  cell.n_vertices = 3;
  cell.polygon = {a, b, c, Vec3::Zero()};
  cell.n_triangles = 1;
  cell.triangles[0] = {0, 1, 2};
  cell.area = 0.5 * (b - a).cross(c - a).norm();
  cell.normal = (b - a).cross(c - a).normalized();
  return cell;
}

double integrate(const QuadratureRule& rule,
                 const std::function<double(const Vec3&)>& f) {
  double acc = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    acc += rule.weights[q] * f(rule.points[q]);
  }
  return acc;
}

}  // namespace

TEST_CASE("one-against-three cut gives the midpoint triangle") {
  const std::array<double, 4> values = {-1, 1, 1, 1};
  const auto cell = cut_tet(reference_tet, values);
  REQUIRE(cell.has_value());
  CHECK(cell->n_vertices == 3);
  CHECK(cell->area == doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-14));
  // vertices are the three edge midpoints
  for (int i = 0; i < 3; ++i) {
    const Vec3& p = cell->polygon[i];
    CHECK(p.sum() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.minCoeff() >= 0.0);
  }
  CHECK(cell->normal.isApprox(Vec3(1, 1, 1).normalized(), 1e-13));
}

TEST_CASE("uncut and degenerate inputs") {
  CHECK(!cut_tet(reference_tet, {1, 1, 1, 1}).has_value());
  CHECK(!cut_tet(reference_tet, {-1, -1, -1, -1}).has_value());
  CHECK_THROWS_AS(cut_tet(reference_tet, {0.0, 1, 1, 1}), Error);
}

TEST_CASE("two-against-two cut matches the shoelace area") {
  const std::array<double, 4> values = {-1, -1, 1, 1};
  const auto cell = cut_tet(reference_tet, values);
  REQUIRE(cell.has_value());
  CHECK(cell->n_vertices == 4);
  CHECK(cell->n_triangles == 2);
  // cuts at the midpoints of edges {0,2},{0,3},{1,2},{1,3}
  std::vector<Vec3> expected = {Vec3(0, 0.5, 0), Vec3(0, 0, 0.5),
                                Vec3(0.5, 0.5, 0), Vec3(0.5, 0, 0.5)};
  for (const Vec3& e : expected) {
    bool found = false;
    for (int i = 0; i < 4; ++i) {
      found = found || (cell->polygon[i] - e).norm() < 1e-14;
    }
    CHECK(found);
  }
  std::vector<Vec3> polygon(cell->polygon.begin(),
                            cell->polygon.begin() + 4);
  CHECK(cell->area ==
        doctest::Approx(oracles::shoelace_area(polygon)).epsilon(1e-13));
  // polygon vertices lie on the interpolant zero set and in the cut plane
  for (int i = 0; i < 4; ++i) {
    const Vec3& p = cell->polygon[i];
    double interp = 0.0;
    const std::array<double, 4> bary = {1.0 - p.sum(), p.x(), p.y(), p.z()};
    for (int v = 0; v < 4; ++v) interp += bary[v] * values[v];
    CHECK(std::abs(interp) <= 1e-13);
  }
  // edges are orthogonal to the reported normal
  for (int i = 0; i < 4; ++i) {
    const Vec3 e = cell->polygon[(i + 1) % 4] - cell->polygon[i];
    CHECK(std::abs(e.dot(cell->normal)) <= 1e-12);
  }
}

TEST_CASE("cut is invariant under vertex permutations") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 4> values;
    bool pos = false, neg = false;
    for (double& v : values) {
      v = dist(rng);
      if (v == 0.0) v = 0.5;
      (v > 0 ? pos : neg) = true;
    }
    if (!pos || !neg) continue;
    const auto base = cut_tet(reference_tet, values);
    REQUIRE(base.has_value());
    std::array<int, 4> perm = {0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::array<Vec3, 4> coords_p;
    std::array<double, 4> values_p;
    for (int i = 0; i < 4; ++i) {
      coords_p[i] = reference_tet[perm[i]];
      values_p[i] = values[perm[i]];
    }
    const auto permuted = cut_tet(coords_p, values_p);
    REQUIRE(permuted.has_value());
    CHECK(permuted->area == doctest::Approx(base->area).epsilon(1e-13));
    CHECK((permuted->normal - base->normal).norm() <= 1e-13);
  }
}

TEST_CASE("surface quadrature integrates polynomials exactly") {
  const SurfaceCell tri =
      flat_triangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  auto x = [](const Vec3& p) { return p.x(); };
  auto x2 = [](const Vec3& p) { return p.x() * p.x(); };
  auto x4 = [](const Vec3& p) { return std::pow(p.x(), 4); };

  for (int degree : {1, 2, 4}) {
    const QuadratureRule rule = surface_quadrature(tri, degree);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(tri.area).epsilon(1e-12));
    CHECK(integrate(rule, x) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    if (degree >= 2) {
      CHECK(integrate(rule, x2) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    }
    if (degree >= 4) {
      CHECK(integrate(rule, x4) == doctest::Approx(1.0 / 30.0).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(surface_quadrature(tri, 3), Error);
}

TEST_CASE("quadrature is exact for 200 random affine functions per degree") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const SurfaceCell cell = flat_triangle(Vec3(0.3, -0.2, 0.5), Vec3(1.1, 0.4, 0.2),
                                         Vec3(-0.5, 0.8, 1.0));
  const Vec3 centroid =
      (cell.polygon[0] + cell.polygon[1] + cell.polygon[2]) / 3.0;
  for (int degree : {1, 2, 4}) {
    const QuadratureRule rule = surface_quadrature(cell, degree);
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 a(dist(rng), dist(rng), dist(rng));
      const double b = dist(rng);
      auto f = [&](const Vec3& p) { return a.dot(p) + b; };
      const double exact = cell.area * (a.dot(centroid) + b);
      CHECK(integrate(rule, f) ==
            doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("tet quadrature") {
  auto one = [](const Vec3&) { return 1.0; };
  auto x = [](const Vec3& p) { return p.x(); };
  for (int degree : {1, 2}) {
    const QuadratureRule rule = tet_quadrature(reference_tet, degree);
    CHECK(integrate(rule, one) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(integrate(rule, x) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  }
  auto xy = [](const Vec3& p) { return p.x() * p.y(); };
  CHECK(integrate(tet_quadrature(reference_tet, 2), xy) ==
        doctest::Approx(1.0 / 120.0).epsilon(1e-13));

  const std::array<Vec3, 4> degenerate = {Vec3(0, 0, 0), Vec3(1, 0, 0),
                                          Vec3(0, 1, 0), Vec3(1, 1, 0)};
  CHECK_THROWS_AS(tet_quadrature(degenerate, 1), Error);
  CHECK_THROWS_AS(tet_quadrature(reference_tet, 3), Error);
}

TEST_CASE("sphere surface cells are watertight and outward oriented") {
  const BoxMesh mesh = build_box_mesh(Vec3::Constant(-1.6),
                                      Vec3::Constant(1.6), {10, 10, 10});
  const ActiveMesh active = extract_active_mesh(
      mesh, interpolate_levelset(mesh, builtin_surface("sphere")));
  const std::vector<SurfaceCell> cells = extract_surface_cells(active);
  CHECK(cells.size() == active.active_tets.size());

  const double quantum = 1e-10 * mesh.h;
  std::map<std::array<long long, 6>, int> edge_count;
  for (const SurfaceCell& cell : cells) {
    CHECK(cell.area > 0.0);
    Vec3 centroid = Vec3::Zero();
    for (int i = 0; i < cell.n_vertices; ++i) centroid += cell.polygon[i];
    centroid /= cell.n_vertices;
    CHECK(cell.normal.dot(centroid.normalized()) > 0.0);

    for (int i = 0; i < cell.n_vertices; ++i) {
      const Vec3& a = cell.polygon[i];
      const Vec3& b = cell.polygon[(i + 1) % cell.n_vertices];
      std::array<long long, 3> qa, qb;
      for (int c = 0; c < 3; ++c) {
        qa[c] = std::llround(a[c] / quantum);
        qb[c] = std::llround(b[c] / quantum);
      }
      std::array<long long, 6> key;
      if (qa > qb) std::swap(qa, qb);
      std::copy(qa.begin(), qa.end(), key.begin());
      std::copy(qb.begin(), qb.end(), key.begin() + 3);
      ++edge_count[key];
    }
  }
  for (const auto& [key, count] : edge_count) CHECK(count == 2);
}

TEST_CASE("sphere cell areas converge to the sphere area at second order") {
  double prev_defect = 0.0;
  const double exact = 4.0 * M_PI;
  for (int n : {10, 20, 40}) {
    const BoxMesh mesh = build_box_mesh(Vec3::Constant(-1.6),
                                        Vec3::Constant(1.6), {n, n, n});
    const ActiveMesh active = extract_active_mesh(
        mesh, interpolate_levelset(mesh, builtin_surface("sphere")));
    double area = 0.0;
    for (const SurfaceCell& cell : extract_surface_cells(active)) {
      area += cell.area;
    }
    const double defect = std::abs(exact - area);
    if (prev_defect > 0.0) {
      CHECK(prev_defect / defect > 3.0);
      CHECK(prev_defect / defect < 5.2);
    }
    prev_defect = defect;
  }
}

TEST_CASE("surface cell dump smoke") {
  const BoxMesh mesh =
      build_box_mesh(Vec3::Constant(-1.6), Vec3::Constant(1.6), {5, 5, 5});
  const ActiveMesh active = extract_active_mesh(
      mesh, interpolate_levelset(mesh, builtin_surface("sphere")));
  write_surface_cells(extract_surface_cells(active), "surface_cells_test.txt");
}
