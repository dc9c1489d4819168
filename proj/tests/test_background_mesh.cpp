#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cutfem/background_mesh.hpp"
#include "cutfem/cut_geometry.hpp"

using namespace cutfem;

namespace {

double total_volume(const BoxMesh& mesh) {
  double vol = 0.0;
  for (size_t t = 0; t < mesh.tets.size(); ++t) {
    vol += tet_volume(mesh.tet_coords(static_cast<int>(t)));
  }
  return vol;
}

}  // namespace

TEST_CASE("unit cube splits into six positive tets") {
  const BoxMesh mesh =
      build_box_mesh(Vec3::Zero(), Vec3::Constant(1.0), {1, 1, 1});
  CHECK(mesh.vertices.size() == 8);
  CHECK(mesh.tets.size() == 6);
  CHECK(total_volume(mesh) == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t t = 0; t < mesh.tets.size(); ++t) {
    CHECK(tet_volume(mesh.tet_coords(static_cast<int>(t))) > 0.0);
  }
  CHECK(mesh.h == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("cell counting and volume partition") {
  const BoxMesh mesh = build_box_mesh(Vec3::Constant(-1.6),
                                      Vec3::Constant(1.6), {10, 10, 10});
  CHECK(mesh.vertices.size() == 11 * 11 * 11);
  CHECK(mesh.tets.size() == 6000);
  CHECK(total_volume(mesh) ==
        doctest::Approx(3.2 * 3.2 * 3.2).epsilon(1e-12));
}

TEST_CASE("mesh is conforming and quasi-uniform") {
  const BoxMesh mesh =
      build_box_mesh(Vec3(-1, -2, 0), Vec3(1, 0, 1.5), {4, 4, 3});
  // face -> incident tets; interior faces must appear exactly twice and
  // boundary faces must lie on the box boundary
  std::map<std::array<int, 3>, int> count;
  for (const auto& tet : mesh.tets) {
    for (int skip = 0; skip < 4; ++skip) {
      std::array<int, 3> f;
      int w = 0;
      for (int v = 0; v < 4; ++v) {
        if (v != skip) f[w++] = tet[v];
      }
      std::sort(f.begin(), f.end());
      ++count[f];
    }
  }
  for (const auto& [face, c] : count) {
    REQUIRE(c <= 2);
    if (c == 1) {
      int on_boundary = 0;
      for (int axis = 0; axis < 3; ++axis) {
        bool lo = true, hi = true;
        for (int v : face) {
          lo = lo && mesh.vertices[v][axis] == mesh.lo[axis];
          hi = hi && mesh.vertices[v][axis] == mesh.hi[axis];
        }
        on_boundary += (lo || hi) ? 1 : 0;
      }
      CHECK(on_boundary >= 1);
    }
  }

  double max_edge = 0.0, min_edge = 1e300;
  for (size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto c = mesh.tet_coords(static_cast<int>(t));
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const double e = (c[a] - c[b]).norm();
        max_edge = std::max(max_edge, e);
        min_edge = std::min(min_edge, e);
      }
    }
  }
  CHECK(max_edge / min_edge <= 2.0);
  CHECK(mesh.h == doctest::Approx(max_edge));
}

TEST_CASE("level-set interpolation snaps near-zero values") {
  const BoxMesh mesh =
      build_box_mesh(Vec3::Constant(-1.0), Vec3::Constant(1.0), {2, 2, 2});
  const std::vector<double> values =
      interpolate_levelset(mesh, builtin_surface("sphere"));
  const double snap = 1e-10 * mesh.h;
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    if (v == Vec3::Zero()) CHECK(values[i] == -1.0);
    if (v == Vec3(1, 0, 0)) CHECK(values[i] == snap);  // phi = 0 snaps up
    CHECK(values[i] != 0.0);
    CHECK(std::abs(values[i]) >= snap);
  }
  const BoxMesh wide =
      build_box_mesh(Vec3::Constant(-2.0), Vec3::Constant(2.0), {2, 2, 2});
  const std::vector<double> wide_values =
      interpolate_levelset(wide, builtin_surface("sphere"));
  for (size_t i = 0; i < wide.vertices.size(); ++i) {
    if (wide.vertices[i] == Vec3(2, 0, 0)) CHECK(wide_values[i] == 3.0);
  }
}

TEST_CASE("active mesh collects exactly the sign-changing tets") {
  const BoxMesh mesh = build_box_mesh(Vec3::Constant(-1.6),
                                      Vec3::Constant(1.6), {10, 10, 10});
  const std::vector<double> values =
      interpolate_levelset(mesh, builtin_surface("sphere"));
  const ActiveMesh active = extract_active_mesh(mesh, values);

  CHECK(!active.active_tets.empty());
  CHECK(std::is_sorted(active.active_tets.begin(), active.active_tets.end()));
  std::vector<bool> flagged(mesh.tets.size(), false);
  for (int t : active.active_tets) flagged[t] = true;
  for (size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto& tet = mesh.tets[t];
    bool pos = false, neg = false;
    for (int v : tet) (values[v] > 0 ? pos : neg) = true;
    CHECK(flagged[t] == (pos && neg));
  }

  // dof numbering is a bijection in ascending vertex order
  CHECK(active.n_dofs == static_cast<int>(active.active_vertices.size()));
  for (int d = 0; d < active.n_dofs; ++d) {
    CHECK(active.dof_of_vertex(active.active_vertices[d]) == d);
  }

  // interior faces join two distinct active tets, without duplicates
  std::map<std::pair<int, int>, int> pair_count;
  for (const InteriorFace& f : active.interior_faces) {
    CHECK(f.tet_plus != f.tet_minus);
    CHECK(flagged[f.tet_plus]);
    CHECK(flagged[f.tet_minus]);
    ++pair_count[{std::min(f.tet_plus, f.tet_minus),
                  std::max(f.tet_plus, f.tet_minus)}];
  }
  for (const auto& [key, c] : pair_count) CHECK(c == 1);

  // every active tet has an active face-neighbor
  std::map<int, int> neighbor_count;
  for (const InteriorFace& f : active.interior_faces) {
    ++neighbor_count[f.tet_plus];
    ++neighbor_count[f.tet_minus];
  }
  for (int t : active.active_tets) CHECK(neighbor_count[t] >= 1);
}

TEST_CASE("surface outside the mesh raises an error") {
  const BoxMesh mesh = build_box_mesh(Vec3::Constant(-0.2),
                                      Vec3::Constant(0.2), {2, 2, 2});
  const std::vector<double> values =
      interpolate_levelset(mesh, builtin_surface("sphere"));
  CHECK_THROWS_AS(extract_active_mesh(mesh, values), Error);
}

TEST_CASE("extraction is deterministic") {
  auto build = [] {
    const BoxMesh mesh = build_box_mesh(Vec3::Constant(-1.6),
                                        Vec3::Constant(1.6), {8, 8, 8});
    const std::vector<double> values =
        interpolate_levelset(mesh, builtin_surface("sphere"));
    const ActiveMesh active = extract_active_mesh(mesh, values);
    std::ostringstream dump;
    dump.precision(17);
    for (int t : active.active_tets) dump << t << ",";
    for (const InteriorFace& f : active.interior_faces) {
      dump << f.tet_plus << "/" << f.tet_minus << "/" << f.vertices[0] << "-"
           << f.vertices[1] << "-" << f.vertices[2] << ",";
    }
    for (int v : active.active_vertices) dump << v << "," << active.vertex_values[v] << ",";
    return dump.str();
  };
  CHECK(build() == build());
}

TEST_CASE("vtk dump smoke") {
  const BoxMesh mesh =
      build_box_mesh(Vec3::Constant(-1.6), Vec3::Constant(1.6), {5, 5, 5});
  const ActiveMesh active = extract_active_mesh(
      mesh, interpolate_levelset(mesh, builtin_surface("sphere")));
  write_active_mesh_vtk(active, "active_mesh_test.vtk");
  std::ifstream in("active_mesh_test.vtk");
  std::string first;
  std::getline(in, first);
  CHECK(first == "# vtk DataFile Version 3.0");
}
