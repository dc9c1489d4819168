#include "cutfem/background_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "cutfem/errors.hpp"
#include "parallel_util.hpp"

namespace cutfem {

namespace {

// Kuhn split: walk from corner (0,0,0) to (1,1,1) along each axis permutation.
// Odd permutations are listed with the two middle vertices swapped so that
// every tet has positive orientation.
struct KuhnTet {
  std::array<std::array<int, 3>, 4> corners;
};

std::array<KuhnTet, 6> kuhn_pattern() {
  const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  std::array<KuhnTet, 6> tets{};
  for (int p = 0; p < 6; ++p) {
    std::array<int, 3> c = {0, 0, 0};
    std::array<std::array<int, 3>, 4> walk;
    walk[0] = c;
    for (int s = 0; s < 3; ++s) {
      c[perms[p][s]] = 1;
      walk[s + 1] = c;
    }
    if (p >= 3) std::swap(walk[1], walk[2]);  // fix orientation of odd perms
    tets[p].corners = walk;
  }
  return tets;
}

}  // namespace

int ActiveMesh::dof_of_vertex(int vertex) const {
  auto it = std::lower_bound(active_vertices.begin(), active_vertices.end(),
                             vertex);
  if (it == active_vertices.end() || *it != vertex) return -1;
  return static_cast<int>(it - active_vertices.begin());
}

BoxMesh build_box_mesh(const Vec3& lo, const Vec3& hi,
                       const std::array<int, 3>& n_cells) {
  for (int a = 0; a < 3; ++a) {
    if (n_cells[a] < 1 || !(hi[a] > lo[a])) {
      throw Error(ErrorCode::invalid_config,
                  "build_box_mesh: need n_cells >= 1 and nondegenerate bounds");
    }
  }
  BoxMesh mesh;
  mesh.lo = lo;
  mesh.hi = hi;
  mesh.n_cells = n_cells;
  const int nx = n_cells[0], ny = n_cells[1], nz = n_cells[2];
  const Vec3 d((hi.x() - lo.x()) / nx, (hi.y() - lo.y()) / ny,
               (hi.z() - lo.z()) / nz);
  mesh.h = d.norm();

  const std::int64_t nvx = nx + 1, nvy = ny + 1, nvz = nz + 1;
  mesh.vertices.resize(static_cast<size_t>(nvx * nvy * nvz));
  auto vid = [nvx, nvy](int i, int j, int k) {
    return static_cast<int>(i + nvx * (j + nvy * static_cast<std::int64_t>(k)));
  };
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        mesh.vertices[vid(i, j, k)] =
            Vec3(lo.x() + i * d.x(), lo.y() + j * d.y(), lo.z() + k * d.z());
      }
    }
  }

  static const std::array<KuhnTet, 6> pattern = kuhn_pattern();
  mesh.tets.resize(static_cast<size_t>(6) * nx * ny * nz);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::int64_t cell = i + static_cast<std::int64_t>(nx) *
                                          (j + static_cast<std::int64_t>(ny) * k);
        for (int p = 0; p < 6; ++p) {
          std::array<int, 4> tet;
          for (int v = 0; v < 4; ++v) {
            const auto& c = pattern[p].corners[v];
            tet[v] = vid(i + c[0], j + c[1], k + c[2]);
          }
          mesh.tets[6 * cell + p] = tet;
        }
      }
    }
  }
  return mesh;
}

std::vector<double> interpolate_levelset(const BoxMesh& mesh,
                                         const ImplicitSurface& surface) {
  const double snap_tol = 1e-10 * mesh.h;
  std::vector<double> values(mesh.vertices.size());
  const std::int64_t n = static_cast<std::int64_t>(mesh.vertices.size());
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    guard.run([&, i] {
      double v = surface.value(mesh.vertices[i]);
      if (std::abs(v) < snap_tol) {
        v = (v == 0.0) ? snap_tol : std::copysign(snap_tol, v);
      }
      values[i] = v;
    });
  }
  guard.rethrow();
  return values;
}

ActiveMesh extract_active_mesh(const BoxMesh& mesh,
                               const std::vector<double>& values) {
  if (values.size() != mesh.vertices.size()) {
    throw Error(ErrorCode::contract_violation,
                "extract_active_mesh: values size mismatch");
  }
  const std::int64_t n_tets = static_cast<std::int64_t>(mesh.tets.size());
  std::vector<std::uint8_t> is_active(mesh.tets.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n_tets; ++t) {
    const auto& tet = mesh.tets[t];
    bool pos = false, neg = false;
    for (int v = 0; v < 4; ++v) {
      (values[tet[v]] > 0.0 ? pos : neg) = true;
    }
    is_active[t] = (pos && neg) ? 1 : 0;
  }

  ActiveMesh active;
  active.parent = &mesh;
  active.vertex_values = values;
  for (std::int64_t t = 0; t < n_tets; ++t) {
    if (is_active[t]) active.active_tets.push_back(static_cast<int>(t));
  }
  if (active.active_tets.empty()) {
    throw Error(ErrorCode::surface_outside_mesh,
                "extract_active_mesh: no tet is cut by the surface");
  }

  // Interior faces: faces shared by exactly two active tets.
  struct FaceKey {
    std::array<int, 3> v;
    int tet;
  };
  std::vector<FaceKey> faces;
  faces.reserve(active.active_tets.size() * 4);
  for (int t : active.active_tets) {
    const auto& tet = mesh.tets[t];
    for (int skip = 0; skip < 4; ++skip) {
      std::array<int, 3> f;
      int w = 0;
      for (int v = 0; v < 4; ++v) {
        if (v != skip) f[w++] = tet[v];
      }
      std::sort(f.begin(), f.end());
      faces.push_back({f, t});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const FaceKey& a, const FaceKey& b) {
    if (a.v != b.v) return a.v < b.v;
    return a.tet < b.tet;
  });
  for (size_t i = 0; i + 1 < faces.size(); ++i) {
    if (faces[i].v == faces[i + 1].v) {
      active.interior_faces.push_back(
          {faces[i].tet, faces[i + 1].tet, faces[i].v});
      ++i;
    }
  }

  std::vector<int> verts;
  verts.reserve(active.active_tets.size() * 4);
  for (int t : active.active_tets) {
    const auto& tet = mesh.tets[t];
    verts.insert(verts.end(), tet.begin(), tet.end());
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  active.active_vertices = std::move(verts);
  active.n_dofs = static_cast<int>(active.active_vertices.size());
  return active;
}

void write_active_mesh_vtk(const ActiveMesh& active, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::invalid_config, "cannot open " + path);
  }
  out << "# vtk DataFile Version 3.0\nactive mesh\nASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << active.n_dofs << " double\n";
  out.precision(17);
  for (int v : active.active_vertices) {
    const Vec3& p = active.parent->vertices[v];
    out << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
  out << "CELLS " << active.active_tets.size() << " "
      << 5 * active.active_tets.size() << "\n";
  for (int t : active.active_tets) {
    const auto& tet = active.parent->tets[t];
    out << 4;
    for (int v = 0; v < 4; ++v) out << " " << active.dof_of_vertex(tet[v]);
    out << "\n";
  }
  out << "CELL_TYPES " << active.active_tets.size() << "\n";
  for (size_t i = 0; i < active.active_tets.size(); ++i) out << "10\n";
}

}  // namespace cutfem
