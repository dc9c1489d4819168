#include "cutfem/cut_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "cutfem/errors.hpp"
#include "parallel_util.hpp"

namespace cutfem {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

// Constant gradient of the P1 interpolant on a tet with the given values.
Vec3 interpolant_gradient(const std::array<Vec3, 4>& coords,
                          const std::array<double, 4>& values) {
  Mat3 edges_t;
  edges_t.row(0) = coords[1] - coords[0];
  edges_t.row(1) = coords[2] - coords[0];
  edges_t.row(2) = coords[3] - coords[0];
  const Vec3 dv(values[1] - values[0], values[2] - values[0],
                values[3] - values[0]);
  return edges_t.inverse() * dv;
}

}  // namespace

double tet_volume(const std::array<Vec3, 4>& coords) {
  return (coords[1] - coords[0])
             .cross(coords[2] - coords[0])
             .dot(coords[3] - coords[0]) /
         6.0;
}

std::optional<SurfaceCell> cut_tet(const std::array<Vec3, 4>& coords,
                                   const std::array<double, 4>& values,
                                   int parent_tet) {
  for (double v : values) {
    if (v == 0.0) {
      throw Error(ErrorCode::contract_violation,
                  "cut_tet: exact zero vertex value (snap upstream)");
    }
  }
  std::array<int, 4> neg{}, pos{};
  int n_neg = 0, n_pos = 0;
  for (int v = 0; v < 4; ++v) {
    if (values[v] < 0.0) {
      neg[n_neg++] = v;
    } else {
      pos[n_pos++] = v;
    }
  }
  if (n_neg == 0 || n_pos == 0) return std::nullopt;

  auto edge_cut = [&](int a, int b) {
    const double t = values[a] / (values[a] - values[b]);
    return Vec3(coords[a] + t * (coords[b] - coords[a]));
  };

  SurfaceCell cell;
  cell.parent_tet = parent_tet;
  const Vec3 g = interpolant_gradient(coords, values);
  cell.normal = g.normalized();

  if (n_neg == 1 || n_pos == 1) {
    const int apex = (n_neg == 1) ? neg[0] : pos[0];
    const std::array<int, 3> others =
        (n_neg == 1) ? std::array<int, 3>{pos[0], pos[1], pos[2]}
                     : std::array<int, 3>{neg[0], neg[1], neg[2]};
    cell.n_vertices = 3;
    for (int i = 0; i < 3; ++i) cell.polygon[i] = edge_cut(apex, others[i]);
    // orient the triangle counterclockwise around the normal
    const Vec3 cr = (cell.polygon[1] - cell.polygon[0])
                        .cross(cell.polygon[2] - cell.polygon[0]);
    if (cr.dot(cell.normal) < 0.0) std::swap(cell.polygon[1], cell.polygon[2]);
    cell.n_triangles = 1;
    cell.triangles[0] = {0, 1, 2};
    cell.area = triangle_area(cell.polygon[0], cell.polygon[1], cell.polygon[2]);
  } else {
    // 2/2 split: four edge cuts, ordered cyclically by angle around the
    // centroid in the cut plane.
    std::array<Vec3, 4> pts = {edge_cut(neg[0], pos[0]),
                               edge_cut(neg[0], pos[1]),
                               edge_cut(neg[1], pos[0]),
                               edge_cut(neg[1], pos[1])};
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : pts) centroid += p;
    centroid /= 4.0;
    Vec3 u = (pts[0] - centroid);
    u = (u - u.dot(cell.normal) * cell.normal).normalized();
    const Vec3 v = cell.normal.cross(u);
    std::array<int, 4> order = {0, 1, 2, 3};
    std::array<double, 4> angle;
    for (int i = 0; i < 4; ++i) {
      const Vec3 r = pts[i] - centroid;
      angle[i] = std::atan2(r.dot(v), r.dot(u));
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return angle[a] < angle[b]; });
    cell.n_vertices = 4;
    for (int i = 0; i < 4; ++i) cell.polygon[i] = pts[order[i]];
    // split along the shorter diagonal, preferring the one through vertex 0
    const double d02 = (cell.polygon[2] - cell.polygon[0]).squaredNorm();
    const double d13 = (cell.polygon[3] - cell.polygon[1]).squaredNorm();
    cell.n_triangles = 2;
    if (d02 <= d13) {
      cell.triangles[0] = {0, 1, 2};
      cell.triangles[1] = {0, 2, 3};
    } else {
      cell.triangles[0] = {1, 2, 3};
      cell.triangles[1] = {1, 3, 0};
    }
    cell.area = 0.0;
    for (int t = 0; t < 2; ++t) {
      cell.area += triangle_area(cell.polygon[cell.triangles[t][0]],
                                 cell.polygon[cell.triangles[t][1]],
                                 cell.polygon[cell.triangles[t][2]]);
    }
  }
  return cell;
}

namespace {

struct BaryPoint {
  double a, b, c, w;  // barycentric coords and weight fraction
};

const std::array<BaryPoint, 1> tri_deg1 = {{{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}}};
const std::array<BaryPoint, 3> tri_deg2 = {{{0.5, 0.5, 0.0, 1.0 / 3},
                                            {0.0, 0.5, 0.5, 1.0 / 3},
                                            {0.5, 0.0, 0.5, 1.0 / 3}}};
// Dunavant degree-4 rule, 6 points.
const std::array<BaryPoint, 6> tri_deg4 = {{
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
}};

template <size_t N>
void append_triangle_rule(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                          const std::array<BaryPoint, N>& rule,
                          QuadratureRule& out) {
  const double area = triangle_area(p0, p1, p2);
  for (const BaryPoint& q : rule) {
    out.points.push_back(q.a * p0 + q.b * p1 + q.c * p2);
    out.weights.push_back(q.w * area);
  }
}

}  // namespace

QuadratureRule surface_quadrature(const SurfaceCell& cell, int degree) {
  QuadratureRule rule;
  for (int t = 0; t < cell.n_triangles; ++t) {
    const Vec3& p0 = cell.polygon[cell.triangles[t][0]];
    const Vec3& p1 = cell.polygon[cell.triangles[t][1]];
    const Vec3& p2 = cell.polygon[cell.triangles[t][2]];
    switch (degree) {
      case 1:
        append_triangle_rule(p0, p1, p2, tri_deg1, rule);
        break;
      case 2:
        append_triangle_rule(p0, p1, p2, tri_deg2, rule);
        break;
      case 4:
        append_triangle_rule(p0, p1, p2, tri_deg4, rule);
        break;
      default:
        throw Error(ErrorCode::unsupported_degree,
                    "surface_quadrature: degree must be 1, 2 or 4");
    }
  }
  return rule;
}

QuadratureRule tet_quadrature(const std::array<Vec3, 4>& coords, int degree) {
  const double vol = tet_volume(coords);
  if (!(vol > 0.0)) {
    throw Error(ErrorCode::degenerate_geometry,
                "tet_quadrature: nonpositive volume");
  }
  QuadratureRule rule;
  if (degree == 1) {
    rule.points.push_back(0.25 * (coords[0] + coords[1] + coords[2] + coords[3]));
    rule.weights.push_back(vol);
  } else if (degree == 2) {
    const double a = 0.585410196624969;  // (5 + 3 sqrt 5) / 20
    const double b = 0.138196601125011;  // (5 - sqrt 5) / 20
    for (int i = 0; i < 4; ++i) {
      Vec3 p = Vec3::Zero();
      for (int j = 0; j < 4; ++j) p += (i == j ? a : b) * coords[j];
      rule.points.push_back(p);
      rule.weights.push_back(0.25 * vol);
    }
  } else {
    throw Error(ErrorCode::unsupported_degree,
                "tet_quadrature: degree must be 1 or 2");
  }
  return rule;
}

std::vector<SurfaceCell> extract_surface_cells(const ActiveMesh& active) {
  const std::int64_t n = static_cast<std::int64_t>(active.active_tets.size());
  std::vector<SurfaceCell> cells(n);
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    guard.run([&, i] {
      const int t = active.active_tets[i];
      auto cell = cut_tet(active.parent->tet_coords(t), active.tet_values(t), t);
      if (!cell) {
        throw Error(ErrorCode::contract_violation,
                    "extract_surface_cells: active tet without sign change");
      }
      cells[i] = *cell;
    });
  }
  guard.rethrow();
  return cells;
}

void write_surface_cells(const std::vector<SurfaceCell>& cells,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::invalid_config, "cannot open " + path);
  }
  out.precision(17);
  for (const SurfaceCell& c : cells) {
    out << c.parent_tet << " " << c.n_vertices;
    for (int i = 0; i < c.n_vertices; ++i) {
      out << " " << c.polygon[i].x() << " " << c.polygon[i].y() << " "
          << c.polygon[i].z();
    }
    out << " area " << c.area << " normal " << c.normal.x() << " "
        << c.normal.y() << " " << c.normal.z() << "\n";
  }
}

}  // namespace cutfem
