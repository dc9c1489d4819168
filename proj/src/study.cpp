#include "cutfem/study.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cutfem/errors.hpp"
#include "cutfem/linear_solve.hpp"

namespace cutfem {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string sci(double v) { return fmt("%.5e", v); }

const char* gradient_name(GradientVariant g) {
  return g == GradientVariant::tangential ? "tangential" : "full";
}

const char* stab_name(Stabilization s) {
  switch (s) {
    case Stabilization::none: return "none";
    case Stabilization::full_gradient: return "fullgrad";
    case Stabilization::face: return "face";
  }
  return "?";
}

void echo_config(const StudyConfig& c, std::ostream& out) {
  out << "# study=" << c.study << "\n";
  out << "# surface=" << c.surface_name << "\n";
  out << "# gradient=" << gradient_name(c.gradient) << "\n";
  out << "# stab=" << stab_name(c.stabilization) << "\n";
  out << "# tau=" << sci(c.tau) << "\n";
  out << "# stab_power=" << sci(c.stab_power) << "\n";
  out << "# face_power=" << sci(c.face_power) << "\n";
  if (c.study == "convergence") {
    out << "# h1_full_gradient=" << (c.h1_full_gradient ? 1 : 0) << "\n";
    out << "# levels=" << c.levels << "\n";
    out << "# base_cells=" << c.base_cells << "\n";
  } else {
    out << "# mesh_level=" << c.mesh_level << "\n";
    out << "# n_deltas=" << c.n_deltas << "\n";
    out << "# diag_scale=" << (c.diag_scale ? 1 : 0) << "\n";
  }
  out << "# box_lo=" << sci(c.box_lo.x()) << "," << sci(c.box_lo.y()) << ","
      << sci(c.box_lo.z()) << "\n";
  out << "# box_hi=" << sci(c.box_hi.x()) << "," << sci(c.box_hi.y()) << ","
      << sci(c.box_hi.z()) << "\n";
  out << "# solver_tol=" << sci(c.solver_tol) << "\n";
}

void check_surface_inside(const ImplicitSurface& surface, const BoxMesh& mesh) {
  if (!(surface.bounding_box.lo.array() > mesh.lo.array()).all() ||
      !(surface.bounding_box.hi.array() < mesh.hi.array()).all()) {
    throw Error(ErrorCode::surface_outside_mesh,
                "surface bounding box is not strictly inside the mesh box");
  }
}

}  // namespace

void StudyConfig::resolve_defaults() {
  if (base_cells <= 0) base_cells = 5;
  if (box_lo == Vec3::Zero() && box_hi == Vec3::Zero()) {
    const double a = (surface_name == "blob") ? 2.4 : 1.6;
    box_lo = Vec3::Constant(-a);
    box_hi = Vec3::Constant(a);
  }
}

int sweep_cells_per_axis(int mesh_level) {
  return static_cast<int>(std::lround(5.0 * std::pow(2.0, mesh_level / 2.0)));
}

std::vector<ConvergenceRow> run_convergence(const StudyConfig& config_in) {
  StudyConfig config = config_in;
  config.resolve_defaults();
  if (config.levels < 2) {
    throw Error(ErrorCode::invalid_config, "convergence needs levels >= 2");
  }
  const ManufacturedProblem problem =
      config.surface_name == "blob" ? make_example2() : make_example1();

  FormRecipe recipe;
  recipe.gradient = config.gradient;
  recipe.stabilization = config.stabilization;
  recipe.tau = config.tau;
  recipe.stab_power = config.stab_power;
  recipe.face_power = config.face_power;
  recipe.include_mass = true;  // reaction-diffusion problem -lap u + u = f

  std::vector<ConvergenceRow> rows;
  for (int level = 0; level < config.levels; ++level) {
    std::string stage = "mesh";
    try {
      const int n = config.base_cells << level;
      const BoxMesh mesh = build_box_mesh(config.box_lo, config.box_hi,
                                          {n, n, n});
      check_surface_inside(problem.surface, mesh);
      stage = "levelset";
      const std::vector<double> values =
          interpolate_levelset(mesh, problem.surface);
      stage = "active_mesh";
      const ActiveMesh active = extract_active_mesh(mesh, values);
      stage = "cut_geometry";
      const std::vector<SurfaceCell> cells = extract_surface_cells(active);
      stage = "assemble";
      const SparseSystem system =
          combine(recipe, active, cells,
                  [&](const Vec3& x) { return manufactured_rhs(problem, x); });
      stage = "solve";
      const SolveReport sol = solve(system, config.solver_tol);
      stage = "errors";
      const ExactFieldCache cache =
          sample_exact_fields(active, cells, problem, 4, true);
      ConvergenceRow row;
      row.level = level;
      row.h = mesh.h;
      row.n_dofs = system.n;
      row.solve_iters = sol.iterations;
      row.e_l2 = l2_error(active, cells, sol.coefficients, problem, 4, &cache);
      row.e_h1 = h1_error(active, cells, sol.coefficients, problem, 4,
                          config.h1_full_gradient, &cache);
      if (!rows.empty()) {
        const double dl = 1.0;
        row.eoc_l2 = std::log(rows.back().e_l2 / row.e_l2) / (dl * std::log(2.0));
        row.eoc_h1 = std::log(rows.back().e_h1 / row.e_h1) / (dl * std::log(2.0));
      }
      rows.push_back(row);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::invalid_config,
                  "convergence level " + std::to_string(level) + ", stage " +
                      stage + ": " + e.what());
    }
  }
  return rows;
}

std::pair<std::vector<SweepRow>, SweepSummary> run_condition_sweep(
    const StudyConfig& config_in) {
  StudyConfig config = config_in;
  config.surface_name = "sphere";
  config.resolve_defaults();
  if (config.n_deltas < 2) {
    throw Error(ErrorCode::invalid_config, "sweep needs n_deltas >= 2");
  }
  const int n = sweep_cells_per_axis(config.mesh_level);
  const BoxMesh mesh = build_box_mesh(config.box_lo, config.box_hi, {n, n, n});
  const Vec3 cell = mesh.cell_size();

  FormRecipe recipe;
  recipe.gradient = config.gradient;
  recipe.stabilization = config.stabilization;
  recipe.tau = config.tau;
  recipe.stab_power = config.stab_power;
  recipe.face_power = config.face_power;
  recipe.include_mass = false;

  std::vector<double> deltas(config.n_deltas);
  for (int i = 0; i < config.n_deltas; ++i) {
    deltas[i] = static_cast<double>(i) / (config.n_deltas - 1);
  }
  auto family = [&cell](double delta) {
    return translated_sphere(delta * Vec3(cell.x(), cell.y(), cell.z()));
  };
  const std::vector<SweepRow> rows =
      condition_sweep(family, mesh, recipe, deltas, config.diag_scale);

  SweepSummary summary;
  int count = 0;
  double min_v = 0.0, max_v = 0.0, sum = 0.0;
  for (const SweepRow& row : rows) {
    if (row.failed) {
      ++summary.n_failed;
      continue;
    }
    if (count == 0) {
      min_v = max_v = row.h2_kappa;
    } else {
      min_v = std::min(min_v, row.h2_kappa);
      max_v = std::max(max_v, row.h2_kappa);
    }
    sum += row.h2_kappa;
    ++count;
  }
  if (count > 0) {
    summary.min_h2_kappa = min_v;
    summary.max_h2_kappa = max_v;
    summary.mean_h2_kappa = sum / count;
  }
  return {rows, summary};
}

void write_convergence_csv(const StudyConfig& config_in,
                           const std::vector<ConvergenceRow>& rows,
                           std::ostream& out) {
  StudyConfig config = config_in;
  config.resolve_defaults();
  echo_config(config, out);
  out << "level,h,n_dofs,E_L2,E_H1,EOC_L2,EOC_H1,solve_iters\n";
  for (const ConvergenceRow& r : rows) {
    out << r.level << "," << sci(r.h) << "," << r.n_dofs << "," << sci(r.e_l2)
        << "," << sci(r.e_h1) << ",";
    if (r.level > rows.front().level) {
      out << fmt("%.12g", r.eoc_l2) << "," << fmt("%.12g", r.eoc_h1);
    } else {
      out << ",";
    }
    out << "," << r.solve_iters << "\n";
  }
}

void write_convergence_table(const std::vector<ConvergenceRow>& rows,
                             std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%5s %-11s %8s %-11s %6s %-11s %6s %6s\n",
                "level", "h", "n_dofs", "E_L2", "EOC", "E_H1", "EOC", "iters");
  out << line;
  for (const ConvergenceRow& r : rows) {
    const bool first = r.level == rows.front().level;
    char eoc_l2[16], eoc_h1[16];
    std::snprintf(eoc_l2, sizeof(eoc_l2), first ? "--" : "%.2f", r.eoc_l2);
    std::snprintf(eoc_h1, sizeof(eoc_h1), first ? "--" : "%.2f", r.eoc_h1);
    std::snprintf(line, sizeof(line),
                  "%5d %-11.4e %8d %-11.3e %6s %-11.3e %6s %6d\n", r.level, r.h,
                  r.n_dofs, r.e_l2, eoc_l2, r.e_h1, eoc_h1, r.solve_iters);
    out << line;
  }
}

void write_sweep_csv(const StudyConfig& config_in,
                     const std::vector<SweepRow>& rows,
                     const SweepSummary& summary, std::ostream& out) {
  StudyConfig config = config_in;
  config.resolve_defaults();
  echo_config(config, out);
  out << "delta,n_dofs,lambda_max,lambda_min_nonzero,kappa,h2_kappa\n";
  for (const SweepRow& r : rows) {
    if (r.failed) {
      out << "# delta=" << sci(r.delta) << " FAILED: " << r.error << "\n";
      continue;
    }
    out << sci(r.delta) << "," << r.n_dofs << "," << sci(r.lambda_max) << ","
        << sci(r.lambda_min_nonzero) << "," << sci(r.kappa) << ","
        << sci(r.h2_kappa) << "\n";
  }
  out << "# summary_h2_kappa: min=" << sci(summary.min_h2_kappa)
      << " max=" << sci(summary.max_h2_kappa)
      << " mean=" << sci(summary.mean_h2_kappa)
      << " failed=" << summary.n_failed << "\n";
}

}  // namespace cutfem
