#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cutfem/manufactured.hpp"
#include "cutfem/spectrum.hpp"

namespace cutfem {

/// Resolved configuration of one study run. Empty box / zero base_cells pick
/// the per-surface defaults (sphere: [-1.6,1.6]^3 with 5 cells per axis at
/// level 0; blob: [-2.4,2.4]^3 with 5).
struct StudyConfig {
  std::string study = "convergence";  // or "condition_sweep"
  std::string surface_name = "sphere";
  GradientVariant gradient = GradientVariant::tangential;
  Stabilization stabilization = Stabilization::none;
  double tau = 0.0;
  double stab_power = 1.0;
  double face_power = 0.0;
  bool h1_full_gradient = false;
  int levels = 6;          // convergence: number of meshes (level 0 .. levels-1)
  int base_cells = 0;      // cells per axis at level 0; 0 = surface default
  Vec3 box_lo = Vec3::Zero();
  Vec3 box_hi = Vec3::Zero();
  int mesh_level = 2;      // sweep: k with round(5 * 2^(k/2)) cells per axis
  int n_deltas = 101;
  bool diag_scale = false;
  double solver_tol = 1e-10;
  std::string out_path;

  void resolve_defaults();
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int n_dofs = 0;
  double e_l2 = 0.0;
  double e_h1 = 0.0;
  double eoc_l2 = 0.0;  // valid from level 1 on
  double eoc_h1 = 0.0;
  int solve_iters = 0;
};

struct SweepSummary {
  double min_h2_kappa = 0.0;
  double max_h2_kappa = 0.0;
  double mean_h2_kappa = 0.0;
  int n_failed = 0;
};

std::vector<ConvergenceRow> run_convergence(const StudyConfig& config);
std::pair<std::vector<SweepRow>, SweepSummary> run_condition_sweep(
    const StudyConfig& config);

/// Cells per axis of sweep mesh level k (paper parametrization, box
/// [-1.6,1.6]^3): round(5 * 2^(k/2)).
int sweep_cells_per_axis(int mesh_level);

void write_convergence_csv(const StudyConfig& config,
                           const std::vector<ConvergenceRow>& rows,
                           std::ostream& out);
void write_convergence_table(const std::vector<ConvergenceRow>& rows,
                             std::ostream& out);
void write_sweep_csv(const StudyConfig& config,
                     const std::vector<SweepRow>& rows,
                     const SweepSummary& summary, std::ostream& out);

}  // namespace cutfem
